#pragma once

#include <stdexcept>
#include <string>

namespace hof {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// |det - 1| too large for an SL(2) operation
struct DeterminantError : Error {
    using Error::Error;
};

// argument outside a series domain, or shifted/rescaled domain overflow
struct DomainError : Error {
    using Error::Error;
};

// root or level-set bracketing failed
struct BracketError : Error {
    using Error::Error;
};

// iteration did not converge (fixed point, sigma, subspace iteration)
struct ConvergenceError : Error {
    using Error::Error;
};

// projective angle continuation could not be resolved
struct BranchError : Error {
    using Error::Error;
};

// E lies inside a band where a gap was required
struct InBandError : Error {
    using Error::Error;
};

}  // namespace hof
