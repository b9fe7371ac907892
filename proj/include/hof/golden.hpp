#pragma once

#include <cmath>
#include <cstdint>

namespace hof {

// inverse golden mean (sqrt5 - 1)/2
template <class T = double>
inline T alpha_star()
{
    return (std::sqrt(T(5)) - T(1)) / T(2);
}

inline const double kAlpha = alpha_star<double>();

// exact element a + b*alpha of Z[alpha]; used for rotation frequencies
struct Golden {
    std::int64_t a = 0;
    std::int64_t b = 0;

    template <class T = double>
    T value() const { return T(a) + T(b) * alpha_star<T>(); }

    // alpha^2 = 1 - alpha
    Golden times_alpha() const { return {b, a - b}; }
    Golden div_alpha() const { return {a + b, a}; }

    Golden operator+(Golden o) const { return {a + o.a, b + o.b}; }
    Golden operator-(Golden o) const { return {a - o.a, b - o.b}; }
    Golden operator-() const { return {-a, -b}; }
    bool operator==(const Golden&) const = default;
};

inline constexpr Golden kOne{1, 0};
inline constexpr Golden kAlphaG{0, 1};

}  // namespace hof
