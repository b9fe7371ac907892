#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace hof {

using u128 = unsigned __int128;

// q_n with q_0 = q_1 = 1; exact up to n = 184
u128 fibonacci(int n);
std::string to_string(u128 v);

// least l > 0 with U^l = I mod n, U = [[0,1],[1,-1]]
int pisano(int n);

struct IMat2 {
    std::int64_t a11, a12, a21, a22;
};
IMat2 imat_mul_mod(const IMat2& A, const IMat2& B, std::int64_t n);
IMat2 u_power_mod(int k, std::int64_t n);

struct RotVec {
    double rho_f = 0, rho_g = 0;
};
RotVec torus_step(const RotVec& v);

// exact rational rotation vector (f/den, g/den), entries reduced mod den
struct RatVec {
    std::int64_t f = 0, g = 0, den = 1;
    bool operator==(const RatVec&) const = default;
};
RatVec torus_step(const RatVec& v);
RatVec torus_step_inverse(const RatVec& v);
int orbit_period(const RatVec& v);

// monic quartics etc., coefficients from the leading term down
struct PolySpec {
    std::string name;
    std::vector<double> coeffs;
};
double poly_eval(const std::vector<double>& coeffs, double x);
std::vector<double> real_roots(const std::vector<double>& coeffs);
inline std::vector<double> real_roots(const PolySpec& p) { return real_roots(p.coeffs); }

PolySpec poly_P3();
PolySpec poly_P6();
PolySpec poly_Q3();
PolySpec poly_Q6();

struct Constants {
    double alpha, c3, c6, c12;
    double mu1_3, mu1_6;  // largest real roots of P3, P6
    double mu2_3, mu2_6;  // alpha^-3, alpha^-6
    double tau3, tau6;
    double E3, E6;        // reference critical energies (E3 is recomputed by the renorm tuner)
};
Constants constants();
nlohmann::json constants_json();

}  // namespace hof
