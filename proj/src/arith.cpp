#include "hof/arith.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hof/errors.hpp"
#include "hof/golden.hpp"

namespace hof {

u128 fibonacci(int n)
{
    if (n < 0) throw Error("fibonacci: n < 0");
    if (n > 184) throw Error("fibonacci: n > 184 overflows 128 bits");
    u128 a = 1, b = 1;
    for (int k = 1; k <= n; ++k) {
        u128 c = a + b;
        a = b;
        b = c;
    }
    return a;
}

std::string to_string(u128 v)
{
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.push_back(char('0' + int(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

int pisano(int n)
{
    if (n < 2) throw Error("pisano: n < 2");
    // period of (F_k, F_{k+1}) mod n; bounded by 6n
    std::int64_t a = 0, b = 1;
    for (int l = 1; l <= 6 * n + 6; ++l) {
        std::int64_t c = (a + b) % n;
        a = b;
        b = c;
        if (a == 0 && b == 1) return l;
    }
    throw Error("pisano: period not found");
}

IMat2 imat_mul_mod(const IMat2& A, const IMat2& B, std::int64_t n)
{
    auto md = [n](std::int64_t v) { return ((v % n) + n) % n; };
    return {md(A.a11 * B.a11 + A.a12 * B.a21), md(A.a11 * B.a12 + A.a12 * B.a22),
            md(A.a21 * B.a11 + A.a22 * B.a21), md(A.a21 * B.a12 + A.a22 * B.a22)};
}

IMat2 u_power_mod(int k, std::int64_t n)
{
    IMat2 P{1 % n, 0, 0, 1 % n};
    IMat2 U{0, 1, 1, (n - 1) % n};
    for (int i = 0; i < k; ++i) P = imat_mul_mod(U, P, n);
    return P;
}

RotVec torus_step(const RotVec& v)
{
    auto md = [](double x) { return x - std::floor(x); };
    return {md(v.rho_g), md(v.rho_f - v.rho_g)};
}

namespace {
std::int64_t mod(std::int64_t a, std::int64_t n) { return ((a % n) + n) % n; }
}  // namespace

RatVec torus_step(const RatVec& v) { return {mod(v.g, v.den), mod(v.f - v.g, v.den), v.den}; }

// inverse of [[0,1],[1,-1]] is [[1,1],[1,0]]
RatVec torus_step_inverse(const RatVec& v) { return {mod(v.f + v.g, v.den), mod(v.f, v.den), v.den}; }

int orbit_period(const RatVec& v0)
{
    if (v0.den < 1) throw Error("orbit_period: denominator must be positive");
    RatVec start{mod(v0.f, v0.den), mod(v0.g, v0.den), v0.den};
    RatVec v = start;
    // the map is a bijection of a finite set, so the orbit is a cycle
    for (std::int64_t l = 1; l <= 6 * v0.den * v0.den + 6; ++l) {
        v = torus_step(v);
        if (v == start) return int(l);
    }
    throw Error("orbit_period: period not found");
}

double poly_eval(const std::vector<double>& c, double x)
{
    double s = 0;
    for (double a : c) s = s * x + a;
    return s;
}

namespace {

std::vector<double> derivative(const std::vector<double>& c)
{
    std::vector<double> d;
    int n = int(c.size()) - 1;
    for (int i = 0; i < n; ++i) d.push_back(c[i] * double(n - i));
    return d;
}

double refine(const std::vector<double>& c, double lo, double hi)
{
    double flo = poly_eval(c, lo);
    for (int it = 0; it < 300 && hi - lo > 0; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double fm = poly_eval(c, mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    // Newton polish
    auto d = derivative(c);
    for (int it = 0; it < 3; ++it) {
        double dp = poly_eval(d, x);
        if (dp == 0) break;
        double nx = x - poly_eval(c, x) / dp;
        if (nx < lo || nx > hi) break;
        x = nx;
    }
    return x;
}

}  // namespace

std::vector<double> real_roots(const std::vector<double>& coeffs)
{
    std::vector<double> c = coeffs;
    while (!c.empty() && c.front() == 0) c.erase(c.begin());
    if (c.size() < 2) return {};
    if (c.size() == 2) return {-c[1] / c[0]};
    // Cauchy bound
    double bound = 0;
    for (std::size_t i = 1; i < c.size(); ++i) bound = std::max(bound, std::abs(c[i] / c[0]));
    bound += 1;
    // critical points split the line into monotone pieces
    std::vector<double> cuts{-bound};
    for (double r : real_roots(derivative(c)))
        if (r > -bound && r < bound) cuts.push_back(r);
    cuts.push_back(bound);
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double a = cuts[i], b = cuts[i + 1];
        double fa = poly_eval(c, a), fb = poly_eval(c, b);
        if (fa == 0) {
            if (roots.empty() || std::abs(roots.back() - a) > 1e-12 * (1 + std::abs(a))) roots.push_back(a);
            continue;
        }
        if ((fa < 0) != (fb < 0)) roots.push_back(refine(c, a, b));
    }
    double last = cuts.back();
    if (poly_eval(c, last) == 0) roots.push_back(last);
    return roots;
}

PolySpec poly_P3() { return {"P3", {1, -30, -24, -10, -1}}; }
PolySpec poly_P6() { return {"P6", {1, -196, -58, -4, 1}}; }
PolySpec poly_Q3() { return {"Q3", {1, -2, -2, -2, 1}}; }
PolySpec poly_Q6() { return {"Q6", {1, -8, -2, -8, 1}}; }

Constants constants()
{
    Constants k{};
    double a = kAlpha;
    k.alpha = a;
    k.c3 = 0.5 * std::acosh(1 / a);
    k.c6 = 0.5 * std::acosh(std::pow(a, -3));
    k.c12 = 0.5 * std::acosh(std::pow(a, -6));
    auto largest = [](const PolySpec& p) {
        auto r = real_roots(p);
        return *std::max_element(r.begin(), r.end());
    };
    k.mu1_3 = largest(poly_P3());
    k.mu1_6 = largest(poly_P6());
    k.mu2_3 = std::pow(a, -3);
    k.mu2_6 = std::pow(a, -6);
    k.tau3 = 3 * std::log(1 / a) / std::log(k.mu1_3);
    k.tau6 = 6 * std::log(1 / a) / std::log(k.mu1_6);
    k.E3 = 2.5975151853760;
    k.E6 = 0.0;
    return k;
}

nlohmann::json constants_json()
{
    Constants k = constants();
    return {{"alpha", k.alpha}, {"c3", k.c3},       {"c6", k.c6},       {"c12", k.c12},
            {"mu1_3", k.mu1_3}, {"mu1_6", k.mu1_6}, {"mu2_3", k.mu2_3}, {"mu2_6", k.mu2_6},
            {"tau3", k.tau3},   {"tau6", k.tau6},   {"E3", k.E3},       {"E6", k.E6}};
}

}  // namespace hof
