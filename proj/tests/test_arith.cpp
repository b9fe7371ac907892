#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hof/arith.hpp"
#include "hof/golden.hpp"

using namespace hof;

namespace {

double product_of(const std::vector<double>& r)
{
    double p = 1;
    for (double x : r) p *= x;
    return p;
}

}  // namespace

TEST_CASE("arith: Fibonacci numbers")
{
    const int first[] = {1, 1, 2, 3, 5, 8, 13, 21};
    for (int n = 0; n < 8; ++n) CHECK(fibonacci(n) == u128(first[n]));
    for (int n = 1; n <= 180; ++n) CHECK(fibonacci(n + 1) == fibonacci(n) + fibonacci(n - 1));
    CHECK(std::abs(double(fibonacci(10)) * std::sqrt(5.0) * std::pow(kAlpha, 11) - 1) < 1e-4);
    CHECK(to_string(fibonacci(90)) == "4660046610375530309");
}

TEST_CASE("arith: Pisano periods")
{
    CHECK(pisano(2) == 3);
    CHECK(pisano(4) == 6);
    CHECK(pisano(6) == 24);
    CHECK(pisano(8) == 12);
    CHECK(pisano(3) == 8);
    CHECK(pisano(5) == 20);
    CHECK(pisano(10) == 60);
    // pi(mn) = lcm(pi(m), pi(n)) for coprime m, n
    CHECK(pisano(15) == std::lcm(pisano(3), pisano(5)));
    CHECK(pisano(40) == std::lcm(pisano(8), pisano(5)));
}

TEST_CASE("arith: U to the Pisano period is the identity mod n")
{
    for (int n = 2; n <= 40; ++n) {
        int l = pisano(n);
        IMat2 P = u_power_mod(l, n);
        CHECK(P.a11 == 1 % n);
        CHECK(P.a12 == 0);
        CHECK(P.a21 == 0);
        CHECK(P.a22 == 1 % n);
        // and no earlier power
        for (int k = 1; k < l; ++k) {
            IMat2 Q = u_power_mod(k, n);
            CHECK_FALSE((Q.a11 == 1 % n && Q.a12 == 0 && Q.a21 == 0 && Q.a22 == 1 % n));
        }
    }
}

TEST_CASE("arith: torus map orbits")
{
    CHECK(orbit_period(RatVec{0, 1, 2}) == 3);
    CHECK(orbit_period(RatVec{0, 1, 4}) == 6);
    CHECK(orbit_period(RatVec{0, 0, 1}) == 1);
    for (int n = 2; n <= 12; ++n)
        for (int m = 1; m < n; ++m)
            if (std::gcd(m, n) == 1) CHECK(orbit_period(RatVec{0, m, n}) == pisano(n));
    CHECK(pisano(3) % orbit_period(RatVec{1, 2, 3}) == 0);
    // explicit 3-cycle (0,1/2) -> (1/2,1/2) -> (1/2,0)
    RatVec v{0, 1, 2};
    v = torus_step(v);
    CHECK(v == RatVec{1, 1, 2});
    v = torus_step(v);
    CHECK(v == RatVec{1, 0, 2});
    CHECK(torus_step_inverse(torus_step(RatVec{3, 5, 7})) == RatVec{3, 5, 7});
    RotVec r = torus_step(RotVec{0.3, 0.8});
    CHECK(r.rho_f == doctest::Approx(0.8));
    CHECK(r.rho_g == doctest::Approx(0.5));
}

TEST_CASE("arith: root identities of P3 and P6")
{
    auto r3 = real_roots(poly_P3());
    auto r6 = real_roots(poly_P6());
    REQUIRE(r3.size() == 2);
    REQUIRE(r6.size() == 2);
    CHECK(std::abs(product_of(r3) - std::pow(-kAlpha, -3)) < 1e-9);
    CHECK(std::abs(product_of(r6) - std::pow(-kAlpha, -6)) < 1e-9);
    double z3 = 0.5 * (r3[0] + r3[1]), z6 = 0.5 * (r6[0] + r6[1]);
    CHECK(std::abs(z3 * z3 - 15 * z3 - 5) < 1e-9);
    CHECK(std::abs(z6 * z6 - 98 * z6 - 19) < 1e-9);
    for (double x : r3) CHECK(std::abs(poly_eval(poly_P3().coeffs, x)) < 1e-8);
    CHECK(*std::max_element(r3.begin(), r3.end()) == doctest::Approx(30.790).epsilon(1e-4));
    CHECK(*std::max_element(r6.begin(), r6.end()) == doctest::Approx(196.29).epsilon(1e-4));
}

TEST_CASE("arith: Q roots are exp(+-2c)")
{
    Constants k = constants();
    auto q3 = real_roots(poly_Q3());
    auto q6 = real_roots(poly_Q6());
    REQUIRE(q3.size() == 2);
    REQUIRE(q6.size() == 2);
    std::sort(q3.begin(), q3.end());
    std::sort(q6.begin(), q6.end());
    CHECK(std::abs(q3[0] - std::exp(-2 * k.c3)) < 1e-9);
    CHECK(std::abs(q3[1] - std::exp(2 * k.c3)) < 1e-9);
    CHECK(std::abs(q6[0] - std::exp(-2 * k.c6)) < 1e-9);
    CHECK(std::abs(q6[1] - std::exp(2 * k.c6)) < 1e-9);
    CHECK(q3[1] == doctest::Approx(2.8900536).epsilon(1e-7));
}

TEST_CASE("arith: constants")
{
    Constants k = constants();
    CHECK(std::abs(k.c6 - 2 * k.c3) < 1e-12);
    CHECK(k.c3 == doctest::Approx(0.5306375).epsilon(1e-7));
    CHECK(std::abs(k.mu2_3 - (2 + std::sqrt(5.0))) < 1e-12);
    CHECK(k.tau3 == doctest::Approx(0.4212).epsilon(5e-4));
    CHECK(k.alpha == doctest::Approx(0.61803398874989).epsilon(1e-14));
    CHECK(real_roots(std::vector<double>{1, 0, 1}).empty());
}
