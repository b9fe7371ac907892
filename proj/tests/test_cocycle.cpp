#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hof/amspec.hpp"
#include "hof/cocycle.hpp"
#include "hof/golden.hpp"

using namespace hof;

namespace {

constexpr double kPi = std::numbers::pi;

Mat2 rot(double t) { return {std::cos(t), -std::sin(t), std::sin(t), std::cos(t)}; }

}  // namespace

TEST_CASE("cocycle: constant rotation has rotation number t/2pi")
{
    for (double r : {0.1, 0.37, 0.8}) {
        auto G = constant_map(kAlpha, rot(2 * kPi * r));
        auto est = rotation_number(G, 20000);
        CHECK(circle_dist(est.value, r) < 1e-9);
    }
}

TEST_CASE("cocycle: conjugating by a hyperbolic matrix keeps the rotation number")
{
    // C^{-1} R C is elliptic but not orthogonal; angle increments are uneven
    Mat2 C{2.0, 0.3, 0.1, 0.515};
    auto G = conjugate(constant_map(kAlpha, rot(2 * kPi * 0.23)), C);
    CHECK(circle_dist(rotation_number(G, 200000).value, 0.23) < 1e-4);
}

TEST_CASE("cocycle: rotation number is additive on commuting pairs")
{
    Mat2 C{1.7, -0.4, 0.25, 0.53};
    double a = 0.11, b = 0.305;
    auto F = conjugate(constant_map(1.0, rot(2 * kPi * a)), C);
    auto G = conjugate(constant_map(kAlpha, rot(2 * kPi * b)), C);
    CHECK(commutation_defect(F, G) < 1e-13);
    double rf = rotation_number(F, 200000).value;
    double rg = rotation_number(G, 200000).value;
    double rfg = rotation_number(compose(F, G), 200000).value;
    CHECK(circle_dist(rfg, rf + rg) < 1e-4);
    // and for the inverse
    CHECK(circle_dist(rotation_number(inverse(G), 200000).value, -rg) < 1e-4);
}

TEST_CASE("cocycle: almost Mathieu at the centre of the spectrum")
{
    auto G = am_transfer({0.0, 1.0, 0.0, kAlpha});
    auto est = rotation_number(G, 1000000);
    CHECK(std::abs(est.value - 0.25) < 1e-4);
}

TEST_CASE("cocycle: Lyapunov exponent is log lambda in the supercritical regime")
{
    auto G = am_transfer({0.0, 2.0, 0.0, kAlpha});
    CHECK(std::abs(lyapunov(G, 1000000).value - std::log(2.0)) < 1e-3);
    auto H = am_transfer({1.3, 3.0, 0.2, kAlpha});
    CHECK(std::abs(lyapunov(H, 1000000).value - std::log(3.0)) < 1e-3);
}

TEST_CASE("cocycle: above the spectrum the rotation number vanishes mod 1/2")
{
    // d = 1 - 2 rho mod 1: rho is 0 or 1/2 outside the spectrum on top
    auto G = am_transfer({5.0, 1.0, 0.0, kAlpha});
    double r = rotation_number(G, 100000).value;
    CHECK(std::min(circle_dist(r, 0.0), circle_dist(r, 0.5)) < 1e-6);
    CHECK(lyapunov(G, 100000).value > 0.5);
}

TEST_CASE("cocycle: almost Mathieu maps are reversible")
{
    // G^{-1} = S G S needs V(x - alpha) = V(-x): phase alpha/2
    for (double E : {0.0, 1.0, 2.5}) {
        auto G = am_transfer({E, 1.0, kAlpha / 2, kAlpha});
        CHECK(reversibility_defect(G) < 1e-10);
    }
    auto G = am_transfer({1.0, 1.0, 0.0, kAlpha});
    CHECK(reversibility_defect(G) > 1e-3);
}

TEST_CASE("cocycle: composition and inverse")
{
    auto G = am_transfer({0.6, 1.0, 0.0, kAlpha});
    auto I = compose(G, inverse(G));
    CHECK(I.freq == doctest::Approx(0.0));
    for (double x : {-0.8, 0.1, 0.77}) CHECK((I(x) - Mat2::identity()).max_abs() < 1e-13);
    auto R = rescale_x(G, 0.5);
    CHECK(R.freq == doctest::Approx(2 * kAlpha));
    CHECK((R(0.4) - G(0.2)).max_abs() < 1e-15);
}

TEST_CASE("cocycle: power norm of a constant hyperbolic map")
{
    Mat2 D{2, 0, 0, 0.5};
    auto G = constant_map(kAlpha, D);
    CHECK(cocycle_power_norm(G, 2000) == doctest::Approx(2000 * std::log(2.0)).epsilon(1e-12));
}
