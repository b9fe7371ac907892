#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hof/arith.hpp"
#include "hof/errors.hpp"
#include "hof/experiments.hpp"

using namespace hof;

namespace {

constexpr double kPi = std::numbers::pi;

template <class Fn>
ScalingScan synthetic(int n, Fn f)
{
    ScalingScan sc;
    for (int i = 0; i < n; ++i) {
        double e = 1e-6 * std::pow(1e4, double(i) / (n - 1));
        sc.eps_grid.push_back(e);
        sc.f_values.push_back(f(e));
        sc.f_errors.push_back(0.0);
        sc.flagged.push_back(false);
    }
    return sc;
}

}  // namespace

TEST_CASE("experiments: synthetic log-periodic power law")
{
    const double tau = 0.4212, P = 3.427;
    auto sc = synthetic(64, [&](double e) { return std::pow(e, tau) * (2 + std::sin(2 * kPi * std::log(e) / P)); });
    auto fr = fit_power_law(sc);
    MESSAGE("exponent " << fr.exponent << " (line " << fr.line_exponent << "), period " << fr.oscillation_period);
    CHECK(std::abs(fr.exponent / tau - 1) < 0.01);
    CHECK(std::abs(fr.oscillation_period / P - 1) < 0.02);
    CHECK(fr.oscillation_amplitude > fr.noise);
}

TEST_CASE("experiments: pure power law has no oscillation")
{
    auto sc = synthetic(40, [](double e) { return 3 * std::sqrt(e); });
    auto fr = fit_power_law(sc);
    CHECK(fr.exponent == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fr.oscillation_amplitude < 1e-10);
    CHECK(fr.residual < 1e-12);
    CHECK_FALSE(fr.envelope);
}

TEST_CASE("experiments: fundamental period wins over a dominant harmonic")
{
    // third harmonic carries most of the power; the period is still P
    const double P = 3.4;
    auto sc = synthetic(96, [&](double e) {
        double t = 2 * kPi * std::log(e) / P;
        return std::pow(e, 0.4) * std::exp(0.2 * std::sin(t) + 0.8 * std::sin(3 * t + 0.4));
    });
    auto fr = fit_power_law(sc);
    CHECK(std::abs(fr.oscillation_period / P - 1) < 0.02);
}

TEST_CASE("experiments: envelope exponent ignores sharp dips")
{
    // smooth log-periodic factor plus narrow dips once per period
    const double tau = 0.42, P = 1.15;
    auto sc = synthetic(96, [&](double e) {
        double t = std::log(e) / P;
        double ph = t - std::floor(t);
        double dip = std::exp(-std::pow((ph - 0.6) / 0.03, 2));
        return std::pow(e, tau) * std::exp(0.3 * std::cos(2 * kPi * t)) * (1 - 0.97 * dip);
    });
    auto fr = fit_power_law(sc);
    MESSAGE("line " << fr.line_exponent << ", envelope " << fr.exponent);
    CHECK(fr.envelope);
    CHECK(std::abs(fr.exponent / tau - 1) < 0.02);
}

TEST_CASE("experiments: estimator error counts as fit noise")
{
    auto sc = synthetic(40, [](double e) { return std::pow(e, 0.3) * (1 + 1e-4 * std::sin(7 * std::log(e))); });
    for (std::size_t i = 0; i < sc.f_values.size(); ++i) sc.f_errors[i] = 1e-3 * sc.f_values[i];
    auto fr = fit_power_law(sc);
    CHECK(fr.oscillation_amplitude < fr.noise);
    CHECK(fr.noise >= 1e-3);
}

TEST_CASE("experiments: fit needs three usable points")
{
    auto sc = synthetic(5, [](double e) { return e; });
    sc.flagged = {true, true, true, false, false};
    CHECK_THROWS_AS(fit_power_law(sc), ConvergenceError);
}

TEST_CASE("experiments: small Lyapunov scan above E3")
{
    ScanOptions opt;
    opt.n_iter = 200000;
    opt.workers = 4;
    opt.eps_lo = 1e-3;
    opt.eps_hi = 1e-1;
    auto sc = lyapunov_scaling_scan(3, Side::above, 12, opt);
    REQUIRE(sc.f_values.size() == 12);
    for (std::size_t i = 1; i < sc.f_values.size(); ++i) CHECK(sc.f_values[i] > sc.f_values[i - 1]);
    auto fr = fit_power_law(sc);
    CHECK(std::abs(fr.exponent / constants().tau3 - 1) < 0.1);
}

TEST_CASE("experiments: growth slope does not depend on a small base point")
{
    double E3 = constants().E3;
    auto a = growth_slope(E3, 1.0, 7, 3, 0.0);
    auto b = growth_slope(E3, 1.0, 7, 3, 1e-9);
    CHECK(std::abs(a.slope - b.slope) < 1e-5);
    CHECK(a.n.back() == 21);
}

TEST_CASE("experiments: supercritical growth is exponential in q_n")
{
    // log |A^q| = q log lambda + O(1)
    auto g = growth_slope(0.0, 2.0, 6, 3, 0.0);
    std::size_t i = g.n.size() - 1;
    double dq = double(fibonacci(g.n[i])) - double(fibonacci(g.n[i - 1]));
    CHECK(std::abs((g.log_norm[i] - g.log_norm[i - 1]) / dq - std::log(2.0)) < 0.01);
}

TEST_CASE("experiments: jaccard")
{
    std::vector<std::uint8_t> a{255, 0, 255, 0}, b{255, 255, 0, 0}, z(4, 0);
    CHECK(jaccard(a, a) == 1.0);
    CHECK(jaccard(a, b) == doctest::Approx(1.0 / 3));
    CHECK(jaccard(z, z) == 1.0);
    CHECK_THROWS_AS(jaccard(a, std::vector<std::uint8_t>(3)), Error);
}

TEST_CASE("experiments: zero-step magnification is deterministic")
{
    MagnificationOptions opt;
    opt.resolution = 96;
    opt.workers = 1;
    auto f1 = butterfly_magnification(3, 0, opt);
    opt.workers = 4;
    auto f4 = butterfly_magnification(3, 0, opt);
    REQUIRE(f1.size() == 1);
    CHECK(f1[0].pixels == f4[0].pixels);
    CHECK(f1[0].alpha_half == doctest::Approx(opt.alpha_half));
    std::size_t lit = 0;
    for (auto p : f1[0].pixels) lit += p != 0;
    CHECK(lit > 0);
    CHECK(lit < f1[0].pixels.size());
}
