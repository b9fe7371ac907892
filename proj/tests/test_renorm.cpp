#include <doctest.h>

#include <cmath>

#include "hof/amspec.hpp"
#include "hof/arith.hpp"
#include "hof/cocycle.hpp"
#include "hof/renorm.hpp"

using namespace hof;

namespace {

// sup distance on a grid inside both domains
double pair_sup_dist(const Pair& A, const Pair& B)
{
    double d = 0;
    for (int c = 0; c < 2; ++c) {
        const PolyMat& X = c == 0 ? A.F : A.G;
        const PolyMat& Y = c == 0 ? B.F : B.G;
        double lo = std::max(X.center() - X.radius(), Y.center() - Y.radius());
        double hi = std::min(X.center() + X.radius(), Y.center() + Y.radius());
        for (double x : cheb_points(lo, hi, 40)) d = std::max(d, (X(x) - Y(x)).max_abs());
    }
    return d;
}

// one step of R on closed-form maps with a given sigma
std::pair<SkewMap, SkewMap> closed_R(const SkewMap& F, const SkewMap& G, double sigma)
{
    Mat2 M = Mat2::swap() * exp_sigma_s(sigma);
    SkewMap F1 = rescale_x(conjugate(G, M), kAlpha);
    SkewMap G1 = rescale_x(conjugate(compose(F, inverse(G)), M), kAlpha);
    return {F1, G1};
}

}  // namespace

TEST_CASE("renorm: sigma normalization balances a conjugated matrix")
{
    Mat2 Mb{1.3, 0.4, 0.4 + 0.5, 1.3 - 0.5};  // arbitrary
    auto c = s_split(Mb);
    // make it balanced: |pm| = |mp|
    c.mp = c.pm;
    Mat2 B = s_join(c);
    for (double tau : {-0.8, 0.0, 0.3, 1.1}) {
        Mat2 X = exp_sigma_s(tau) * B * exp_sigma_s(-tau);
        auto r = normalize_sigma(X);
        CHECK_FALSE(r.degenerate);
        CHECK(r.sigma == doctest::Approx(tau).epsilon(1e-12));
        auto b = s_split(exp_sigma_s(-r.sigma) * X * exp_sigma_s(r.sigma));
        CHECK(std::abs(std::abs(b.pm) - std::abs(b.mp)) < 1e-12);
    }
    CHECK(normalize_sigma(Mat2::identity()).degenerate);
}

TEST_CASE("renorm: almost Mathieu pairs are reversible and commute")
{
    for (double E : {0.0, 1.0, 2.5}) {
        Pair P = am_pair<double>(E, 1.0);
        CHECK(pair_reversibility_defect(P) < 1e-10);
        CHECK(pair_commutation_defect(P) < 1e-10);
    }
}

TEST_CASE("renorm: R keeps frequencies, reversibility and commutation")
{
    Pair P = am_pair<double>(1.0, 1.0);
    for (int k = 0; k < 4; ++k) {
        auto st = renorm_R(P);
        P = st.P;
        CHECK(P.fF == kOne);
        CHECK(P.fG == kAlphaG);
        CHECK(pair_reversibility_defect(P) < 1e-8);
        CHECK(pair_commutation_defect(P) < 1e-8);
        CHECK(polymat_det_defect(P.F) < 1e-10);
        CHECK(polymat_det_defect(P.G) < 1e-10);
    }
}

TEST_CASE("renorm: palindromic period-3 words agree with R applied three times")
{
    for (double E : {1.0, 2.5975}) {
        Pair P = am_pair<double>(E, 1.0);
        auto pal = renorm_R3_palindromic(P);
        Pair Q = P;
        double s = 0;
        for (int k = 0; k < 3; ++k) {
            auto st = renorm_R(Q);
            Q = st.P;
            s += st.sigma;
        }
        double d = pair_sup_dist(pal.P, Q);
        MESSAGE("E = " << E << ": |R3pal - R^3| = " << d << ", sigma " << pal.sigma << " vs " << s);
        CHECK(d < 1e-5);
    }
}

TEST_CASE("renorm: period-6 step agrees with R applied six times")
{
    Pair P = am_pair<double>(0.0, 1.0);
    auto six = renorm_R6(P);
    Pair Q = P;
    for (int k = 0; k < 6; ++k) Q = renorm_R(Q).P;
    double d = pair_sup_dist(six.P, Q);
    MESSAGE("|R6 - R^6| = " << d);
    CHECK(d < 1e-5);
    // and with two palindromic 3-blocks
    auto b = renorm_R3_palindromic(renorm_R3_palindromic(P).P);
    CHECK(pair_sup_dist(six.P, b.P) < 1e-14);
}

TEST_CASE("renorm: rotation vector transported by -U under R")
{
    // S has det -1 and reverses the projective orientation, so the rotation
    // vector follows -U rather than U
    for (double E : {-2.0, -0.7, 0.3, 1.1, 2.2}) {
        Pair P = am_pair<double>(E, 1.0);
        auto st1 = renorm_R(P);
        auto st2 = renorm_R(st1.P);
        SkewMap F0 = constant_map(1.0, Mat2::identity());
        SkewMap G0 = am_transfer({E, 1.0, kAlpha / 2, kAlpha});
        auto [F1, G1] = closed_R(F0, G0, st1.sigma);
        auto [F2, G2] = closed_R(F1, G1, st2.sigma);
        const long n = 200000;
        RotVec v0{0.0, rotation_number(G0, n).value};
        RotVec v1{rotation_number(F1, n).value, rotation_number(G1, n).value};
        RotVec v2{rotation_number(F2, n).value, rotation_number(G2, n).value};
        RotVec u1 = torus_step(v0);
        RotVec u2 = torus_step(u1);
        CHECK(circle_dist(v1.rho_f, -u1.rho_f) < 1e-3);
        CHECK(circle_dist(v1.rho_g, -u1.rho_g) < 1e-3);
        CHECK(circle_dist(v2.rho_f, u2.rho_f) < 1e-3);
        CHECK(circle_dist(v2.rho_g, u2.rho_g) < 1e-3);
        // closed-form words match the series step
        for (double x : {-0.7, -0.2, 0.3}) CHECK((F1(x) - st1.P.F(x)).max_abs() < 1e-9);
        for (double x : {-0.9, -0.3, 0.2}) CHECK((G1(x) - st1.P.G(x)).max_abs() < 1e-9);
    }
}

TEST_CASE("renorm: reversible coordinates round trip")
{
    Pair P = am_pair<double>(1.7, 1.0);
    P = renorm_R3_palindromic(P).P;
    auto v = to_rev(P);
    CHECK(int(v.size()) == rev_dim<double>(P.degree()));
    Pair Q = from_rev(v, P.degree(), P.radius());
    CHECK(pair_sup_dist(P, Q) < 1e-10);
}

TEST_CASE("renorm: near E3 the period-3 trace stays bounded and sigma approaches c3")
{
    Constants k = constants();
    PipelineOptions opt;
    opt.tune = false;
    opt.E_tabulated = k.E3;
    opt.workers = 4;
    auto run = find_fixed_point<double>(3, opt);
    MESSAGE("sigma = " << double(run.polish.sigma) << ", residual " << double(run.polish.residual));
    CHECK(run.polish.converged);
    CHECK(std::abs(double(run.polish.sigma) - k.c3) < 1e-6);
    CHECK(double(run.polish.comm_defect) < 1e-7);
}

TEST_CASE("renorm: escape direction brackets E3")
{
    CHECK(escape_direction<double>(2.59, 1.0, 3, 10) == -1);
    CHECK(escape_direction<double>(2.61, 1.0, 3, 10) == 1);
    CHECK_THROWS_AS(tune_critical_energy<double>(3, 1.0, 2.61, 2.62), BracketError);
}

TEST_CASE("renorm: subspace iteration on a known spectrum")
{
    // J = Q D Q^T with a known D
    const int n = 30;
    Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Q(i, j) = std::sin(0.3 * (i + 1) * (j + 2)) + (i == j ? 3.0 : 0.0);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) D(i, i) = std::pow(0.7, i) * (i % 2 ? -1 : 1) * 10;
    Eigen::MatrixXd J = Q * D * Q.inverse();
    auto rep = subspace_eigen(J, 5);
    REQUIRE(rep.eigenvalues.size() >= 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(std::abs(rep.eigenvalues[i].real() - D(i, i)) < 1e-8);
        CHECK(std::abs(rep.eigenvalues[i].imag()) < 1e-8);
    }
}
