#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hof/amspec.hpp"
#include "hof/series.hpp"
#include "hof/sl2.hpp"

using namespace hof;

namespace {

Mat2 rot(double t) { return {std::cos(t), -std::sin(t), std::sin(t), std::cos(t)}; }

double max_diff(const Mat2& A, const Mat2& B) { return (A - B).max_abs(); }

}  // namespace

TEST_CASE("sl2: inverse of an SL(2) matrix")
{
    Mat2 M{2, 3, 1, 2};
    CHECK(M.det() == doctest::Approx(1));
    Mat2 P = M * inv_sl2(M);
    CHECK(max_diff(P, Mat2::identity()) < 1e-15);
}

TEST_CASE("sl2: inverse refuses det != 1")
{
    Mat2 M{2, 0, 0, 1};
    CHECK_THROWS_AS(inv_sl2(M), DeterminantError);
}

TEST_CASE("sl2: operator norm equals the largest singular value")
{
    // diag(3, 1/3) rotated on both sides
    Mat2 D{3, 0, 0, 1.0 / 3};
    Mat2 M = rot(0.3) * D * rot(-1.1);
    CHECK(M.norm() == doctest::Approx(3).epsilon(1e-14));
}

TEST_CASE("sl2: S eigen-split round trip and exp(sigma S)")
{
    Mat2 M{0.3, -1.2, 2.5, 0.7};
    auto c = s_split(M);
    CHECK(max_diff(s_join(c), M) < 1e-15);
    // S acts as +1 on e+ and -1 on e-
    auto cs = s_split(Mat2::swap());
    CHECK(cs.pp == doctest::Approx(1));
    CHECK(cs.mm == doctest::Approx(-1));
    CHECK(std::abs(cs.pm) < 1e-16);
    // exp(aS) exp(bS) = exp((a+b)S), det 1
    Mat2 E = exp_sigma_s(0.4) * exp_sigma_s(-1.1);
    CHECK(max_diff(E, exp_sigma_s(-0.7)) < 1e-15);
    CHECK(exp_sigma_s(2.0).det() == doctest::Approx(1).epsilon(1e-14));
}

TEST_CASE("series: fit reproduces an entire function")
{
    auto f = [](double x) { return std::cos(3 * x) * std::exp(0.5 * x); };
    auto s = series_fit<double>(f, 60, 0.25, 2.0);
    for (double x : {-1.75, -1.0, 0.0, 0.3, 1.9, 2.25})
        CHECK(std::abs(s(x) - f(x)) < 1e-13);
    CHECK_FALSE(s.warn);
}

TEST_CASE("series: product matches the pointwise product")
{
    auto f = series_fit<double>([](double x) { return std::sin(x); }, 50, 0.0, 2.0);
    auto g = series_fit<double>([](double x) { return 1 + x * x; }, 50, 0.0, 2.0);
    auto h = series_mul(f, g);
    for (double x = -2; x <= 2; x += 0.37) CHECK(std::abs(h(x) - std::sin(x) * (1 + x * x)) < 1e-13);
}

TEST_CASE("series: mismatched domains are rejected")
{
    auto f = series_constant<double>(1.0, 10, 0.0, 1.0);
    auto g = series_constant<double>(1.0, 10, 0.5, 1.0);
    CHECK_THROWS_AS(series_add(f, g), DomainError);
}

TEST_CASE("polymat: determinant preserved by multiplication")
{
    // products of AM transfer matrices stay in SL(2)
    auto A = am_polymat<double>(0.7, 1.0, 0.1, 60, 0.0, 1.0);
    auto B = am_polymat<double>(-1.3, 1.0, 0.35, 60, 0.0, 1.0);
    auto C = polymat_mul(polymat_mul(A, B), A);
    CHECK(polymat_det_defect(C) < 1e-11);
    auto Ci = polymat_inv(C);
    auto I = polymat_mul(C, Ci);
    for (double x : polymat_grid(I)) CHECK(max_diff(I(x), Mat2::identity()) < 1e-10);
}

TEST_CASE("polymat: evaluation is a homomorphism")
{
    auto A = am_polymat<double>(2.1, 1.0, 0.0, 60, 0.0, 1.0);
    auto B = am_polymat<double>(0.4, 2.0, 0.2, 60, 0.0, 1.0);
    auto AB = polymat_mul(A, B);
    for (double x = -1; x <= 1; x += 0.125) {
        Mat2 direct = am_matrix<double>(2.1, 1.0, 0.0, x) * am_matrix<double>(0.4, 2.0, 0.2, x);
        CHECK(max_diff(AB(x), direct) < 1e-11);
    }
    // conjugation commutes with evaluation
    Mat2 C{1.5, 0.2, -0.4, 0.6};
    auto K = polymat_conj(A, C);
    Mat2 Ci = adjugate(C) * (1.0 / C.det());
    for (double x : {-0.9, 0.0, 0.55}) CHECK(max_diff(K(x), Ci * A(x) * C) < 1e-12);
}

TEST_CASE("polymat: rescale stays inside the domain or throws")
{
    auto A = am_polymat<double>(1.0, 1.0, 0.0, 60, 0.0, 2.0);
    auto H = polymat_rescale(A, 0.5, 0.3);
    for (double x : {-2.0, -0.4, 1.7}) CHECK(max_diff(H(x), A(0.5 * x + 0.3)) < 1e-12);
    CHECK_THROWS_AS(polymat_rescale(A, 1.0, 0.5), DomainError);
    CHECK_THROWS_AS(polymat_rescale(A, 2.0, 0.0), DomainError);
}

TEST_CASE("polymat: inverse needs an SL(2) matrix")
{
    auto A = polymat_constant<double>(Mat2{2, 0, 0, 1}, 8, 0.0, 1.0);
    CHECK_THROWS_AS(polymat_inv(A), DeterminantError);
}
