#pragma once

// Chebyshev series on [c - r, c + r] and 2x2 matrices of them.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <sstream>
#include <vector>

#include "hof/errors.hpp"
#include "hof/sl2.hpp"

namespace hof {

inline constexpr int kDefaultDegree = 80;
inline constexpr double kDefaultRadius = 3.0;
inline constexpr int kGridPoints = 65;
inline constexpr double kTailWarn = 1e-6;

template <class T>
struct SeriesT {
    std::vector<T> c;  // c[k] multiplies T_k((x - center)/radius)
    T center = 0;
    T radius = T(kDefaultRadius);
    bool warn = false;  // truncation tail exceeded kTailWarn

    SeriesT() = default;
    SeriesT(int N, T center_, T radius_) : c(N + 1, T(0)), center(center_), radius(radius_) {}

    int degree() const { return int(c.size()) - 1; }

    T to_unit(T x) const
    {
        using std::abs;
        T u = (x - center) / radius;
        if (!(abs(u) <= T(1) + T(1e-12))) {
            std::ostringstream os;
            os << "series: x = " << double(x) << " outside [" << double(center - radius) << ", "
               << double(center + radius) << "]";
            throw DomainError(os.str());
        }
        return u;
    }

    T eval_unit(T u) const
    {
        // Clenshaw
        T b1 = 0, b2 = 0;
        for (int k = degree(); k >= 1; --k) {
            T b0 = 2 * u * b1 - b2 + c[k];
            b2 = b1;
            b1 = b0;
        }
        return u * b1 - b2 + c[0];
    }

    T operator()(T x) const { return eval_unit(to_unit(x)); }

    T tail(int k) const
    {
        using std::abs;
        T s = 0;
        for (int j = k + 1; j <= degree(); ++j) s += abs(c[j]);
        return s;
    }
    T l1() const { return tail(-1); }

    bool same_domain(const SeriesT& o) const
    {
        return degree() == o.degree() && center == o.center && radius == o.radius;
    }
};

using Series = SeriesT<double>;

template <class T>
void require_same_domain(const SeriesT<T>& f, const SeriesT<T>& g, const char* who)
{
    if (!f.same_domain(g)) throw DomainError(std::string(who) + ": series domain/degree mismatch");
}

template <class T>
std::vector<T> cheb_nodes(int N, T center, T radius)
{
    std::vector<T> x(N + 1);
    for (int j = 0; j <= N; ++j)
        x[j] = center + radius * std::cos(std::numbers::pi_v<T> * (T(j) + T(0.5)) / T(N + 1));
    return x;
}

// cos(pi k (j + 1/2)/(N+1)), row k
template <class T>
std::vector<T> cheb_table(int N)
{
    std::vector<T> t((N + 1) * (N + 1));
    for (int k = 0; k <= N; ++k)
        for (int j = 0; j <= N; ++j)
            t[k * (N + 1) + j] = std::cos(std::numbers::pi_v<T> * T(k) * (T(j) + T(0.5)) / T(N + 1));
    return t;
}

// interpolation coefficients from values at cheb_nodes
template <class T>
void cheb_coeffs(const std::vector<T>& table, const T* vals, std::size_t stride, SeriesT<T>& out)
{
    int N = out.degree();
    for (int k = 0; k <= N; ++k) {
        T s = 0;
        const T* row = &table[k * (N + 1)];
        for (int j = 0; j <= N; ++j) s += row[j] * vals[j * stride];
        out.c[k] = s * T(2) / T(N + 1);
    }
    out.c[0] /= 2;
}

template <class T>
SeriesT<T> series_fit(const std::function<T(T)>& f, int N, T center, T radius)
{
    SeriesT<T> s(N, center, radius);
    auto x = cheb_nodes(N, center, radius);
    std::vector<T> v(N + 1);
    for (int j = 0; j <= N; ++j) v[j] = f(x[j]);
    cheb_coeffs(cheb_table<T>(N), v.data(), 1, s);
    return s;
}

template <class T>
SeriesT<T> series_constant(T value, int N, T center, T radius)
{
    SeriesT<T> s(N, center, radius);
    s.c[0] = value;
    return s;
}

template <class T>
SeriesT<T> series_add(const SeriesT<T>& f, const SeriesT<T>& g)
{
    require_same_domain(f, g, "series_add");
    SeriesT<T> h = f;
    for (std::size_t k = 0; k < h.c.size(); ++k) h.c[k] += g.c[k];
    h.warn = f.warn || g.warn;
    return h;
}

template <class T>
SeriesT<T> series_scale(const SeriesT<T>& f, T s)
{
    SeriesT<T> h = f;
    for (auto& v : h.c) v *= s;
    return h;
}

// product truncated to degree N; dropped mass is added to the tail check
template <class T>
SeriesT<T> series_mul(const SeriesT<T>& f, const SeriesT<T>& g, T* dropped = nullptr)
{
    using std::abs;
    require_same_domain(f, g, "series_mul");
    int N = f.degree();
    std::vector<T> full(2 * N + 1, T(0));
    for (int i = 0; i <= N; ++i) {
        if (f.c[i] == T(0)) continue;
        for (int j = 0; j <= N; ++j) {
            T p = f.c[i] * g.c[j] / 2;
            full[i + j] += p;
            full[i > j ? i - j : j - i] += p;
        }
    }
    SeriesT<T> h(N, f.center, f.radius);
    T lost = 0;
    for (int k = 0; k <= 2 * N; ++k) {
        if (k <= N)
            h.c[k] = full[k];
        else
            lost += abs(full[k]);
    }
    if (dropped) *dropped = lost;
    T scale = h.l1();
    h.warn = f.warn || g.warn || (scale > 0 && (h.tail(N - 10) + lost) / scale > T(kTailWarn));
    return h;
}

template <class T>
struct PolyMatT {
    SeriesT<T> m11, m12, m21, m22;
    bool sl2 = true;

    int degree() const { return m11.degree(); }
    T center() const { return m11.center; }
    T radius() const { return m11.radius; }
    bool warn() const { return m11.warn || m12.warn || m21.warn || m22.warn; }

    Mat2T<T> eval_unit(T u) const
    {
        return {m11.eval_unit(u), m12.eval_unit(u), m21.eval_unit(u), m22.eval_unit(u)};
    }
    Mat2T<T> operator()(T x) const { return eval_unit(m11.to_unit(x)); }

    SeriesT<T>& entry(int i, int j) { return i == 0 ? (j == 0 ? m11 : m12) : (j == 0 ? m21 : m22); }
    const SeriesT<T>& entry(int i, int j) const
    {
        return i == 0 ? (j == 0 ? m11 : m12) : (j == 0 ? m21 : m22);
    }
};

using PolyMat = PolyMatT<double>;

template <class T>
PolyMatT<T> polymat_fit(const std::function<Mat2T<T>(T)>& f, int N, T center, T radius, bool sl2 = true)
{
    PolyMatT<T> M{SeriesT<T>(N, center, radius), SeriesT<T>(N, center, radius),
                  SeriesT<T>(N, center, radius), SeriesT<T>(N, center, radius), sl2};
    auto x = cheb_nodes(N, center, radius);
    std::vector<T> v(4 * (N + 1));
    for (int j = 0; j <= N; ++j) {
        Mat2T<T> A = f(x[j]);
        v[4 * j] = A.a11;
        v[4 * j + 1] = A.a12;
        v[4 * j + 2] = A.a21;
        v[4 * j + 3] = A.a22;
    }
    auto table = cheb_table<T>(N);
    cheb_coeffs(table, v.data(), 4, M.m11);
    cheb_coeffs(table, v.data() + 1, 4, M.m12);
    cheb_coeffs(table, v.data() + 2, 4, M.m21);
    cheb_coeffs(table, v.data() + 3, 4, M.m22);
    return M;
}

template <class T>
PolyMatT<T> polymat_constant(const Mat2T<T>& A, int N, T center, T radius)
{
    return {series_constant(A.a11, N, center, radius), series_constant(A.a12, N, center, radius),
            series_constant(A.a21, N, center, radius), series_constant(A.a22, N, center, radius),
            true};
}

// evaluation grid used by all sup-norm checks
template <class T>
std::vector<T> polymat_grid(const PolyMatT<T>& M, int points = kGridPoints)
{
    return cheb_nodes(points - 1, M.center(), M.radius());
}

template <class T>
T polymat_det_defect(const PolyMatT<T>& M)
{
    using std::abs;
    T worst = 0;
    for (T x : polymat_grid(M)) worst = std::max(worst, abs(M(x).det() - T(1)));
    return worst;
}

template <class T>
void require_sl2(const PolyMatT<T>& M, double det_tol, const char* who)
{
    T d = polymat_det_defect(M);
    if (!(d <= T(det_tol))) {
        std::ostringstream os;
        os << who << ": grid det defect " << double(d) << " exceeds " << det_tol;
        throw DeterminantError(os.str());
    }
}

template <class T>
PolyMatT<T> polymat_mul(const PolyMatT<T>& L, const PolyMatT<T>& R)
{
    auto dot = [](const SeriesT<T>& a, const SeriesT<T>& b, const SeriesT<T>& c, const SeriesT<T>& d) {
        return series_add(series_mul(a, b), series_mul(c, d));
    };
    return {dot(L.m11, R.m11, L.m12, R.m21), dot(L.m11, R.m12, L.m12, R.m22),
            dot(L.m21, R.m11, L.m22, R.m21), dot(L.m21, R.m12, L.m22, R.m22), L.sl2 && R.sl2};
}

template <class T>
PolyMatT<T> polymat_inv(const PolyMatT<T>& M, double det_tol = kDetTol)
{
    if (!M.sl2) throw DeterminantError("polymat_inv: matrix is not SL(2)-tagged");
    require_sl2(M, det_tol, "polymat_inv");
    return {M.m22, series_scale(M.m12, T(-1)), series_scale(M.m21, T(-1)), M.m11, true};
}

// C^{-1} M C
template <class T>
PolyMatT<T> polymat_conj(const PolyMatT<T>& M, const Mat2T<T>& C)
{
    T d = C.det();
    Mat2T<T> Ci = adjugate(C) * (T(1) / d);
    auto comb = [&](int i, int j) {
        // sum_kl Ci[i][k] M[k][l] C[l][j]
        T ci[2][2] = {{Ci.a11, Ci.a12}, {Ci.a21, Ci.a22}};
        T cc[2][2] = {{C.a11, C.a12}, {C.a21, C.a22}};
        SeriesT<T> out(M.degree(), M.center(), M.radius());
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) {
                T w = ci[i][k] * cc[l][j];
                if (w == T(0)) continue;
                const auto& s = M.entry(k, l);
                for (std::size_t n = 0; n < out.c.size(); ++n) out.c[n] += w * s.c[n];
            }
        return out;
    };
    return {comb(0, 0), comb(0, 1), comb(1, 0), comb(1, 1), M.sl2};
}

// result(x) = M(a x + b) on the same domain
template <class T>
PolyMatT<T> polymat_rescale(const PolyMatT<T>& M, T a, T b)
{
    using std::abs;
    T c = M.center(), r = M.radius();
    T lo = a * (c - r) + b, hi = a * (c + r) + b;
    T slack = T(1e-12) * (T(1) + abs(c) + r);
    if (std::min(lo, hi) < c - r - slack || std::max(lo, hi) > c + r + slack) {
        std::ostringstream os;
        os << "polymat_rescale: image [" << double(std::min(lo, hi)) << ", " << double(std::max(lo, hi))
           << "] leaves [" << double(c - r) << ", " << double(c + r) << "]";
        throw DomainError(os.str());
    }
    auto f = [&](T x) {
        T y = a * x + b;
        y = std::min(std::max(y, c - r), c + r);
        return M(y);
    };
    return polymat_fit<T>(f, M.degree(), c, r, M.sl2);
}

// largest coefficient difference
template <class T>
T polymat_coeff_dist(const PolyMatT<T>& A, const PolyMatT<T>& B)
{
    using std::abs;
    T d = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const auto& a = A.entry(i, j);
            const auto& b = B.entry(i, j);
            for (std::size_t k = 0; k < a.c.size(); ++k) d = std::max(d, abs(a.c[k] - b.c[k]));
        }
    return d;
}

// max over entries of the coefficient l1 norm; bounds the sup norm of each entry
template <class T>
T polymat_l1(const PolyMatT<T>& A)
{
    T d = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) d = std::max(d, A.entry(i, j).l1());
    return d;
}

template <class T>
T polymat_sup_dist(const PolyMatT<T>& A, const PolyMatT<T>& B)
{
    T d = 0;
    for (T x : polymat_grid(A)) d = std::max(d, (A(x) - B(x)).max_abs());
    return d;
}

}  // namespace hof
