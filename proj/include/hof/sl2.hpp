#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hof/errors.hpp"

namespace hof {

template <class T>
struct Mat2T {
    T a11 = 1, a12 = 0, a21 = 0, a22 = 1;

    static Mat2T identity() { return {}; }
    static Mat2T swap() { return {0, 1, 1, 0}; }  // S

    T det() const { return a11 * a22 - a12 * a21; }
    T trace() const { return a11 + a22; }

    // largest singular value
    T norm() const
    {
        // scaled so f*f cannot overflow for large entries
        T m = max_abs();
        if (!(m > 0)) return T(0);
        T b11 = a11 / m, b12 = a12 / m, b21 = a21 / m, b22 = a22 / m;
        T f = b11 * b11 + b12 * b12 + b21 * b21 + b22 * b22;
        T d = b11 * b22 - b12 * b21;
        T disc = std::max(T(0), f * f - 4 * d * d);
        return m * std::sqrt((f + std::sqrt(disc)) / 2);
    }
    T max_abs() const
    {
        using std::abs;
        return std::max({abs(a11), abs(a12), abs(a21), abs(a22)});
    }
    bool finite() const
    {
        using std::isfinite;
        return isfinite(a11) && isfinite(a12) && isfinite(a21) && isfinite(a22);
    }

    Mat2T operator+(const Mat2T& o) const { return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22}; }
    Mat2T operator-(const Mat2T& o) const { return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22}; }
    Mat2T operator*(T s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }

    template <class U>
    Mat2T<U> cast() const { return {U(a11), U(a12), U(a21), U(a22)}; }
};

using Mat2 = Mat2T<double>;

template <class T>
Mat2T<T> mat_mul(const Mat2T<T>& L, const Mat2T<T>& R)
{
    return {L.a11 * R.a11 + L.a12 * R.a21, L.a11 * R.a12 + L.a12 * R.a22,
            L.a21 * R.a11 + L.a22 * R.a21, L.a21 * R.a12 + L.a22 * R.a22};
}

template <class T>
Mat2T<T> operator*(const Mat2T<T>& L, const Mat2T<T>& R) { return mat_mul(L, R); }

template <class T>
Mat2T<T> adjugate(const Mat2T<T>& M) { return {M.a22, -M.a12, -M.a21, M.a11}; }

inline constexpr double kDetTol = 1e-8;

template <class T>
Mat2T<T> inv_sl2(const Mat2T<T>& M, double det_tol = kDetTol)
{
    using std::abs;
    T d = M.det();
    if (!(abs(d - T(1)) <= T(det_tol))) {
        std::ostringstream os;
        os << "inv_sl2: det = " << double(d) << " violates |det-1| <= " << det_tol;
        throw DeterminantError(os.str());
    }
    return adjugate(M);
}

template <class T>
Mat2T<T> exp_sigma_s(T sigma)
{
    using std::cosh;
    using std::sinh;
    T c = cosh(sigma), s = sinh(sigma);
    return {c, s, s, c};
}

// S^k is I or S
template <class T>
Mat2T<T> s_power(int k) { return (k % 2 == 0) ? Mat2T<T>::identity() : Mat2T<T>::swap(); }

// components in the eigenbasis e+ = (1,1)/sqrt2, e- = (1,-1)/sqrt2 of S
template <class T>
struct SSplit {
    T pp, pm, mp, mm;
};

template <class T>
SSplit<T> s_split(const Mat2T<T>& M)
{
    return {(M.a11 + M.a12 + M.a21 + M.a22) / 2, (M.a11 - M.a12 + M.a21 - M.a22) / 2,
            (M.a11 + M.a12 - M.a21 - M.a22) / 2, (M.a11 - M.a12 - M.a21 + M.a22) / 2};
}

template <class T>
Mat2T<T> s_join(const SSplit<T>& c)
{
    return {(c.pp + c.pm + c.mp + c.mm) / 2, (c.pp - c.pm + c.mp - c.mm) / 2,
            (c.pp + c.pm - c.mp - c.mm) / 2, (c.pp - c.pm - c.mp + c.mm) / 2};
}

}  // namespace hof
