#pragma once

// Renormalization of reversible SL(2) skew-product pairs over golden-mean
// rotations. Scalar type T is double or long double.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <vector>

#include "hof/amspec.hpp"
#include "hof/golden.hpp"
#include "hof/parallel.hpp"
#include "hof/series.hpp"
#include "hof/sl2.hpp"

namespace hof {

inline constexpr int kRenormDegree = 60;
inline constexpr double kRenormRadius = 1.5;

template <class T>
struct PairT {
    PolyMatT<T> F;  // matrix part B of F, frequency fF
    PolyMatT<T> G;  // matrix part A of G, frequency fG
    Golden fF = kOne;
    Golden fG = kAlphaG;

    int degree() const { return G.degree(); }
    T radius() const { return G.radius(); }
    template <class U>
    PairT<U> cast() const;
};

using Pair = PairT<double>;

// reversible maps with frequency f are expanded around the symmetric point -f/2
template <class T>
T natural_center(Golden f)
{
    return -f.value<T>() / 2;
}

template <class U, class T>
PolyMatT<U> cast_polymat_to(const PolyMatT<T>& M)
{
    auto cs = [](const SeriesT<T>& s) {
        SeriesT<U> o(s.degree(), U(s.center), U(s.radius));
        for (std::size_t k = 0; k < s.c.size(); ++k) o.c[k] = U(s.c[k]);
        o.warn = s.warn;
        return o;
    };
    return {cs(M.m11), cs(M.m12), cs(M.m21), cs(M.m22), M.sl2};
}

template <class T>
template <class U>
PairT<U> PairT<T>::cast() const
{
    PairT<U> P{cast_polymat_to<U>(F), cast_polymat_to<U>(G), fF, fG};
    // recenter exactly in the target precision
    auto fix = [](PolyMatT<U>& M, U c) {
        M.m11.center = M.m12.center = M.m21.center = M.m22.center = c;
    };
    fix(P.F, natural_center<U>(fF));
    fix(P.G, natural_center<U>(fG));
    return P;
}

struct RenormConfig {
    int N = kRenormDegree;
    double radius = kRenormRadius;
};

// F = (1, I), G = (alpha, A) with phase xi = alpha/2
template <class T>
PairT<T> am_pair(T E, T lambda, const RenormConfig& cfg = {})
{
    T r = T(cfg.radius);
    PairT<T> P;
    P.F = polymat_constant<T>(Mat2T<T>::identity(), cfg.N, natural_center<T>(kOne), r);
    P.G = am_polymat<T>(E, lambda, alpha_star<T>() / 2, cfg.N, natural_center<T>(kAlphaG), r);
    return P;
}

// ---- sigma normalization

template <class T>
struct SigmaResult {
    T sigma = 0;
    bool degenerate = false;
};

// conjugation X -> e^{-sS} X e^{sS} scales c_pm by e^{-2s} and c_mp by e^{2s};
// the returned s balances |c_pm| = |c_mp|
template <class T>
SigmaResult<T> normalize_sigma(const Mat2T<T>& raw)
{
    using std::abs;
    using std::log;
    SSplit<T> c = s_split(raw);
    if (abs(c.pm) < T(1e-14) || abs(c.mp) < T(1e-14)) return {T(0), true};
    return {log(abs(c.pm) / abs(c.mp)) / 4, false};
}

// ---- word evaluation helpers

template <class T>
struct RenormStep {
    PairT<T> P;
    T sigma = 0;
    bool degenerate = false;
};

// Conjugates the words by Lambda = (alpha^ell x, S^ell e^{sigma S} y) and
// fits the result on the natural domains of (1, alpha).
template <class T, class WF, class WG>
RenormStep<T> scale_words(int ell, int N, T radius, WF wF, WG wG, std::optional<T> sigma_fixed = {})
{
    T s = std::pow(alpha_star<T>(), ell);
    Mat2T<T> Sl = s_power<T>(ell);
    RenormStep<T> out;
    if (sigma_fixed) {
        out.sigma = *sigma_fixed;
    } else {
        auto sr = normalize_sigma<T>(Sl * wG(T(0)) * Sl);
        out.sigma = sr.sigma;
        out.degenerate = sr.degenerate;
    }
    Mat2T<T> M = Sl * exp_sigma_s<T>(out.sigma);
    Mat2T<T> Mi = exp_sigma_s<T>(-out.sigma) * Sl;
    out.P.fF = kOne;
    out.P.fG = kAlphaG;
    out.P.F = polymat_fit<T>([&](T x) { return Mi * wF(s * x) * M; }, N, natural_center<T>(kOne), radius);
    out.P.G = polymat_fit<T>([&](T x) { return Mi * wG(s * x) * M; }, N, natural_center<T>(kAlphaG), radius);
    return out;
}

template <class T>
void require_standard(const PairT<T>& P, const char* who)
{
    if (!(P.fF == kOne) || !(P.fG == kAlphaG))
        throw DomainError(std::string(who) + ": pair frequencies must be (1, alpha)");
}

// (F, G) -> (G, F G^{-1}); frequencies (b, a) -> (a, b - a), no rescaling.
// The new second component lives on a domain narrowed by the shift.
template <class T>
PairT<T> shift_step(const PairT<T>& P, T radius_loss = T(0.5))
{
    PairT<T> Q;
    Q.fF = P.fG;
    Q.fG = P.fF - P.fG;
    Q.F = P.G;
    T g = P.fG.template value<T>();
    T r = P.G.radius() - radius_loss;
    if (r <= 0) throw DomainError("shift_step: domain exhausted");
    Q.G = polymat_fit<T>([&](T x) { return P.F(x - g) * adjugate(P.G(x - g)); }, P.degree(),
                         natural_center<T>(Q.fG), r);
    return Q;
}

// Conjugates both components by Lambda_ell (direction +1) or its inverse (-1).
// Output domains keep the natural centers; out_radius defaults to the input
// radius (+1) or the input radius times alpha^ell (-1).
template <class T>
PairT<T> scale_pair(const PairT<T>& P, int ell, T sigma, int direction = 1, std::optional<T> out_radius = {})
{
    T s = std::pow(alpha_star<T>(), ell);
    Mat2T<T> Sl = s_power<T>(ell);
    Mat2T<T> M = Sl * exp_sigma_s<T>(sigma);
    Mat2T<T> Mi = exp_sigma_s<T>(-sigma) * Sl;
    PairT<T> Q;
    Q.fF = P.fF;
    Q.fG = P.fG;
    for (int k = 0; k < ell; ++k) {
        if (direction > 0) {
            Q.fF = Q.fF.div_alpha();
            Q.fG = Q.fG.div_alpha();
        } else {
            Q.fF = Q.fF.times_alpha();
            Q.fG = Q.fG.times_alpha();
        }
    }
    auto one = [&](const PolyMatT<T>& C, Golden f) {
        T r = out_radius ? *out_radius : (direction > 0 ? C.radius() : C.radius() * s);
        if (direction > 0)
            return polymat_fit<T>([&](T y) { return Mi * C(s * y) * M; }, C.degree(), natural_center<T>(f), r);
        return polymat_fit<T>([&](T y) { return M * C(y / s) * Mi; }, C.degree(), natural_center<T>(f), r);
    };
    Q.F = one(P.F, Q.fF);
    Q.G = one(P.G, Q.fG);
    return Q;
}

// R(F, G) = (L^{-1} G L, L^{-1} F G^{-1} L), L = Lambda_1
template <class T>
RenormStep<T> renorm_R(const PairT<T>& P)
{
    require_standard(P, "renorm_R");
    const T a = alpha_star<T>();
    auto wF = [&](T y) { return P.G(y); };
    auto wG = [&](T y) { return P.F(y - a) * adjugate(P.G(y - a)); };
    return scale_words<T>(1, P.degree(), P.radius(), wF, wG);
}

// palindromic words G F^{-1} G and G^{-1} F G^{-1} F G^{-1}, scaled by Lambda_3
template <class T>
RenormStep<T> renorm_R3_palindromic(const PairT<T>& P)
{
    require_standard(P, "renorm_R3_palindromic");
    const T a = alpha_star<T>();
    auto A = [&](T y) { return P.G(y); };
    auto B = [&](T y) { return P.F(y); };
    // (G F^{-1} G)(y) = A(y + a - 1) B(y + a - 1)^{-1} A(y)
    auto wF = [&](T y) { return A(y + a - 1) * adjugate(B(y + a - 1)) * A(y); };
    // mat G^{-1}(y) = A(y - a)^{-1}
    auto wG = [&](T y) {
        return adjugate(A(y + 2 - 3 * a)) * B(y + 1 - 2 * a) * adjugate(A(y + 1 - 2 * a)) * B(y - a) *
               adjugate(A(y - a));
    };
    return scale_words<T>(3, P.degree(), P.radius(), wF, wG);
}

// two palindromic 3-blocks; S^3 e^{s S} S^3 e^{s' S} = S^6 e^{(s+s') S}, so this is
// a single Lambda_6 with sigma_6 = s + s'
template <class T>
RenormStep<T> renorm_R6(const PairT<T>& P)
{
    RenormStep<T> a = renorm_R3_palindromic(P);
    RenormStep<T> b = renorm_R3_palindromic(a.P);
    b.sigma += a.sigma;
    b.degenerate = a.degenerate || b.degenerate;
    return b;
}

template <class T>
RenormStep<T> renorm_period(const PairT<T>& P, int ell)
{
    if (ell == 1) return renorm_R(P);
    if (ell == 3) return renorm_R3_palindromic(P);
    if (ell == 6) return renorm_R6(P);
    throw Error("renorm: ell must be 1, 3 or 6");
}

// ---- diagnostics

template <class T>
std::vector<T> cheb_points(T lo, T hi, int n)
{
    std::vector<T> x(n);
    for (int j = 0; j < n; ++j)
        x[j] = (lo + hi) / 2 + (hi - lo) / 2 * std::cos(std::numbers::pi_v<T> * (T(j) + T(0.5)) / T(n));
    return x;
}

// sup over a grid of |mat(F o G) - mat(G o F)|; the grid keeps all shifted
// arguments inside both domains
template <class T>
std::vector<T> pair_commutation_residual(const PairT<T>& P, int points = 16)
{
    T f = P.fF.template value<T>(), g = P.fG.template value<T>();
    T cF = P.F.center(), cG = P.G.center(), rF = P.F.radius(), rG = P.G.radius();
    T lo = std::max({cG - rG, cF - rF - g, cG - rG - f, cF - rF});
    T hi = std::min({cG + rG, cF + rF - g, cG + rG - f, cF + rF});
    std::vector<T> out;
    if (!(hi > lo)) return out;
    T pad = (hi - lo) * T(1e-9);
    for (T x : cheb_points(lo + pad, hi - pad, points)) {
        Mat2T<T> d = P.F(x + g) * P.G(x) - P.G(x + f) * P.F(x);
        out.insert(out.end(), {d.a11, d.a12, d.a21, d.a22});
    }
    return out;
}

// sup over a grid of |mat(F o G) - mat(G o F)|; the grid keeps all shifted
// arguments inside both domains
template <class T>
T pair_commutation_defect(const PairT<T>& P)
{
    T worst = 0;
    for (T d : pair_commutation_residual(P)) worst = std::max(worst, T(std::abs(d)));
    return worst;
}

// G^{-1} = S G S with S(x, y) = (-x, S y), both components
template <class T>
T pair_reversibility_defect(const PairT<T>& P)
{
    Mat2T<T> S = Mat2T<T>::swap();
    T worst = 0;
    auto one = [&](const PolyMatT<T>& C, T f) {
        T h = C.radius() - std::abs(f) / 2;
        if (h <= 0) return;
        for (T x : cheb_points(-h * T(0.999), h * T(0.999), 16)) {
            Mat2T<T> inv = adjugate(C(x - f));
            Mat2T<T> rev = S * C(-x) * S;
            worst = std::max(worst, (inv - rev).max_abs());
        }
    };
    one(P.F, P.fF.template value<T>());
    one(P.G, P.fG.template value<T>());
    return worst;
}

template <class T>
T pair_dist(const PairT<T>& P, const PairT<T>& Q)
{
    return std::max(polymat_coeff_dist(P.F, Q.F), polymat_coeff_dist(P.G, Q.G));
}

template <class T>
T pair_norm(const PairT<T>& P)
{
    return std::max(polymat_l1(P.F), polymat_l1(P.G));
}

// ---- iteration

inline constexpr double kConvTol = 1e-9;
inline constexpr double kBlowupTol = 1e6;

struct RenormRecord {
    int step = 0;
    double sigma = 0;
    double comm_defect = 0;
    double rev_defect = 0;
    double norm_F = 0, norm_G = 0;
    double dist = 0;  // coefficient distance to the previous iterate
    double tr_F0 = 0, tr_G0 = 0;
};

enum class RenormStatus { converged, diverged, exhausted };

template <class T>
struct RenormTrace {
    int ell = 3;
    std::vector<RenormRecord> records;
    RenormStatus status = RenormStatus::exhausted;
    int converged_periods = 0;  // trailing periods with dist < conv_tol
    PairT<T> last;
    std::vector<PairT<T>> iterates;  // filled when keep_iterates
};

struct IterateOptions {
    double conv_tol = kConvTol;
    double blowup_tol = kBlowupTol;
    bool stop_on_converged = false;
    bool keep_iterates = false;
};

template <class T>
RenormTrace<T> iterate_renorm(const PairT<T>& P0, int ell, int k_max, const IterateOptions& opt = {})
{
    RenormTrace<T> tr;
    tr.ell = ell;
    tr.last = P0;
    if (opt.keep_iterates) tr.iterates.push_back(P0);
    PairT<T> P = P0;
    for (int k = 1; k <= k_max; ++k) {
        RenormStep<T> st;
        try {
            st = renorm_period(P, ell);
        } catch (const DomainError&) {
            tr.status = RenormStatus::diverged;
            return tr;
        }
        RenormRecord rec;
        rec.step = k;
        rec.sigma = double(st.sigma);
        rec.norm_F = double(polymat_l1(st.P.F));
        rec.norm_G = double(polymat_l1(st.P.G));
        bool finite = std::isfinite(rec.norm_F) && std::isfinite(rec.norm_G) && std::isfinite(rec.sigma);
        if (finite) {
            rec.dist = double(pair_dist(st.P, P));
            rec.comm_defect = double(pair_commutation_defect(st.P));
            rec.rev_defect = double(pair_reversibility_defect(st.P));
            rec.tr_F0 = double(st.P.F(T(0)).trace());
            rec.tr_G0 = double(st.P.G(T(0)).trace());
        }
        tr.records.push_back(rec);
        if (!finite || rec.norm_F > opt.blowup_tol || rec.norm_G > opt.blowup_tol) {
            tr.status = RenormStatus::diverged;
            return tr;
        }
        P = st.P;
        tr.last = P;
        if (opt.keep_iterates) tr.iterates.push_back(P);
        tr.converged_periods = rec.dist < opt.conv_tol ? tr.converged_periods + 1 : 0;
        if (tr.converged_periods > 0) tr.status = RenormStatus::converged;
        if (opt.stop_on_converged && tr.converged_periods >= 3) return tr;
    }
    if (tr.converged_periods == 0) tr.status = RenormStatus::exhausted;
    return tr;
}

struct SigmaStar {
    double value = 0;
    double error = 0;
};

// last sigma per period, error bar = last change
template <class T>
SigmaStar sigma_star(const RenormTrace<T>& tr, int min_converged = 3)
{
    if (tr.converged_periods < min_converged || tr.records.size() < 2)
        throw ConvergenceError("sigma_star: trace not converged for enough periods");
    const auto& r = tr.records;
    std::size_t n = r.size();
    return {r[n - 1].sigma, std::abs(r[n - 1].sigma - r[n - 2].sigma)};
}

// ---- reversible coordinates
//
// In the eigenbasis of S a reversible fiber X(u), u = x - center, has entries
// p(u), q(u), r(u), s(u) with s(u) = p(-u) and q, r even. The coordinates are the
// Chebyshev coefficients of p (all), q and r (even degrees), for F then G.

template <class T>
using VecT = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <class T>
using MatT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <class T>
int rev_dim(int N)
{
    int ne = N / 2 + 1;
    return 2 * ((N + 1) + 2 * ne);
}

template <class T>
VecT<T> to_rev(const PairT<T>& P)
{
    int N = P.degree();
    VecT<T> v(rev_dim<T>(N));
    int i = 0;
    for (const PolyMatT<T>* C : {&P.F, &P.G}) {
        for (int k = 0; k <= N; ++k) {
            SSplit<T> c = s_split<T>({C->m11.c[k], C->m12.c[k], C->m21.c[k], C->m22.c[k]});
            v[i + k] = c.pp;
        }
        i += N + 1;
        for (int k = 0; k <= N; k += 2) {
            SSplit<T> c = s_split<T>({C->m11.c[k], C->m12.c[k], C->m21.c[k], C->m22.c[k]});
            v[i++] = c.pm;
        }
        for (int k = 0; k <= N; k += 2) {
            SSplit<T> c = s_split<T>({C->m11.c[k], C->m12.c[k], C->m21.c[k], C->m22.c[k]});
            v[i++] = c.mp;
        }
    }
    return v;
}

template <class T>
PairT<T> from_rev(const VecT<T>& v, int N, T radius)
{
    PairT<T> P;
    int i = 0;
    for (PolyMatT<T>* C : {&P.F, &P.G}) {
        Golden f = (C == &P.F) ? kOne : kAlphaG;
        T c0 = natural_center<T>(f);
        *C = {SeriesT<T>(N, c0, radius), SeriesT<T>(N, c0, radius), SeriesT<T>(N, c0, radius),
              SeriesT<T>(N, c0, radius), true};
        std::vector<T> p(N + 1), q(N + 1, T(0)), r(N + 1, T(0));
        for (int k = 0; k <= N; ++k) p[k] = v[i + k];
        i += N + 1;
        for (int k = 0; k <= N; k += 2) q[k] = v[i++];
        for (int k = 0; k <= N; k += 2) r[k] = v[i++];
        for (int k = 0; k <= N; ++k) {
            T s = (k % 2 == 0) ? p[k] : -p[k];
            Mat2T<T> M = s_join<T>({p[k], q[k], r[k], s});
            C->m11.c[k] = M.a11;
            C->m12.c[k] = M.a12;
            C->m21.c[k] = M.a21;
            C->m22.c[k] = M.a22;
        }
    }
    return P;
}

// X -> X / sqrt(det X) pointwise; removes the det-changing directions
template <class T>
PairT<T> det_normalize(const PairT<T>& P)
{
    PairT<T> Q = P;
    auto one = [](const PolyMatT<T>& C) {
        return polymat_fit<T>(
            [&](T x) {
                Mat2T<T> X = C(x);
                T d = X.det();
                if (!(d > 0)) throw DeterminantError("det_normalize: nonpositive determinant");
                return X * (T(1) / std::sqrt(d));
            },
            C.degree(), C.center(), C.radius());
    };
    Q.F = one(P.F);
    Q.G = one(P.G);
    return Q;
}

template <class T>
struct RevMap {
    int ell = 3;
    int N = kRenormDegree;
    T radius = T(kRenormRadius);

    // Phi(v) = coordinates of R_ell(normalize(v)); also returns sigma
    VecT<T> operator()(const VecT<T>& v, T* sigma = nullptr) const
    {
        RenormStep<T> st = renorm_period(det_normalize(from_rev(v, N, radius)), ell);
        if (sigma) *sigma = st.sigma;
        return to_rev(st.P);
    }
};

inline constexpr double kFdStep = 1e-6;

// central differences along coordinate directions, columns in parallel
template <class T>
MatT<T> fd_jacobian(const RevMap<T>& Phi, const VecT<T>& v, int workers, double step = kFdStep)
{
    int n = int(v.size());
    MatT<T> J(n, n);
    parallel_for(std::size_t(n), workers, [&](std::size_t j) {
        T h = T(step) * (T(1) + std::abs(v[j]));
        VecT<T> vp = v, vm = v;
        vp[j] += h;
        vm[j] -= h;
        J.col(j) = (Phi(vp) - Phi(vm)) / (2 * h);
    });
    return J;
}

struct PolishOptions {
    int max_iter = 12;   // chord steps per Jacobian
    int max_outer = 6;   // Jacobian refreshes
    double tol = 1e-11;
    double comm_tol = 1e-7;
    int workers = 1;
    // modes with |mu - 1| below this are held fixed (neutral directions)
    double neutral_gap = 0.3;
};

template <class T>
struct PolishResult {
    PairT<T> P;
    T residual = 0;
    T sigma = 0;
    T comm_defect = 0;
    int jacobians = 0;
    bool converged = false;
    std::vector<double> residual_history;
};

// Newton steps solved in the eigenbasis of a frozen Jacobian; neutral modes
// (mu ~ 1) are not moved
struct ModalSolver {
    Eigen::VectorXcd mu;
    Eigen::MatrixXcd V;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
    std::vector<bool> neutral;
    int neutral_index = -1;  // closest to 1 among the neutral modes

    ModalSolver(const Eigen::MatrixXd& J, double gap)
    {
        Eigen::EigenSolver<Eigen::MatrixXd> es(J);
        mu = es.eigenvalues();
        V = es.eigenvectors();
        lu.compute(V);
        neutral.assign(mu.size(), false);
        double best = gap;
        for (int i = 0; i < mu.size(); ++i) {
            double d = std::abs(mu[i] - 1.0);
            if (d < gap) neutral[i] = true;
            if (d < best) {
                best = d;
                neutral_index = i;
            }
        }
    }

    template <class T>
    VecT<T> step(const VecT<T>& r) const
    {
        Eigen::VectorXcd c = lu.solve(r.template cast<double>().template cast<std::complex<double>>());
        for (int i = 0; i < mu.size(); ++i) c[i] = neutral[i] ? 0.0 : c[i] / (mu[i] - 1.0);
        return (V * c).real().template cast<T>();
    }

    Eigen::VectorXd neutral_vector() const
    {
        Eigen::VectorXd n = V.col(neutral_index).real();
        return n / n.cwiseAbs().maxCoeff();
    }
};

// Fixed point of R_ell near P0. Commuting pairs form an invariant set that
// meets a one-parameter family of reversible fixed points transversally
// (the neutral mode); after each Newton solve the iterate is moved along that
// family to zero the commutation residual in the least-squares sense.
template <class T>
PolishResult<T> polish_fixed_point(const PairT<T>& P0, int ell, const PolishOptions& opt = {})
{
    const int N = P0.degree();
    const T r0 = P0.radius();
    RevMap<T> Phi{ell, N, r0};
    VecT<T> v = to_rev(det_normalize(P0));
    PolishResult<T> res;

    auto comm_vec = [&](const VecT<T>& u) {
        auto c = pair_commutation_residual(det_normalize(from_rev(u, N, r0)));
        return Eigen::Map<VecT<T>>(c.data(), Eigen::Index(c.size())).eval();
    };
    // chord iteration; returns the final residual
    auto chord = [&](VecT<T>& u, const ModalSolver& ms, bool record) {
        T rn = 0;
        for (int it = 0; it <= opt.max_iter; ++it) {
            T sig = 0;
            VecT<T> r = Phi(u, &sig) - u;
            rn = r.cwiseAbs().maxCoeff();
            if (record) {
                res.residual_history.push_back(double(rn));
                res.sigma = sig;
            }
            if (!(rn == rn) || rn < T(opt.tol) || it == opt.max_iter) break;
            u -= ms.step(r);
        }
        return rn;
    };

    for (int outer = 0; outer < opt.max_outer; ++outer) {
        MatT<T> J = fd_jacobian(Phi, v, opt.workers);
        ++res.jacobians;
        ModalSolver ms(J.template cast<double>(), opt.neutral_gap);
        res.residual = chord(v, ms, true);
        if (!(res.residual == res.residual)) break;
        if (ms.neutral_index >= 0) {
            VecT<T> nv = ms.neutral_vector().template cast<T>();
            VecT<T> c0 = comm_vec(v);
            const T h = T(1e-3);
            VecT<T> u = v + h * nv;
            chord(u, ms, false);
            VecT<T> c1 = (comm_vec(u) - c0) / h;
            T den = c1.squaredNorm();
            if (den > 0) {
                v += (-c0.dot(c1) / den) * nv;
                res.residual = chord(v, ms, true);
            }
        }
        res.comm_defect = comm_vec(v).cwiseAbs().maxCoeff();
        if (res.residual < T(opt.tol) && res.comm_defect < T(opt.comm_tol)) {
            res.converged = true;
            break;
        }
    }
    res.P = det_normalize(from_rev(v, N, r0));
    return res;
}

// ---- eigen-analysis

struct EigenReport {
    std::vector<std::complex<double>> eigenvalues;  // by decreasing modulus
    std::vector<double> residuals;
    int iterations = 0;
};

// orthogonal subspace iteration with Rayleigh-Ritz extraction
EigenReport subspace_eigen(const Eigen::MatrixXd& J, int n_modes, int guard = 12, int max_iter = 2000,
                           double tol = 1e-11);

template <class T>
EigenReport jacobian_spectrum(const PairT<T>& P_star, int ell, int n_modes, int workers = 1,
                              Eigen::MatrixXd* jac_out = nullptr)
{
    // R_3^{ell/3}
    RevMap<T> Phi{ell, P_star.degree(), P_star.radius()};
    VecT<T> v = to_rev(det_normalize(P_star));
    MatT<T> J = fd_jacobian(Phi, v, workers);
    Eigen::MatrixXd Jd = J.template cast<double>();
    if (jac_out) *jac_out = Jd;
    return subspace_eigen(Jd, n_modes);
}

// ---- stable-manifold tuning

// +1 if the iterates leave the window around their early traces upward
// (E above the critical value), -1 if downward, 0 if still inside after k_max
template <class T>
int escape_direction(T E, T lambda, int ell, int k_max, const RenormConfig& cfg = {})
{
    PairT<T> P = am_pair<T>(E, lambda, cfg);
    std::vector<double> t;
    for (int k = 1; k <= k_max; ++k) {
        RenormStep<T> st;
        try {
            st = renorm_period(P, ell);
        } catch (const DomainError&) {
            break;
        }
        P = st.P;
        double tg = double(P.G(T(0)).trace());
        if (!std::isfinite(tg)) break;
        t.push_back(tg);
        if (t.size() >= 2) {
            double m = 0.5 * (t[0] + t[1]);
            double w = std::max(1.0, 0.4 * std::abs(m));
            if (tg > m + w) return 1;
            if (tg < m - w) return -1;
        }
    }
    return 0;
}

struct TuneResult {
    double E = 0;
    double bracket = 0;
    int steps = 0;
};

// bisection of the escape direction; brackets must straddle the critical energy
template <class T>
TuneResult tune_critical_energy(int ell, T lambda, T lo, T hi, double tol = 1e-12, int k_max = 10,
                                const RenormConfig& cfg = {})
{
    int dlo = escape_direction<T>(lo, lambda, ell, k_max, cfg);
    int dhi = escape_direction<T>(hi, lambda, ell, k_max, cfg);
    if (dlo != -1 || dhi != 1) {
        std::ostringstream os;
        os << "tune_critical_energy: bracket [" << double(lo) << ", " << double(hi)
           << "] does not straddle (escape " << dlo << ", " << dhi << ")";
        throw BracketError(os.str());
    }
    TuneResult res;
    while (double(hi - lo) > tol) {
        T mid = (lo + hi) / 2;
        if (mid == lo || mid == hi) break;
        int d = escape_direction<T>(mid, lambda, ell, k_max, cfg);
        if (d == 0) {
            // still inside the window after k_max periods: as close as we can resolve
            lo = hi = mid;
            break;
        }
        if (d > 0)
            hi = mid;
        else
            lo = mid;
        ++res.steps;
    }
    res.E = double((lo + hi) / 2);
    res.bracket = double(hi - lo);
    return res;
}

// ---- fixed-point pipeline

template <class T>
struct FixedPointRun {
    int ell = 3;
    double E = 0;
    TuneResult tune;
    RenormTrace<T> approach;  // plain iteration from the AM pair at E
    PolishResult<T> polish;
};

struct PipelineOptions {
    RenormConfig cfg;
    int workers = 1;
    bool tune = true;           // ell = 3: bisection for E; otherwise the tabulated value
    double E_tabulated = 0;     // used when tune is false (ell = 3)
    double tune_tol = 1e-12;
    int approach_periods = -1;  // default 6 (ell = 3) or 5 (ell = 6)
};

// Tunes E (ell = 3; E = 0 for ell = 6 by the E -> -E symmetry), iterates
// toward the fixed point while roundoff growth along mu1 stays small, then
// polishes with Newton.
template <class T>
FixedPointRun<T> find_fixed_point(int ell, const PipelineOptions& opt = {})
{
    if (ell != 3 && ell != 6) throw Error("find_fixed_point: ell must be 3 or 6");
    FixedPointRun<T> run;
    run.ell = ell;
    if (ell == 3) {
        if (opt.tune) {
            run.tune = tune_critical_energy<T>(3, T(1), T(2.59), T(2.61), opt.tune_tol, 10, opt.cfg);
            run.E = run.tune.E;
        } else {
            run.E = opt.E_tabulated;
        }
    }
    int k = opt.approach_periods > 0 ? opt.approach_periods : (ell == 3 ? 6 : 5);
    run.approach = iterate_renorm(am_pair<T>(T(run.E), T(1), opt.cfg), ell, k);
    PolishOptions po;
    po.workers = opt.workers;
    if (ell == 6) {
        // the neutral family limits the attainable residual
        po.tol = 1e-6;
        po.comm_tol = 1e-6;
    } else if (sizeof(T) > sizeof(double)) {
        po.tol = 1e-17;
    }
    run.polish = polish_fixed_point(run.approach.last, ell, po);
    return run;
}

// ---- unstable multiplier

struct MultiplierResult {
    double mu = 0;
    double spread = 0;  // max relative deviation among the ratios used
    std::vector<double> ratios;
    bool nonlinear_warning = false;
};

// Per-period amplification of the distance between the iterates of
// P(E_c + dE) and P(E_c). Ratios are taken while the distance stays in the
// linear window [lin_lo, lin_hi].
template <class T>
MultiplierResult unstable_multiplier_trajectory(T E_c, T lambda, int ell, T dE, int k_max, double lin_lo = 1e-9,
                                                double lin_hi = 1e-3, const RenormConfig& cfg = {})
{
    PairT<T> P0 = am_pair<T>(E_c, lambda, cfg), P1 = am_pair<T>(E_c + dE, lambda, cfg);
    std::vector<double> d;
    for (int k = 1; k <= k_max; ++k) {
        try {
            P0 = renorm_period(P0, ell).P;
            P1 = renorm_period(P1, ell).P;
        } catch (const DomainError&) {
            break;
        }
        double dk = double((to_rev(P1) - to_rev(P0)).cwiseAbs().maxCoeff());
        if (!std::isfinite(dk)) break;
        d.push_back(dk);
    }
    MultiplierResult res;
    for (std::size_t k = 1; k < d.size(); ++k)
        if (d[k - 1] > lin_lo && d[k] < lin_hi) res.ratios.push_back(d[k] / d[k - 1]);
    if (res.ratios.empty()) throw ConvergenceError("unstable_multiplier: no periods in the linear window");
    res.mu = res.ratios.back();
    for (double r : res.ratios) res.spread = std::max(res.spread, std::abs(r / res.mu - 1));
    std::size_t n = res.ratios.size();
    if (n >= 2 && std::abs(res.ratios[n - 1] / res.ratios[n - 2] - 1) > 0.05) res.nonlinear_warning = true;
    return res;
}

// Per-period amplification of the energy perturbation E_c -+ dE, carried
// around the fixed point: central differences of R_ell at P_star along the
// current direction, renormalized every period. Converges like (mu2/mu1)^k.
template <class T>
MultiplierResult unstable_multiplier(const PairT<T>& P_star, T E_c, T lambda, int ell, T dE, int periods = 8,
                                     double eps = 1e-7)
{
    RenormConfig cfg{P_star.degree(), double(P_star.radius())};
    RevMap<T> Phi{ell, P_star.degree(), P_star.radius()};
    VecT<T> vs = to_rev(det_normalize(P_star));
    VecT<T> u = to_rev(am_pair<T>(E_c + dE, lambda, cfg)) - to_rev(am_pair<T>(E_c - dE, lambda, cfg));
    MultiplierResult res;
    for (int k = 0; k < periods; ++k) {
        T nu = u.cwiseAbs().maxCoeff();
        if (!(nu > 0)) throw ConvergenceError("unstable_multiplier: degenerate perturbation");
        u /= nu;
        VecT<T> w = (Phi(vs + T(eps) * u) - Phi(vs - T(eps) * u)) / T(2 * eps);
        double ratio = double(w.cwiseAbs().maxCoeff());
        if (w.dot(u) < 0) ratio = -ratio;
        res.ratios.push_back(ratio);
        u = w;
    }
    res.mu = res.ratios.back();
    std::size_t n = res.ratios.size();
    for (std::size_t k = n >= 3 ? n - 3 : 0; k < n; ++k)
        res.spread = std::max(res.spread, std::abs(res.ratios[k] / res.mu - 1));
    if (n >= 2 && std::abs(res.ratios[n - 1] / res.ratios[n - 2] - 1) > 0.05) res.nonlinear_warning = true;
    return res;
}

}  // namespace hof
