#include "hof/amspec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "hof/parallel.hpp"

namespace hof {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

struct Potential {
    std::vector<double> V;
};

Potential potential(int p, int q, double lambda, double theta)
{
    Potential P;
    P.V.resize(q);
    for (int n = 0; n < q; ++n) {
        // n p / q reduced mod 1 exactly before the cosine
        long long np = (long long)n * p % q;
        P.V[n] = 2 * lambda * std::cos(kTwoPi * (double(np) / q + theta));
    }
    return P;
}

double disc(const Potential& P, double E)
{
    // (u_{n+1}, u_n) = A_n (u_n, u_{n-1}), tracked on the two basis columns
    double a11 = 1, a12 = 0, a21 = 0, a22 = 1;
    for (double v : P.V) {
        double t = E - v;
        double b11 = t * a11 - a21, b12 = t * a12 - a22;
        a21 = a11;
        a22 = a12;
        a11 = b11;
        a12 = b12;
    }
    return a11 + a22;
}

// number of Dirichlet eigenvalues (sites 1..q-1) below E
int sturm_count(const Potential& P, double E)
{
    int count = 0;
    double d = 1;
    for (std::size_t n = 1; n < P.V.size(); ++n) {
        double off = (n == 1) ? 0.0 : 1.0 / d;
        d = P.V[n] - E - off;
        if (d == 0) d = -1e-300;
        if (d < 0) ++count;
    }
    return count;
}

struct Enclosure {
    double lo, hi;
};

Enclosure enclosure(double lambda) { return {-2 - 2 * std::abs(lambda) - 1, 2 + 2 * std::abs(lambda) + 1}; }

// j-th Dirichlet eigenvalue, j = 1..q-1
double dirichlet_eig(const Potential& P, int j, Enclosure enc)
{
    double lo = enc.lo, hi = enc.hi;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1 + std::abs(lo)); ++it) {
        double mid = 0.5 * (lo + hi);
        if (sturm_count(P, mid) >= j)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

// boundary of a predicate that is true at a and false at b
template <class Pred>
double bisect(double a, double b, Pred pred)
{
    for (int it = 0; it < 200 && std::abs(b - a) > 1e-15 * (1 + std::abs(a)); ++it) {
        double mid = 0.5 * (a + b);
        if (pred(mid))
            a = mid;
        else
            b = mid;
    }
    return 0.5 * (a + b);
}

// edges of band j (0-based) for a fixed phase
struct EdgePair {
    double lo, hi;
};

EdgePair band_edges(const Potential& P, int q, int j, Enclosure enc)
{
    double mlo = (j == 0) ? enc.lo : dirichlet_eig(P, j, enc);
    double mhi = (j == q - 1) ? enc.hi : dirichlet_eig(P, j + 1, enc);
    double s = disc(P, mlo) >= 0 ? 1.0 : -1.0;
    double lo = bisect(mlo, mhi, [&](double E) { return s * disc(P, E) >= 2; });
    double hi = bisect(mhi, mlo, [&](double E) { return -s * disc(P, E) >= 2; });
    if (hi < lo) hi = lo = 0.5 * (lo + hi);
    return {lo, hi};
}

// all 2q Bloch edges at phase theta: eigenvalues of the periodic and
// antiperiodic q x q matrices, ascending; band j is [e[2j], e[2j+1]].
// Symmetric eigensolvers resolve touching bands to roundoff, where the
// discriminant only gives sqrt(eps).
std::vector<double> bloch_edges(const Potential& P)
{
    const int q = int(P.V.size());
    std::vector<double> e;
    if (q == 1) return {P.V[0] - 2, P.V[0] + 2};
    for (double corner : {1.0, -1.0}) {
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(q, q);
        for (int n = 0; n < q; ++n) H(n, n) = P.V[n];
        for (int n = 0; n + 1 < q; ++n) H(n, n + 1) = H(n + 1, n) = 1;
        H(0, q - 1) += corner;
        H(q - 1, 0) += corner;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
        for (int n = 0; n < q; ++n) e.push_back(es.eigenvalues()[n]);
    }
    std::sort(e.begin(), e.end());
    return e;
}

constexpr int kDenseMax = 160;

BandSet band_set(int p, int q, double lambda, const std::vector<int>& which)
{
    if (q < 1 || p < 0 || (q > 1 && p >= q) || std::gcd(p, q) != 1) {
        std::ostringstream os;
        os << "bands_rational: need gcd(p,q)=1 and 0 <= p < q, got " << p << "/" << q;
        throw BracketError(os.str());
    }
    Enclosure enc = enclosure(lambda);
    BandSet bs;
    bs.p = p;
    bs.q = q;
    bs.lambda = lambda;
    // Delta(E, theta) = D(E) - 2 lambda^q cos(2 pi q theta): over all phases the
    // edges are attained at theta = 0 or 1/(2q)
    const double phases[2] = {0.0, 0.5 / q};
    std::vector<double> dense[2];
    if (q <= kDenseMax)
        for (int k = 0; k < 2; ++k) dense[k] = bloch_edges(potential(p, q, lambda, phases[k]));
    for (int j : which) {
        double lo = INFINITY, hi = -INFINITY;
        for (int k = 0; k < 2; ++k) {
            EdgePair e;
            if (q <= kDenseMax)
                e = {dense[k][2 * j], dense[k][2 * j + 1]};
            else
                e = band_edges(potential(p, q, lambda, phases[k]), q, j, enc);
            lo = std::min(lo, e.lo);
            hi = std::max(hi, e.hi);
        }
        if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
            std::ostringstream os;
            os << "bands_rational: bracketing failed for band " << j << " of " << p << "/" << q << " in ["
               << lo << ", " << hi << "]";
            throw BracketError(os.str());
        }
        bs.bands.push_back({j, lo, hi});
    }
    for (std::size_t i = 0; i < bs.bands.size(); ++i) {
        int r = bs.bands[i].index + 1;
        bs.labels.push_back(r < q ? gap_label(p, q, r) : 0);
    }
    return bs;
}

}  // namespace

SkewMap am_transfer(const AMParams& p)
{
    SkewMap G;
    G.freq = p.alpha;
    double E = p.E, lam = p.lambda, xi = p.xi;
    G.fiber = [E, lam, xi](double x) { return am_matrix<double>(E, lam, xi, x); };
    // polar angle atan2(2, E - V) stays in (0, pi)
    G.principal_lift = true;
    return G;
}

double BandSet::measure() const
{
    // union length; touching bands share a single point
    double m = 0;
    for (const auto& b : bands) m += b.hi - b.lo;
    return m;
}

double discriminant(int p, int q, double lambda, double theta, double E)
{
    return disc(potential(p, q, lambda, theta), E);
}

BandSet bands_rational(int p, int q, double lambda)
{
    std::vector<int> all(q);
    std::iota(all.begin(), all.end(), 0);
    return band_set(p, q, lambda, all);
}

BandSet bands_rational_window(int p, int q, double lambda, double Elo, double Ehi)
{
    // band j meets [Elo, Ehi] only if it is not fully below or above; the
    // Dirichlet counts at the window ends bound the candidate indices
    int jmin = q, jmax = -1;
    for (double t : {0.0, 0.25 / q, 0.5 / q, 0.75 / q}) {
        Potential P = potential(p, q, lambda, t);
        jmin = std::min(jmin, std::max(0, sturm_count(P, Elo) - 1));
        jmax = std::max(jmax, std::min(q - 1, sturm_count(P, Ehi) + 1));
    }
    std::vector<int> which;
    for (int j = jmin; j <= jmax; ++j) which.push_back(j);
    BandSet all = band_set(p, q, lambda, which);
    BandSet out = all;
    out.bands.clear();
    out.labels.clear();
    for (std::size_t i = 0; i < all.bands.size(); ++i) {
        if (all.bands[i].hi < Elo || all.bands[i].lo > Ehi) continue;
        out.bands.push_back(all.bands[i]);
        out.labels.push_back(all.labels[i]);
    }
    return out;
}

Rational ids_of(const BandSet& bs, double E)
{
    std::int64_t r = 0;
    for (const auto& b : bs.bands) {
        if (E >= b.lo && E <= b.hi) {
            std::ostringstream os;
            os << "ids: E = " << E << " lies in band [" << b.lo << ", " << b.hi << "]";
            throw InBandError(os.str());
        }
        if (b.hi < E) ++r;
    }
    return {r, bs.q};
}

Rational ids_rational(int p, int q, double lambda, double E) { return ids_of(bands_rational(p, q, lambda), E); }

int gap_label(int p, int q, int r)
{
    // k p = r mod q via the extended Euclid inverse of p
    long long a = p % q, m = q, x0 = 0, x1 = 1;
    if (q == 1) return 0;
    while (a > 1) {
        long long t = a / m;
        long long tmp = m;
        m = a % m;
        a = tmp;
        tmp = x0;
        x0 = x1 - t * x0;
        x1 = tmp;
    }
    long long inv = ((x1 % q) + q) % q;
    long long k = (inv * r) % q;
    if (2 * k > q) k -= q;
    return int(k);
}

std::vector<BandSet> butterfly(int q_max, double lambda, int workers)
{
    std::vector<std::pair<int, int>> fr;
    for (int q = 1; q <= q_max; ++q)
        for (int p = 0; p < q; ++p)
            if (std::gcd(p, q) == 1) fr.push_back({p, q});
    return parallel_map<BandSet>(fr.size(), workers,
                                 [&](std::size_t i) { return bands_rational(fr[i].first, fr[i].second, lambda); });
}

std::vector<ButterflyRow> butterfly_rows(const std::vector<BandSet>& sets)
{
    std::vector<ButterflyRow> rows;
    for (const auto& bs : sets)
        for (std::size_t i = 0; i < bs.bands.size(); ++i) {
            const auto& b = bs.bands[i];
            int below = b.index == 0 ? 0 : gap_label(bs.p, bs.q, b.index);
            rows.push_back({bs.p, bs.q, b.index, b.lo, b.hi, below});
        }
    return rows;
}

CriticalResult find_critical_energy(double rho_target, double lambda, double tol, LevelEdge edge)
{
    if (!(rho_target > 0 && rho_target <= 0.5)) {
        std::ostringstream os;
        os << "find_critical_energy: target " << rho_target << " outside (0, 1/2]";
        throw BracketError(os.str());
    }
    if (!(tol >= 1e-12)) tol = 1e-12;
    // standard lift: rho in [0, 1/2], rho = 0 above the spectrum, ids = 1 - 2 rho
    double target = rho_target >= 0.5 ? 0.0 : rho_target;
    if (edge == LevelEdge::automatic) edge = target == 0.0 ? LevelEdge::lower : LevelEdge::upper;
    Enclosure enc = enclosure(lambda);
    auto rho_at = [&](double E, long n) {
        AMParams par{E, lambda, 0.0, kAlpha};
        return rotation_number(am_transfer(par), RotationOptions{n, 0.0, 0.0, false});
    };
    auto n_for = [](double width) {
        double n = 100.0 / width;
        return long(std::clamp(n, 1e4, 1e7));
    };
    double lo = enc.lo, hi = enc.hi;
    // lower: pred(E) = rho(E) <= target (false at lo, true at hi)
    // upper: pred(E) = rho(E) <  target (false at lo, true at hi)
    auto pred = [&](double E, long n) {
        OrbitEstimate r = rho_at(E, n);
        double slack = 2.0 / double(n);
        if (edge == LevelEdge::lower) return r.value <= target + slack;
        return r.value < target - slack;
    };
    if (edge == LevelEdge::upper && target == 0.0)
        throw BracketError("find_critical_energy: upper edge of the rho = 0 level set is unbounded");
    long n0 = n_for(hi - lo);
    if (pred(lo, n0) || !pred(hi, n0)) throw BracketError("find_critical_energy: target not bracketed");
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (pred(mid, n_for(hi - lo)))
            hi = mid;
        else
            lo = mid;
    }
    CriticalResult res;
    res.E = 0.5 * (lo + hi);
    OrbitEstimate r = rho_at(res.E, 1000000);
    res.rho = r.value;
    res.rho_err = r.error_indicator;
    res.ids = 1 - 2 * r.value;
    res.bracket = hi - lo;
    return res;
}

}  // namespace hof
