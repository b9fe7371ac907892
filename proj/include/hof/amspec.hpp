#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "hof/cocycle.hpp"
#include "hof/golden.hpp"
#include "hof/series.hpp"

namespace hof {

struct AMParams {
    double E = 0;
    double lambda = 1;
    double xi = 0;
    double alpha = kAlpha;
};

// A(x) = [[E - 2 lambda cos(2 pi (x + xi)), -1], [1, 0]]
template <class T>
Mat2T<T> am_matrix(T E, T lambda, T xi, T x)
{
    T V = 2 * lambda * std::cos(2 * std::numbers::pi_v<T> * (x + xi));
    return {E - V, T(-1), T(1), T(0)};
}

SkewMap am_transfer(const AMParams& p);

template <class T>
PolyMatT<T> am_polymat(T E, T lambda, T xi, int N = kDefaultDegree, T center = 0, T radius = T(kDefaultRadius))
{
    return polymat_fit<T>([=](T x) { return am_matrix<T>(E, lambda, xi, x); }, N, center, radius);
}

struct Band {
    int index = 0;  // 0-based position among the q bands
    double lo = 0, hi = 0;
};

struct BandSet {
    int p = 0, q = 1;
    double lambda = 1;
    std::vector<Band> bands;  // ascending
    // labels[i]: gap label of the gap directly above bands[i] (last entry unused = 0)
    std::vector<int> labels;

    double measure() const;
};

// discriminant tr(A_{q-1} ... A_0) with V_n = 2 lambda cos(2 pi (n p/q + theta))
double discriminant(int p, int q, double lambda, double theta, double E);

BandSet bands_rational(int p, int q, double lambda);
// only the bands that meet [Elo, Ehi]; band indices stay global
BandSet bands_rational_window(int p, int q, double lambda, double Elo, double Ehi);

struct Rational {
    std::int64_t num = 0, den = 1;
};

Rational ids_rational(int p, int q, double lambda, double E);
Rational ids_of(const BandSet& bs, double E);

int gap_label(int p, int q, int r);

struct ButterflyRow {
    int p, q, band_index;
    double lo, hi;
    int gap_label;  // label of the gap below the band (0 below the lowest band)
};

std::vector<BandSet> butterfly(int q_max, double lambda, int workers = 1);
std::vector<ButterflyRow> butterfly_rows(const std::vector<BandSet>& sets);

// automatic: the largest spectral energy with the target rotation number,
// i.e. upper for rho' > 0 and lower for rho' = 0 (where the level set is
// unbounded above)
enum class LevelEdge { automatic, lower, upper };

struct CriticalResult {
    double E = 0;
    double rho = 0;      // rotation number estimate at E (standard lift, in [0, 1/2])
    double rho_err = 0;  // estimator indicator at E
    double ids = 0;      // 1 - 2 rho
    double bracket = 0;  // final bracket width
};

// E_c = inf{E : rho(E) <= rho'} (lower) or sup{E : rho(E) >= rho'} (upper),
// with rho' = target reduced mod 1/2 into [0, 1/2)
CriticalResult find_critical_energy(double rho_target, double lambda, double tol,
                                    LevelEdge edge = LevelEdge::automatic);

}  // namespace hof
