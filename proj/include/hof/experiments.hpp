#pragma once

// Scaling studies near the critical energies.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace hof {

enum class Side { below, above };

const char* side_name(Side s);

struct ScalingScan {
    int ell = 3;
    Side side = Side::above;
    double E_c = 0;
    std::vector<double> eps_grid;  // increasing
    std::vector<double> f_values;
    std::vector<double> f_errors;  // estimator indicator per point
    std::vector<bool> flagged;     // f below 10x its estimator error
};

struct ScanOptions {
    double eps_lo = 1e-6;
    double eps_hi = 1e-2;
    long n_iter = 10000000;
    double lambda = 1;
    int workers = 1;
    double E_c = std::numeric_limits<double>::quiet_NaN();  // default: tabulated E_ell
};

// f(E) = L(E), E = E_c -+ eps
ScalingScan lyapunov_scaling_scan(int ell, Side side, int n_points, const ScanOptions& opt = {});
// f(E) = 2 |rho(E) - rho(E_c)|
ScalingScan rotation_scaling_scan(int ell, Side side, int n_points, const ScanOptions& opt = {});

struct FitResult {
    double exponent = 0;
    double intercept = 0;
    double oscillation_period = 0;     // in log eps
    double oscillation_amplitude = 0;  // half peak-to-peak of the periodic part of log f
    double residual = 0;               // rms of log f around the line
    double noise = 0;                  // estimator error of log f and rms left by the periodic fit
    double line_exponent = 0;          // slope of the plain line fit
    bool envelope = false;             // exponent taken from per-period maxima
    int n_used = 0;
};

// linear fit of log f against log eps, then a harmonic periodogram of the
// residual over periods in [period_lo, min(period_hi, span/2)]; flagged
// points are skipped. When the oscillation amplitude exceeds the noise the
// exponent is the slope through the per-period maxima of log f.
FitResult fit_power_law(const ScalingScan& scan, double period_lo = 1.0, double period_hi = 10.0);

struct GrowthFit {
    double slope = 0;
    double residual = 0;  // rms deviation from the line
    std::vector<int> n;
    std::vector<double> log_norm;
};

// log |mat G^{q_n}(x0)| against n for n = ell, 2 ell, ..., k_max ell; G is the
// AM map at frequency alpha with phase alpha/2
GrowthFit growth_slope(double E, double lambda, int k_max, int ell = 3, double x0 = 0.0);

struct MagnificationFrame {
    int step = 0;
    double alpha_center = 0, alpha_half = 0;
    double E_center = 0, E_half = 0;
    int width = 0, height = 0;
    std::vector<std::uint8_t> pixels;  // row-major, row = alpha, 255 = spectrum
    int rows_missing = 0;              // rows whose best rational exceeds q_max
    double overlap_prev = 0;           // Jaccard with the previous frame
};

struct MagnificationOptions {
    double alpha_half = 0.02;
    double E_half = 0.5;
    int resolution = 2048;
    int q_max = 5000;
    double lambda = 1;
    int workers = 1;
};

// Frame k: alpha half-width alpha_half * alpha*^(2 ell k), mirrored for odd
// ell; E half-width E_half / mu1^k
std::vector<MagnificationFrame> butterfly_magnification(int ell, int steps, const MagnificationOptions& opt = {});

double jaccard(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b);

}  // namespace hof
