#include "hof/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include <Eigen/Dense>

#include "hof/amspec.hpp"
#include "hof/arith.hpp"
#include "hof/cocycle.hpp"
#include "hof/errors.hpp"
#include "hof/golden.hpp"
#include "hof/parallel.hpp"

namespace hof {

const char* side_name(Side s) { return s == Side::below ? "below" : "above"; }

namespace {

double critical_energy(int ell, const ScanOptions& opt)
{
    if (!std::isnan(opt.E_c)) return opt.E_c;
    if (ell == 3) return constants().E3;
    if (ell == 6) return constants().E6;
    throw Error("scaling scan: ell must be 3 or 6");
}

std::vector<double> log_grid(double lo, double hi, int n)
{
    if (n < 2 || !(lo > 0) || !(hi > lo)) throw Error("scaling scan: need n >= 2 and 0 < eps_lo < eps_hi");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, double(i) / double(n - 1));
    return g;
}

struct Point {
    double f, err;
};

ScalingScan run_scan(int ell, Side side, int n_points, const ScanOptions& opt,
                     const std::function<Point(double)>& eval)
{
    ScalingScan sc;
    sc.ell = ell;
    sc.side = side;
    sc.E_c = critical_energy(ell, opt);
    sc.eps_grid = log_grid(opt.eps_lo, opt.eps_hi, n_points);
    double sgn = side == Side::above ? 1.0 : -1.0;
    auto pts = parallel_map<Point>(sc.eps_grid.size(), opt.workers,
                                   [&](std::size_t i) { return eval(sc.E_c + sgn * sc.eps_grid[i]); });
    for (const auto& p : pts) {
        sc.f_values.push_back(std::max(0.0, p.f));
        sc.f_errors.push_back(p.err);
        sc.flagged.push_back(p.f < 10 * p.err);
    }
    return sc;
}

}  // namespace

ScalingScan lyapunov_scaling_scan(int ell, Side side, int n_points, const ScanOptions& opt)
{
    return run_scan(ell, side, n_points, opt, [&](double E) {
        OrbitEstimate L = lyapunov(am_transfer({E, opt.lambda, 0.0, kAlpha}), opt.n_iter);
        // bias of the finite-n average is O(1/n)
        return Point{L.value, L.error_indicator + 1.0 / double(opt.n_iter)};
    });
}

ScalingScan rotation_scaling_scan(int ell, Side side, int n_points, const ScanOptions& opt)
{
    double Ec = critical_energy(ell, opt);
    auto rho = [&](double E) {
        return rotation_number(am_transfer({E, opt.lambda, 0.0, kAlpha}), RotationOptions{opt.n_iter, 0, 0, false});
    };
    OrbitEstimate r0 = rho(Ec);
    return run_scan(ell, side, n_points, opt, [&](double E) {
        OrbitEstimate r = rho(E);
        return Point{2 * std::abs(r.value - r0.value),
                     2 * (r.error_indicator + r0.error_indicator) + 4.0 / double(opt.n_iter)};
    });
}

FitResult fit_power_law(const ScalingScan& scan, double period_lo, double period_hi)
{
    std::vector<double> t, y;
    for (std::size_t i = 0; i < scan.eps_grid.size(); ++i) {
        if (i < scan.flagged.size() && scan.flagged[i]) continue;
        if (!(scan.f_values[i] > 0)) continue;
        t.push_back(std::log(scan.eps_grid[i]));
        y.push_back(std::log(scan.f_values[i]));
    }
    FitResult fr;
    fr.n_used = int(t.size());
    if (fr.n_used < 3) throw ConvergenceError("fit_power_law: fewer than 3 usable points");
    double n = double(t.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        st += t[i];
        sy += y[i];
        stt += t[i] * t[i];
        sty += t[i] * y[i];
    }
    double den = n * stt - st * st;
    if (!(std::abs(den) > 1e-12 * n * stt)) throw ConvergenceError("fit_power_law: ill-conditioned fit");
    fr.exponent = (n * sty - st * sy) / den;
    fr.intercept = (sy - fr.exponent * st) / n;
    std::vector<double> res(t.size());
    double ss = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        res[i] = y[i] - fr.intercept - fr.exponent * t[i];
        ss += res[i] * res[i];
    }
    fr.residual = std::sqrt(ss / n);

    // periodic fit with a few harmonics at each trial period; the fundamental
    // is the period with the smallest remaining residual. Periods longer than
    // half the span are not identifiable and are skipped.
    const int K = 3;
    double span = t.back() - t.front();
    double p_hi = std::min(period_hi, 0.5 * std::abs(span));
    double best_rem = ss, best_period = 0, best_amp = 0, best_peak = 0;
    const int n_trial = 2000;
    Eigen::MatrixXd D(t.size(), 2 * K + 1);
    Eigen::VectorXd rv = Eigen::Map<Eigen::VectorXd>(res.data(), Eigen::Index(res.size()));
    for (int k = 0; k <= n_trial && p_hi > period_lo; ++k) {
        double P = period_lo * std::pow(p_hi / period_lo, double(k) / n_trial);
        double w = 2 * std::numbers::pi / P;
        for (std::size_t i = 0; i < t.size(); ++i) {
            D(i, 0) = 1;
            for (int h = 1; h <= K; ++h) {
                D(i, 2 * h - 1) = std::cos(h * w * t[i]);
                D(i, 2 * h) = std::sin(h * w * t[i]);
            }
        }
        Eigen::VectorXd c = D.colPivHouseholderQr().solve(rv);
        double rem = (rv - D * c).squaredNorm();
        if (rem < best_rem) {
            best_rem = rem;
            best_period = P;
            // half the peak-to-peak excursion of the fitted periodic part
            double lo = INFINITY, hi = -INFINITY;
            for (int m = 0; m < 256; ++m) {
                double x = P * m / 256.0, v = 0;
                for (int h = 1; h <= K; ++h) v += c[2 * h - 1] * std::cos(h * w * x) + c[2 * h] * std::sin(h * w * x);
                lo = std::min(lo, v);
                if (v > hi) {
                    hi = v;
                    best_peak = x;
                }
            }
            best_amp = 0.5 * (hi - lo);
        }
    }
    fr.oscillation_period = best_period;
    fr.oscillation_amplitude = best_amp;
    // estimator uncertainty of log f combined with what the periodic fit leaves
    double est = 0;
    for (std::size_t i = 0; i < scan.eps_grid.size(); ++i) {
        if (i < scan.flagged.size() && scan.flagged[i]) continue;
        if (!(scan.f_values[i] > 0)) continue;
        double e = i < scan.f_errors.size() ? scan.f_errors[i] / scan.f_values[i] : 0.0;
        est += e * e;
    }
    fr.noise = std::sqrt(best_rem / n + est / n);
    fr.line_exponent = fr.exponent;

    // With a resolved oscillation the log-periodic factor has narrow deep dips
    // (near-spectrum points) that tilt a plain line fit depending on where the
    // grid happens to land. The maxima of each period sit on a line of the
    // same slope, so fit those instead.
    if (best_period > 0 && best_amp > fr.noise && span >= 2 * best_period) {
        std::vector<double> tt, yy;
        double first = best_peak + best_period * std::ceil((t.front() - best_peak) / best_period);
        for (double tp = first; tp <= t.back(); tp += best_period) {
            // highest sample within half a period of the predicted peak; it has
            // to be an interior local maximum
            std::size_t j = t.size();
            for (std::size_t k = 0; k < t.size(); ++k)
                if (std::abs(t[k] - tp) <= 0.5 * best_period && (j == t.size() || y[k] > y[j])) j = k;
            if (j == t.size() || j == 0 || j + 1 == t.size()) continue;
            if (y[j - 1] > y[j] || y[j + 1] > y[j]) continue;
            double tv = t[j], yv = y[j];
            // parabola through the top and its neighbours
            double x0 = t[j - 1], x1 = t[j], x2 = t[j + 1];
            double d01 = (y[j] - y[j - 1]) / (x1 - x0), d12 = (y[j + 1] - y[j]) / (x2 - x1);
            double a = (d12 - d01) / (x2 - x0);
            if (a < 0) {
                double xv = 0.5 * (x0 + x1) - d01 / (2 * a);
                if (xv >= x0 && xv <= x2) {
                    tv = xv;
                    yv = y[j] + (xv - x1) * (d01 + a * (xv - x0));
                }
            }
            tt.push_back(tv);
            yy.push_back(yv);
        }
        double m = double(tt.size()), a1 = 0, a2 = 0, a3 = 0, a4 = 0;
        for (std::size_t k = 0; k < tt.size(); ++k) {
            a1 += tt[k];
            a2 += yy[k];
            a3 += tt[k] * tt[k];
            a4 += tt[k] * yy[k];
        }
        double dd = m * a3 - a1 * a1;
        if (tt.size() >= 2 && std::abs(dd) > 0) {
            fr.exponent = (m * a4 - a1 * a2) / dd;
            fr.intercept = (a2 - fr.exponent * a1) / m;
            fr.envelope = true;
        }
    }
    return fr;
}

GrowthFit growth_slope(double E, double lambda, int k_max, int ell, double x0)
{
    if (k_max < 2) throw Error("growth_slope: need k_max >= 2");
    if (ell * k_max > 90) throw Error("growth_slope: q_n too large");
    SkewMap G = am_transfer({E, lambda, kAlpha / 2, kAlpha});
    GrowthFit gf;
    for (int k = 1; k <= k_max; ++k) {
        int nn = ell * k;
        long q = long(fibonacci(nn));
        gf.n.push_back(nn);
        gf.log_norm.push_back(cocycle_power_norm(G, q, x0));
    }
    double m = double(gf.n.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < gf.n.size(); ++i) {
        double x = gf.n[i], y = gf.log_norm[i];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    gf.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    double b = (sy - gf.slope * sx) / m, ss = 0;
    for (std::size_t i = 0; i < gf.n.size(); ++i) {
        double e = gf.log_norm[i] - b - gf.slope * gf.n[i];
        ss += e * e;
    }
    gf.residual = std::sqrt(ss / m);
    return gf;
}

namespace {

// smallest-denominator fraction in [lo, hi], 0 <= lo <= hi
bool simplest_fraction(double lo, double hi, std::int64_t& p, std::int64_t& q, int depth = 0)
{
    if (depth > 60) return false;
    double fl = std::floor(lo);
    if (lo == fl) {
        p = std::int64_t(fl);
        q = 1;
        return true;
    }
    if (fl + 1 <= hi) {
        p = std::int64_t(fl) + 1;
        q = 1;
        return true;
    }
    std::int64_t pp, qq;
    if (!simplest_fraction(1 / (hi - fl), 1 / (lo - fl), pp, qq, depth + 1)) return false;
    if (pp > (std::int64_t(1) << 40)) return false;
    p = std::int64_t(fl) * pp + qq;
    q = pp;
    return true;
}

}  // namespace

double jaccard(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b)
{
    if (a.size() != b.size()) throw Error("jaccard: size mismatch");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        bool x = a[i] != 0, y = b[i] != 0;
        inter += (x && y);
        uni += (x || y);
    }
    return uni == 0 ? 1.0 : double(inter) / double(uni);
}

std::vector<MagnificationFrame> butterfly_magnification(int ell, int steps, const MagnificationOptions& opt)
{
    if (ell != 3 && ell != 6) throw Error("butterfly_magnification: ell must be 3 or 6");
    if (steps < 0) throw Error("butterfly_magnification: steps < 0");
    const Constants K = constants();
    const double mu1 = ell == 3 ? K.mu1_3 : K.mu1_6;
    const double Ec = ell == 3 ? K.E3 : K.E6;
    const double a_scale = -std::pow(K.alpha, 2);  // per basic step, with orientation
    const int W = opt.resolution, H = opt.resolution;
    std::vector<MagnificationFrame> frames;
    for (int k = 0; k <= steps; ++k) {
        MagnificationFrame fr;
        fr.step = k;
        fr.alpha_center = K.alpha;
        double signed_half = opt.alpha_half * std::pow(a_scale, ell * k);
        fr.alpha_half = std::abs(signed_half);
        fr.E_center = Ec;
        fr.E_half = opt.E_half / std::pow(mu1, k);
        fr.width = W;
        fr.height = H;
        fr.pixels.assign(std::size_t(W) * H, 0);
        std::vector<int> missing(H, 0);
        const double Elo = fr.E_center - fr.E_half, Ehi = fr.E_center + fr.E_half;
        const double dE = (Ehi - Elo) / W;
        parallel_for(std::size_t(H), opt.workers, [&](std::size_t i) {
            // rescaled coordinate u in [-1, 1]; mirrored frames flip the alpha axis
            double u0 = -1 + 2.0 * double(i) / H, u1 = -1 + 2.0 * double(i + 1) / H;
            double a0 = fr.alpha_center + signed_half * u0, a1 = fr.alpha_center + signed_half * u1;
            std::int64_t p, q;
            if (!simplest_fraction(std::min(a0, a1), std::max(a0, a1), p, q) || q > opt.q_max) {
                missing[i] = 1;
                return;
            }
            BandSet bs = bands_rational_window(int(p), int(q), opt.lambda, Elo, Ehi);
            std::uint8_t* row = &fr.pixels[i * W];
            for (const auto& b : bs.bands) {
                int j0 = std::max(0, int(std::floor((b.lo - Elo) / dE)));
                int j1 = std::min(W - 1, int(std::floor((b.hi - Elo) / dE)));
                for (int j = j0; j <= j1; ++j) row[j] = 255;
            }
        });
        for (int m : missing) fr.rows_missing += m;
        if (!frames.empty()) fr.overlap_prev = jaccard(frames.back().pixels, fr.pixels);
        frames.push_back(std::move(fr));
    }
    return frames;
}

}  // namespace hof
