#include "hof/cocycle.hpp"

#include <cmath>
#include <numbers>

namespace hof {

namespace {

constexpr double kPi = std::numbers::pi;

double polar_angle(const Mat2& M) { return std::atan2(M.a21 - M.a12, M.a11 + M.a22); }

double nearest_branch(double phi, double ref)
{
    return phi + 2 * kPi * std::round((ref - phi) / (2 * kPi));
}

std::vector<double> sym_grid(double h)
{
    std::vector<double> x(kGridPoints);
    for (int j = 0; j < kGridPoints; ++j) x[j] = h * std::cos(kPi * (j + 0.5) / kGridPoints);
    return x;
}

}  // namespace

SkewMap identity_map() { return constant_map(0.0, Mat2::identity()); }

SkewMap constant_map(double freq, const Mat2& M)
{
    SkewMap G;
    G.freq = freq;
    G.fiber = [M](double) { return M; };
    // a constant fiber has a constant polar angle
    G.principal_lift = true;
    return G;
}

SkewMap series_map(double freq, PolyMat M)
{
    SkewMap G;
    G.freq = freq;
    G.poly = std::make_shared<const PolyMat>(std::move(M));
    auto p = G.poly;
    G.fiber = [p](double x) { return (*p)(x); };
    return G;
}

SkewMap compose(const SkewMap& F, const SkewMap& G)
{
    double g = G.freq;
    auto f = [F, G, g](double x) { return F.fiber(x + g) * G.fiber(x); };
    if (F.poly && G.poly) {
        const PolyMat& P = *G.poly;
        std::function<Mat2(double)> fn = f;
        return series_map(F.freq + G.freq, polymat_fit<double>(fn, P.degree(), P.center(), P.radius()));
    }
    SkewMap H;
    H.freq = F.freq + G.freq;
    H.fiber = f;
    return H;
}

SkewMap inverse(const SkewMap& G)
{
    double g = G.freq;
    auto f = [G, g](double x) { return inv_sl2(G.fiber(x - g)); };
    if (G.poly) {
        const PolyMat& P = *G.poly;
        std::function<Mat2(double)> fn = f;
        return series_map(-g, polymat_fit<double>(fn, P.degree(), P.center() + g, P.radius()));
    }
    SkewMap H;
    H.freq = -g;
    H.fiber = f;
    H.principal_lift = G.principal_lift;
    return H;
}

SkewMap conjugate(const SkewMap& G, const Mat2& C)
{
    Mat2 Ci = adjugate(C) * (1.0 / C.det());
    SkewMap H;
    H.freq = G.freq;
    H.fiber = [G, C, Ci](double x) { return Ci * G.fiber(x) * C; };
    return H;
}

SkewMap rescale_x(const SkewMap& G, double a)
{
    SkewMap H;
    H.freq = G.freq / a;
    H.fiber = [G, a](double x) { return G.fiber(a * x); };
    H.principal_lift = G.principal_lift;
    return H;
}

OrbitEstimate lyapunov(const SkewMap& G, long n_iter, double x0)
{
    if (n_iter < 2) n_iter = 2;
    double vx = 1, vy = 0, x = x0, sum = 0, half = 0;
    long n_half = n_iter / 2;
    for (long k = 0; k < n_iter; ++k) {
        Mat2 M = G.fiber(x);
        if (!M.finite()) throw Error("lyapunov: non-finite fiber entry");
        double wx = M.a11 * vx + M.a12 * vy;
        double wy = M.a21 * vx + M.a22 * vy;
        double r = std::hypot(wx, wy);
        sum += std::log(r);
        vx = wx / r;
        vy = wy / r;
        x += G.freq;
        if (k + 1 == n_half) half = sum / double(n_half);
    }
    double est = sum / double(n_iter);
    return {est, n_iter, std::abs(est - half)};
}

double circle_dist(double a, double b)
{
    double d = std::fmod(std::abs(a - b), 1.0);
    return std::min(d, 1.0 - d);
}

OrbitEstimate rotation_number(const SkewMap& G, const RotationOptions& opt)
{
    long n = std::max(2L, opt.n_iter);
    long n_half = n / 2;
    double vx = std::cos(opt.theta0), vy = std::sin(opt.theta0);
    double x = opt.x0;
    double lift = 0, half = 0;
    double phi_prev = polar_angle(G.fiber(x));
    int sub = 4;
    for (long k = 0; k < n; ++k) {
        Mat2 M = G.fiber(x);
        if (!M.finite()) throw Error("rotation_number: non-finite fiber entry");
        double phi = polar_angle(M);
        if (!G.principal_lift) {
            if (k > 0) {
                // continue the polar angle from the previous orbit point
                double xp = x - G.freq;
                for (;;) {
                    double ref = phi_prev;
                    bool ok = true;
                    for (int s = 1; s <= sub; ++s) {
                        double xs = xp + G.freq * double(s) / sub;
                        double ps = nearest_branch(s == sub ? phi : polar_angle(G.fiber(xs)), ref);
                        if (std::abs(ps - ref) > kPi / 2) {
                            ok = false;
                            break;
                        }
                        ref = ps;
                    }
                    if (ok) {
                        phi = ref;
                        break;
                    }
                    sub *= 2;
                    if (sub > 4096) throw BranchError("rotation_number: polar angle continuation failed");
                }
            }
            phi_prev = phi;
        }
        // M = R(phi) P with P symmetric positive definite; P moves angles by < pi/2
        double c = std::cos(phi), s = std::sin(phi);
        double p11 = c * M.a11 + s * M.a21, p12 = c * M.a12 + s * M.a22;
        double p21 = -s * M.a11 + c * M.a21, p22 = -s * M.a12 + c * M.a22;
        double wx = p11 * vx + p12 * vy, wy = p21 * vx + p22 * vy;
        double delta = std::atan2(vx * wy - vy * wx, vx * wx + vy * wy);
        lift += phi + delta;
        double ux = c * wx - s * wy, uy = s * wx + c * wy;
        double r = std::hypot(ux, uy);
        vx = ux / r;
        vy = uy / r;
        x += G.freq;
        if (k + 1 == n_half) half = lift / (2 * kPi * double(n_half));
    }
    double est = lift / (2 * kPi * double(n));
    double err = std::abs(est - half);
    if (opt.reduce) {
        est -= std::floor(est);
        if (est >= 1.0) est = 0.0;
    }
    return {est, n, err};
}

double reversibility_defect(const SkewMap& G, double half_width)
{
    const Mat2 S = Mat2::swap();
    double worst = 0;
    for (double x : sym_grid(half_width)) {
        Mat2 Gi = adjugate(G.fiber(x - G.freq));
        Mat2 R = S * G.fiber(-x) * S;
        worst = std::max(worst, (Gi - R).max_abs());
    }
    return worst;
}

double commutation_defect(const SkewMap& F, const SkewMap& G, double half_width)
{
    double worst = 0;
    for (double x : sym_grid(half_width)) {
        Mat2 fg = F.fiber(x + G.freq) * G.fiber(x);
        Mat2 gf = G.fiber(x + F.freq) * F.fiber(x);
        worst = std::max(worst, (fg - gf).max_abs());
    }
    return worst;
}

double cocycle_power_norm(const SkewMap& G, long n, double x0)
{
    Mat2 P = Mat2::identity();
    double logscale = 0, x = x0;
    for (long k = 0; k < n; ++k) {
        P = G.fiber(x) * P;
        double m = P.max_abs();
        if (m > 1e100 || m < 1e-100) {
            P = P * (1.0 / m);
            logscale += std::log(m);
        }
        x += G.freq;
    }
    return std::log(P.norm()) + logscale;
}

}  // namespace hof
