#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "hof/series.hpp"
#include "hof/sl2.hpp"

namespace hof {

// (x, y) -> (x + freq, fiber(x) y)
struct SkewMap {
    double freq = 0;
    std::function<Mat2(double)> fiber;
    // polar angle of fiber(x) never crosses the branch cut at +-pi, so the
    // principal value is already a continuous lift (true for Schrodinger form)
    bool principal_lift = false;
    // set when the fiber is a series; evaluation is then restricted to its domain
    std::shared_ptr<const PolyMat> poly;

    Mat2 operator()(double x) const { return fiber(x); }
};

SkewMap identity_map();
SkewMap constant_map(double freq, const Mat2& M);
SkewMap series_map(double freq, PolyMat M);

SkewMap compose(const SkewMap& F, const SkewMap& G);  // F o G
SkewMap inverse(const SkewMap& G);
// fiber C^{-1} M(x) C, frequency unchanged
SkewMap conjugate(const SkewMap& G, const Mat2& C);
// fiber M(a x), frequency freq/a
SkewMap rescale_x(const SkewMap& G, double a);

struct OrbitEstimate {
    double value = 0;
    long n_iter = 0;
    double error_indicator = 0;
};

OrbitEstimate lyapunov(const SkewMap& G, long n_iter, double x0 = 0.0);

struct RotationOptions {
    long n_iter = 1000000;
    double x0 = 0.0;
    double theta0 = 0.0;
    bool reduce = true;  // report mod 1; otherwise the raw lift average
};

OrbitEstimate rotation_number(const SkewMap& G, const RotationOptions& opt);
inline OrbitEstimate rotation_number(const SkewMap& G, long n_iter, double x0 = 0.0, double theta0 = 0.0)
{
    return rotation_number(G, RotationOptions{n_iter, x0, theta0, true});
}

// distance between two rotation numbers on the circle R/Z
double circle_dist(double a, double b);

double reversibility_defect(const SkewMap& G, double half_width = 1.0);
double commutation_defect(const SkewMap& F, const SkewMap& G, double half_width = 1.0);
double cocycle_power_norm(const SkewMap& G, long n, double x0 = 0.0);

}  // namespace hof
