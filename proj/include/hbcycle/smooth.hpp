#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "hbcycle/rou_region.hpp"

namespace hbcycle {

struct PlanarFunction {
    std::function<double(const Vec2&)> value;
    std::function<Vec2(const Vec2&)> grad;
};

// Polar quadrature over the unit disk: Gauss-Legendre in r, trapezoid in angle.
struct DiskRule {
    std::vector<Vec2> nodes;
    std::vector<double> weights;  // include the bump density, sum ~ 1
};

// Normalising constant of exp(-1 / (1 - |x|^2)) over the unit disk.
double mollifier_constant();
double mollifier(const Vec2& x);
DiskRule mollifier_rule(int n_radial, int n_angular);

struct SmoothedGrad {
    Vec2 grad;
    double error_estimate;
    bool precision_warning;
};

class SmoothedCounterExample {
public:
    // epsilon = 0 means no smoothing.
    SmoothedCounterExample(const CounterExample& base, double epsilon, int n_radial = 64, int n_angular = 64,
                           double tolerance = 1e-4);

    double value(const Vec2& x) const;
    Vec2 grad(const Vec2& x) const;
    SmoothedGrad grad_checked(const Vec2& x) const;

    double epsilon() const { return eps_; }
    const CounterExample& base() const { return base_; }
    PlanarFunction as_function() const;

private:
    const CounterExample& base_;
    double eps_;
    double tol_;
    DiskRule fine_;
    DiskRule coarse_;
};

// x -> lambda^2 f(x / lambda).
PlanarFunction dilate(const PlanarFunction& f, double lambda);

struct SmoothCycleReport {
    double max_deviation;
    long steps;
};

// Heavy-ball from the first two cycle points (scaled by lambda) on the smoothed function.
SmoothCycleReport cycle_check_smoothed(const SmoothedCounterExample& s, long steps, double lambda = 1.0);

// Largest |grad^2 f(x) - grad^2 f(y)| / |x - y| over seeded pairs with |x - y| = 4h,
// x uniform in the square of half-width radius, Hessians by central differences of step h.
double estimate_hessian_lipschitz(const PlanarFunction& f, const Vec2& center, double radius, double h, int samples,
                                  unsigned seed = 7);

}  // namespace hbcycle
