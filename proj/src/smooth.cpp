#include "hbcycle/smooth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include "hbcycle/hb_engine.hpp"

namespace hbcycle {

namespace {

double bump(double r2) { return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0; }

// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    const auto pos = boost::math::legendre_p_zeros<double>(n);
    x.clear();
    w.clear();
    for (double z : pos) {
        const double d = boost::math::legendre_p_prime(n, z);
        const double wt = 2.0 / ((1.0 - z * z) * d * d);
        for (double s : {1.0, -1.0}) {
            if (s < 0.0 && z == 0.0) continue;
            x.push_back(0.5 * (1.0 + s * z));
            w.push_back(0.5 * wt);
        }
    }
}

}  // namespace

double mollifier_constant() {
    static const double z = [] {
        auto f = [](double r) { return 2.0 * std::numbers::pi * r * bump(r * r); };
        return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-15);
    }();
    return z;
}

double mollifier(const Vec2& x) { return bump(x.squaredNorm()) / mollifier_constant(); }

DiskRule mollifier_rule(int n_radial, int n_angular) {
    if (n_radial < 1 || n_angular < 3) throw PreconditionError("quadrature needs at least 1 radial and 3 angular nodes");
    std::vector<double> rx, rw;
    gauss_legendre(n_radial, rx, rw);
    DiskRule rule;
    const double z = mollifier_constant();
    const double dth = 2.0 * std::numbers::pi / n_angular;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        const double r = rx[i];
        const double wr = rw[i] * r * bump(r * r) / z * dth;
        for (int j = 0; j < n_angular; ++j) {
            const double th = dth * j;
            rule.nodes.emplace_back(r * std::cos(th), r * std::sin(th));
            rule.weights.push_back(wr);
        }
    }
    return rule;
}

SmoothedCounterExample::SmoothedCounterExample(const CounterExample& base, double epsilon, int n_radial,
                                               int n_angular, double tolerance)
    : base_(base), eps_(epsilon), tol_(tolerance) {
    if (!(epsilon >= 0.0)) throw PreconditionError("smoothing radius must be nonnegative");
    if (epsilon > base.r_max() * (1.0 + 1e-12))
        throw PreconditionError("smoothing radius exceeds r_max; cycle points would leave their linear pieces");
    if (eps_ > 0.0) {
        fine_ = mollifier_rule(n_radial, n_angular);
        coarse_ = mollifier_rule(std::max(1, n_radial / 2), std::max(3, n_angular / 2));
    }
}

double SmoothedCounterExample::value(const Vec2& x) const {
    if (eps_ == 0.0) return base_.value(x);
    double s = 0.0;
    for (std::size_t i = 0; i < fine_.nodes.size(); ++i) s += fine_.weights[i] * base_.value(x - eps_ * fine_.nodes[i]);
    return s;
}

Vec2 SmoothedCounterExample::grad(const Vec2& x) const {
    if (eps_ == 0.0) return base_.grad(x);
    Vec2 s = Vec2::Zero();
    for (std::size_t i = 0; i < fine_.nodes.size(); ++i) s += fine_.weights[i] * base_.grad(x - eps_ * fine_.nodes[i]);
    return s;
}

SmoothedGrad SmoothedCounterExample::grad_checked(const Vec2& x) const {
    const Vec2 g = grad(x);
    if (eps_ == 0.0) return {g, 0.0, false};
    Vec2 c = Vec2::Zero();
    for (std::size_t i = 0; i < coarse_.nodes.size(); ++i)
        c += coarse_.weights[i] * base_.grad(x - eps_ * coarse_.nodes[i]);
    const double err = (g - c).norm();
    return {g, err, err > tol_ * std::max(1.0, g.norm())};
}

PlanarFunction SmoothedCounterExample::as_function() const {
    return {[this](const Vec2& x) { return value(x); }, [this](const Vec2& x) { return grad(x); }};
}

PlanarFunction dilate(const PlanarFunction& f, double lambda) {
    if (!(lambda > 0.0)) throw PreconditionError("dilation factor must be positive");
    return {[f, lambda](const Vec2& x) { return lambda * lambda * f.value(x / lambda); },
            [f, lambda](const Vec2& x) -> Vec2 { return lambda * f.grad(x / lambda); }};
}

SmoothCycleReport cycle_check_smoothed(const SmoothedCounterExample& s, long steps, double lambda) {
    const PlanarFunction f = dilate(s.as_function(), lambda);
    const RouCycle& cyc = s.base().cycle();
    const GradOracle oracle = [&f](const Eigen::VectorXd& x) -> Eigen::VectorXd { return f.grad(Vec2(x)); };
    const SimTrace tr =
        run(oracle, s.base().params(), lambda * cyc.point(0), lambda * cyc.point(1), steps);
    double dev = tr.diverged ? std::numeric_limits<double>::infinity() : 0.0;
    for (std::size_t t = 0; t < tr.iterates.size(); ++t)
        dev = std::max(dev, (Vec2(tr.iterates[t]) - lambda * cyc.point(static_cast<long>(t))).norm());
    return {dev, steps};
}

double estimate_hessian_lipschitz(const PlanarFunction& f, const Vec2& center, double radius, double h, int samples,
                                  unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto hess = [&](const Vec2& x) {
        Eigen::Matrix2d hm;
        for (int j = 0; j < 2; ++j) {
            Vec2 e = Vec2::Zero();
            e(j) = h;
            hm.col(j) = (f.grad(x + e) - f.grad(x - e)) / (2.0 * h);
        }
        return Eigen::Matrix2d(0.5 * (hm + hm.transpose()));
    };
    double best = 0.0;
    for (int s = 0; s < samples; ++s) {
        const Vec2 x = center + radius * Vec2(u(rng), u(rng));
        const double a = std::numbers::pi * u(rng);
        const Vec2 y = x + 4.0 * h * Vec2(std::cos(a), std::sin(a));
        const double d = (x - y).norm();
        best = std::max(best, (hess(x) - hess(y)).norm() / d);
    }
    return best;
}

}  // namespace hbcycle
