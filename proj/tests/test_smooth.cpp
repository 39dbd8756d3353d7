#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hbcycle/smooth.hpp"
#include "oracles.hpp"

using namespace hbcycle;

namespace {

const FunctionClass kC{0.005, 1.0};
const HbParams kP{3.3, 0.75};

// Composite Simpson on the radial integral, independent of the library rule.
double simpson_constant(int n) {
    auto f = [](double r) { return r < 1.0 ? 2.0 * std::numbers::pi * r * std::exp(-1.0 / (1.0 - r * r)) : 0.0; };
    const double h = 1.0 / n;
    double s = f(0.0) + f(1.0);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("mollifier normalisation") {
    CHECK(mollifier_constant() == doctest::Approx(simpson_constant(200000)).epsilon(1e-10));
    const DiskRule rule = mollifier_rule(64, 64);
    double total = 0.0;
    Vec2 mean = Vec2::Zero();
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        total += rule.weights[i];
        mean += rule.weights[i] * rule.nodes[i];
        CHECK(rule.nodes[i].norm() < 1.0);
    }
    CHECK(std::abs(total - 1.0) < 1e-6);
    CHECK(mean.norm() < 1e-14);
    CHECK(mollifier(Vec2(1.0, 0.0)) == 0.0);
    CHECK(mollifier(Vec2(0.0, 0.0)) == doctest::Approx(std::exp(-1.0) / mollifier_constant()));
}

TEST_CASE("smoothed gradient coincides with psi at the cycle") {
    const CounterExample ce(kP, kC, 7);
    const SmoothedCounterExample s(ce, ce.r_max() / 2.0);
    for (int k = 0; k < 7; ++k) {
        const Vec2 x = ce.cycle().point(k);
        const SmoothedGrad g = s.grad_checked(x);
        CHECK((g.grad - ce.grad(x)).norm() <= 1e-4);
        CHECK_FALSE(g.precision_warning);
    }
}

TEST_CASE("smoothing radius is bounded by r_max") {
    const CounterExample ce(kP, kC, 7);
    CHECK_THROWS_AS(SmoothedCounterExample(ce, ce.r_max() * 1.01), PreconditionError);
    CHECK_THROWS_AS(SmoothedCounterExample(ce, -1.0), PreconditionError);
}

TEST_CASE("smoothed Hessian stays within the class bounds") {
    const CounterExample ce(kP, kC, 7);
    const SmoothedCounterExample s(ce, ce.r_max() / 2.0, 32, 32);
    const double h = 1e-3;
    for (int i = 0; i < 150; ++i) {
        const Vec2 x(oracle::uniform(-1.5, 1.5), oracle::uniform(-1.5, 1.5));
        Eigen::Matrix2d hm;
        for (int j = 0; j < 2; ++j) {
            Vec2 e = Vec2::Zero();
            e(j) = h;
            hm.col(j) = (s.grad(x + e) - s.grad(x - e)) / (2.0 * h);
        }
        const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(0.5 * (hm + hm.transpose())).eigenvalues();
        CHECK(ev(0) >= kC.mu - 1e-3 * kC.L);
        CHECK(ev(1) <= kC.L + 1e-3 * kC.L);
    }
}

TEST_CASE("heavy ball cycles on the smoothed function") {
    const CounterExample ce(kP, kC, 7);
    const SmoothedCounterExample s(ce, ce.r_max() / 2.0);
    CHECK(cycle_check_smoothed(s, 500).max_deviation <= 1e-6);
    const SmoothedCounterExample exact(ce, 0.0);
    CHECK(cycle_check_smoothed(exact, 500).max_deviation <= 1e-12);
}

TEST_CASE("dilation identities") {
    const CounterExample ce(kP, kC, 7);
    const PlanarFunction f{[&](const Vec2& x) { return ce.value(x); }, [&](const Vec2& x) { return ce.grad(x); }};
    const PlanarFunction d = dilate(f, 10.0);
    for (int i = 0; i < 50; ++i) {
        const Vec2 x(oracle::uniform(-20, 20), oracle::uniform(-20, 20));
        CHECK(d.value(x) == doctest::Approx(100.0 * ce.value(x / 10.0)));
        CHECK((d.grad(x) - 10.0 * ce.grad(x / 10.0)).norm() < 1e-12);
    }
    CHECK_THROWS_AS(dilate(f, 0.0), PreconditionError);
}

TEST_CASE("dilated smoothed function cycles on the scaled circle") {
    const CounterExample ce(kP, kC, 7);
    const SmoothedCounterExample s(ce, ce.r_max() / 2.0, 32, 32);
    CHECK(cycle_check_smoothed(s, 300, 10.0).max_deviation <= 1e-5);
}

TEST_CASE("Hessian Lipschitz estimate shrinks with dilation") {
    const CounterExample ce(kP, kC, 7);
    const double eps = ce.r_max() / 2.0;
    const SmoothedCounterExample s(ce, eps, 32, 32);
    const PlanarFunction f = s.as_function();
    const double h = eps / 8.0;
    const double t1 = estimate_hessian_lipschitz(f, Vec2::Zero(), 1.2, h, 300);
    const double t10 = estimate_hessian_lipschitz(dilate(f, 10.0), Vec2::Zero(), 12.0, 10.0 * h, 300);
    CHECK(t1 > 0.0);
    CHECK(t10 == doctest::Approx(t1 / 10.0).epsilon(0.2));
}
