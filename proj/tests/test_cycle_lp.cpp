#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hbcycle/cycle_lp.hpp"
#include "hbcycle/quad_rates.hpp"
#include "hbcycle/rou_region.hpp"
#include "hbcycle/simplex.hpp"
#include "oracles.hpp"

using namespace hbcycle;

namespace {

Eigen::MatrixXd lessard_points() {
    Eigen::MatrixXd x(3, 1);
    x << 792.0, -2208.0, 2592.0;
    return x / 1225.0;
}

LinearProgram make_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                      std::vector<RowSense> s) {
    return {a, b, c, std::move(s)};
}

}  // namespace

TEST_CASE("simplex: textbook optimum") {
    Eigen::MatrixXd a(2, 2);
    a << 1, 2, 3, 1;
    const auto sol = solve_lp(make_lp(a, Eigen::Vector2d(4, 6), Eigen::Vector2d(-1, -1),
                                      {RowSense::LessEqual, RowSense::LessEqual}));
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.x(0) == doctest::Approx(1.6));
    CHECK(sol.x(1) == doctest::Approx(1.2));
    CHECK(sol.objective == doctest::Approx(-2.8));
}

TEST_CASE("simplex: infeasible and unbounded") {
    Eigen::MatrixXd a(2, 2);
    a << 1, 1, 1, 1;
    CHECK(solve_lp(make_lp(a, Eigen::Vector2d(1, 2), Eigen::Vector2d(1, 1), {RowSense::Equal, RowSense::GreaterEqual}))
              .status == LpStatus::Infeasible);
    Eigen::MatrixXd u(1, 2);
    u << 1, -1;
    CHECK(solve_lp(make_lp(u, Eigen::VectorXd::Ones(1), Eigen::Vector2d(-1, 0), {RowSense::LessEqual})).status ==
          LpStatus::Unbounded);
}

TEST_CASE("simplex: Beale's cycling example terminates") {
    Eigen::MatrixXd a(3, 4);
    a << 0.25, -8, -1, 9, 0.5, -12, -0.5, 3, 0, 0, 1, 0;
    Eigen::VectorXd c(4);
    c << -0.75, 20, -0.5, 6;
    const auto sol = solve_lp(make_lp(a, Eigen::Vector3d(0, 0, 1), c,
                                      {RowSense::LessEqual, RowSense::LessEqual, RowSense::LessEqual}));
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(-1.25));
}

TEST_CASE("simplex: negative right-hand sides and >= rows") {
    Eigen::MatrixXd a(2, 2);
    a << -1, -1, 1, 0;
    const auto sol = solve_lp(make_lp(a, Eigen::Vector2d(-2, 3), Eigen::Vector2d(1, 2),
                                      {RowSense::LessEqual, RowSense::LessEqual}));
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(2.0));
}

TEST_CASE("Lessard cycle: symmetrised Gram matrix") {
    const Eigen::MatrixXd g0 = centered_gram(lessard_points());
    Eigen::Matrix3d expect_g0;
    expect_g0 << 4, -26, 22, -26, 169, -143, 22, -143, 121;
    expect_g0 *= std::pow(8.0 / 49.0, 2);
    CHECK((g0 - expect_g0).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::Matrix3d expect;
    expect << 2, -1, -1, -1, 2, -1, -1, -1, 2;
    expect *= 64.0 / 49.0;
    CHECK((symmetrize_gram(g0) - expect).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::VectorXd w = decompose_circulant(expect);
    REQUIRE(w.size() == 1);
    CHECK(w(0) == doctest::Approx(128.0 / 49.0).epsilon(1e-14));
}

TEST_CASE("Lessard cycle interpolates the class") {
    const FunctionClass c{1.0, 25.0};
    const Tuning t = optimal_tuning(c);
    const HbParams p{t.gamma, t.beta};
    const Eigen::MatrixXd x = lessard_points();
    const Eigen::MatrixXd g = cycle_gradients(x, p);
    const auto f = interpolating_values(x, g, c);
    REQUIRE(f.has_value());
    CHECK(interpolation_residuals(x, g, *f, c).maxCoeff() <= 1e-12);
    const LpResult lp = lp_feasible(p, c, 3);
    CHECK(lp.feasible);
}

TEST_CASE("symmetrisation preconditions and invariance") {
    Eigen::Matrix3d bad;
    bad << 1, 2, 0, 0, 1, 0, 0, 0, 1;
    CHECK_THROWS_AS(symmetrize_gram(bad), PreconditionError);
    Eigen::Matrix3d neg = -Eigen::Matrix3d::Identity();
    CHECK_THROWS_AS(symmetrize_gram(neg), PreconditionError);
    for (int k : {4, 5, 8}) {
        Eigen::MatrixXd x(k, 3);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < 3; ++j) x(i, j) = oracle::uniform(-1, 1);
        const Eigen::MatrixXd s = symmetrize_gram(centered_gram(x));
        CHECK((s - s.transpose()).cwiseAbs().maxCoeff() < 1e-14);
        // circulant: a further symmetrisation is a no-op
        CHECK((symmetrize_gram(s) - s).cwiseAbs().maxCoeff() < 1e-13);
        CHECK(std::abs(s.trace() - centered_gram(x).trace()) < 1e-12);
    }
}

TEST_CASE("harmonic decomposition round trip") {
    for (int k = 3; k <= 12; ++k) {
        for (int l = 1; l <= k / 2; ++l) {
            const Eigen::VectorXd w = decompose_circulant(harmonic_gram(k, l));
            for (int m = 1; m <= k / 2; ++m) CHECK(w(m - 1) == doctest::Approx(m == l ? 1.0 : 0.0).scale(1.0));
        }
        Eigen::VectorXd nu(k / 2);
        for (int i = 0; i < nu.size(); ++i) nu(i) = oracle::uniform(0.0, 1.0);
        nu /= nu.sum();
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(k, k);
        for (int l = 1; l <= k / 2; ++l) g += nu(l - 1) * harmonic_gram(k, l);
        CHECK((decompose_circulant(g) - nu).cwiseAbs().maxCoeff() < 1e-12);
        const Eigen::MatrixXd x = reconstruct_points(nu, k);
        CHECK(x.cols() == k - 1);
        CHECK((x * x.transpose() - g).cwiseAbs().maxCoeff() < 1e-12);
    }
    Eigen::Matrix3d neg;
    neg << -2, 1, 1, 1, -2, 1, 1, 1, -2;
    CHECK_THROWS_AS(decompose_circulant(neg), NumericalError);
}

TEST_CASE("lifted matrices agree with direct evaluation") {
    const FunctionClass c{0.05, 1.0};
    const HbParams p{1.7, 0.4};
    for (int k : {3, 4, 7, 10}) {
        const auto m = lift_matrices(p, c, k);
        REQUIRE(static_cast<int>(m.size()) == k - 1);
        Eigen::MatrixXd x(k, 4);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < 4; ++j) x(i, j) = oracle::uniform(-3, 3);
        const Eigen::MatrixXd r = interpolation_residuals(x, cycle_gradients(x, p), Eigen::VectorXd::Zero(k), c);
        const Eigen::MatrixXd g = centered_gram(x);
        for (int i = 1; i < k; ++i) CHECK(g.cwiseProduct(m[i - 1]).sum() == doctest::Approx(r(i, 0)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(lift_matrices(p, c, 2), PreconditionError);
    CHECK_THROWS_AS(lift_matrices({0.0, 0.4}, c, 5), PreconditionError);
    CHECK_THROWS_AS(lift_matrices(p, {1.0, 1.0}, 5), PreconditionError);
}

TEST_CASE("LP certificate at a cycling point") {
    const FunctionClass c{0.005, 1.0};
    const LpResult r = lp_feasible({3.3, 0.75}, c, 7);
    REQUIRE(r.feasible);
    CHECK(r.certificate_residual <= 1e-7);
    CHECK(r.points.rows() == 7);
    CHECK(r.points.cols() == 6);
    CHECK(r.nu.sum() == doctest::Approx(1.0));
}

TEST_CASE("LP is infeasible on Ghadimi parameters") {
    const FunctionClass c{0.01, 1.0};
    int checked = 0;
    for (int i = 1; i < 12; ++i)
        for (int j = 0; j < 12; ++j) {
            const HbParams p{2.0 / c.L * i / 12.0, j / 12.0};
            if (!ghadimi_contains(p, c)) continue;
            ++checked;
            for (int k = 3; k <= 25; ++k) CHECK_FALSE(lp_feasible(p, c, k).feasible);
        }
    CHECK(checked > 20);
}

TEST_CASE("LP agrees with the analytic region at clear-cut points") {
    const FunctionClass c{0.01, 1.0};
    for (int s = 0; s < 60; ++s) {
        const double b = oracle::uniform(0.0, 0.95);
        const HbParams p{oracle::uniform(0.05, 2.0 * (1.0 + b) / c.L * 0.999), b};
        const int k = 3 + static_cast<int>(oracle::uniform(0.0, 8.0));
        const double pv = membership_polynomial(p, k, c);
        if (std::abs(pv) < 1e-3) continue;
        if (pv < 0.0) CHECK(lp_feasible(p, c, k).feasible);
    }
}

TEST_CASE("LP optimum matches an external solver value") {
    // Margin computed once with an independent interior-point/HiGHS solve of the same LP.
    const LpResult r = lp_feasible({1.0, 1.0 / 12.0}, {0.01, 1.0}, 22);
    CHECK(r.t_star == doctest::Approx(0.25462859586150854).epsilon(1e-9));
    CHECK_FALSE(r.feasible);
}
