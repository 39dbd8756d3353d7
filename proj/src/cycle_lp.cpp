#include "hbcycle/cycle_lp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "hbcycle/simplex.hpp"

namespace hbcycle {

namespace {

int wrap(int t, int k) { return ((t % k) + k) % k; }

void check_lp_args(const HbParams& p, const FunctionClass& c, int k) {
    validate(c);
    if (k < 3) throw PreconditionError("cycle length must be at least 3");
    if (!(p.gamma != 0.0) || !std::isfinite(p.gamma)) throw PreconditionError("gamma must be finite and nonzero");
    if (!(c.mu < c.L)) throw PreconditionError("cycle LP requires mu < L");
}

// Coefficients of g_t over the points x_0..x_{K-1}.
Eigen::VectorXd grad_coeffs(const HbParams& p, int k, int t) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(k);
    a(wrap(t, k)) += (1.0 + p.beta) / p.gamma;
    a(wrap(t + 1, k)) -= 1.0 / p.gamma;
    a(wrap(t - 1, k)) -= p.beta / p.gamma;
    return a;
}

std::vector<Eigen::MatrixXd> build_lifts(const HbParams& p, const FunctionClass& c, int k) {
    const double coef = c.mu / (2.0 * (1.0 - c.kappa()));
    const Eigen::VectorXd g0 = grad_coeffs(p, k, 0);
    std::vector<Eigen::MatrixXd> out;
    for (int i = 1; i < k; ++i) {
        const Eigen::VectorXd gi = grad_coeffs(p, k, i);
        Eigen::VectorXd dx = Eigen::VectorXd::Zero(k);
        dx(i) = 1.0;
        dx(0) = -1.0;
        const Eigen::VectorXd dg = gi - g0;
        const Eigen::VectorXd w = dx - dg / c.L;
        Eigen::MatrixXd m = 0.5 * (g0 * dx.transpose() + dx * g0.transpose());
        m += dg * dg.transpose() / (2.0 * c.L);
        m += coef * w * w.transpose();
        out.push_back(m);
    }
    return out;
}

void self_test_lifts(const std::vector<Eigen::MatrixXd>& lifts, const HbParams& p, const FunctionClass& c, int k) {
    std::mt19937_64 rng(0x5eedULL + static_cast<unsigned>(k));
    std::normal_distribution<double> nd;
    Eigen::MatrixXd x(k, 3);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < 3; ++j) x(i, j) = nd(rng);
    const Eigen::MatrixXd g = cycle_gradients(x, p);
    const Eigen::MatrixXd r = interpolation_residuals(x, g, Eigen::VectorXd::Zero(k), c);
    const Eigen::MatrixXd gram = centered_gram(x);
    for (int i = 1; i < k; ++i) {
        const double lifted = (gram.cwiseProduct(lifts[static_cast<std::size_t>(i - 1)])).sum();
        const double direct = r(i, 0);
        if (std::abs(lifted - direct) > 1e-9 * (1.0 + std::abs(direct))) {
            std::ostringstream os;
            os << "lifted interpolation matrix " << i << " disagrees with direct evaluation: " << lifted << " vs "
               << direct;
            throw NumericalError(os.str());
        }
    }
}

}  // namespace

Eigen::MatrixXd cycle_gradients(const Eigen::MatrixXd& points, const HbParams& p) {
    const int k = static_cast<int>(points.rows());
    if (k < 2) throw PreconditionError("need at least two cycle points");
    Eigen::MatrixXd g(points.rows(), points.cols());
    for (int t = 0; t < k; ++t)
        g.row(t) = ((1.0 + p.beta) * points.row(t) - points.row(wrap(t + 1, k)) - p.beta * points.row(wrap(t - 1, k))) /
                   p.gamma;
    return g;
}

Eigen::MatrixXd interpolation_residuals(const Eigen::MatrixXd& points, const Eigen::MatrixXd& grads,
                                        const Eigen::VectorXd& values, const FunctionClass& c) {
    validate(c);
    if (!(c.mu < c.L)) throw PreconditionError("interpolation residuals require mu < L");
    const long k = points.rows();
    if (grads.rows() != k || grads.cols() != points.cols() || values.size() != k)
        throw PreconditionError("points, gradients and values have inconsistent shapes");
    const double coef = c.mu / (2.0 * (1.0 - c.kappa()));
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(k, k);
    for (long i = 0; i < k; ++i)
        for (long j = 0; j < k; ++j) {
            if (i == j) continue;
            const Eigen::RowVectorXd dx = points.row(i) - points.row(j);
            const Eigen::RowVectorXd dg = grads.row(i) - grads.row(j);
            r(i, j) = values(j) + grads.row(j).dot(dx) + dg.squaredNorm() / (2.0 * c.L) +
                      coef * (dx - dg / c.L).squaredNorm() - values(i);
        }
    return r;
}

std::optional<Eigen::VectorXd> interpolating_values(const Eigen::MatrixXd& points, const Eigen::MatrixXd& grads,
                                                    const FunctionClass& c, double tol) {
    const long k = points.rows();
    // w(i, j): required lower bound on f_i - f_j.
    const Eigen::MatrixXd w = interpolation_residuals(points, grads, Eigen::VectorXd::Zero(k), c);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(k);
    for (long pass = 0; pass <= k; ++pass) {
        bool changed = false;
        for (long i = 0; i < k; ++i)
            for (long j = 0; j < k; ++j)
                if (i != j && f(j) + w(i, j) > f(i) + tol) {
                    f(i) = f(j) + w(i, j);
                    changed = true;
                }
        if (!changed) return f;
    }
    return std::nullopt;
}

Eigen::MatrixXd centered_gram(const Eigen::MatrixXd& points) {
    const Eigen::RowVectorXd mean = points.colwise().mean();
    const Eigen::MatrixXd xc = points.rowwise() - mean;
    return xc * xc.transpose();
}

Eigen::MatrixXd symmetrize_gram(const Eigen::MatrixXd& g0) {
    const long k = g0.rows();
    if (g0.cols() != k || k < 1) throw PreconditionError("Gram matrix must be square");
    const double scale = std::max(1.0, g0.cwiseAbs().maxCoeff());
    if ((g0 - g0.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw PreconditionError("Gram matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g0, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9 * scale) throw PreconditionError("Gram matrix must be positive semidefinite");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(k, k);
    for (long s = 0; s < k; ++s)
        for (long i = 0; i < k; ++i)
            for (long j = 0; j < k; ++j) out(i, j) += g0((i + s) % k, (j + s) % k);
    return out / static_cast<double>(k);
}

Eigen::MatrixXd harmonic_gram(int k, int l) {
    if (k < 2 || l < 0 || l > k / 2) throw PreconditionError("harmonic index out of range");
    Eigen::MatrixXd h(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) h(i, j) = std::cos(2.0 * std::numbers::pi * l * std::abs(i - j) / k);
    return h;
}

Eigen::VectorXd decompose_circulant(const Eigen::MatrixXd& g) {
    const int k = static_cast<int>(g.rows());
    if (g.cols() != k || k < 2) throw PreconditionError("matrix must be square");
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (std::abs(g(i, j) - g(0, wrap(j - i, k))) > 1e-10 * scale || std::abs(g(i, j) - g(j, i)) > 1e-10 * scale)
                throw PreconditionError("matrix is not symmetric circulant");
    const int n = k / 2;
    Eigen::VectorXd w(n);
    for (int l = 1; l <= n; ++l) {
        double lam = 0.0;
        for (int j = 0; j < k; ++j) lam += g(0, j) * std::cos(2.0 * std::numbers::pi * j * l / k);
        const bool half = (2 * l == k);
        w(l - 1) = (half ? 1.0 : 2.0) * lam / k;
    }
    if (w.size() > 0 && w.minCoeff() < -1e-9 * scale)
        throw NumericalError("circulant matrix has a negative harmonic weight; not decomposable");
    return w.cwiseMax(0.0);
}

std::vector<Eigen::MatrixXd> lift_matrices(const HbParams& p, const FunctionClass& c, int k) {
    check_lp_args(p, c, k);
    auto lifts = build_lifts(p, c, k);
    self_test_lifts(lifts, p, c, k);
    return lifts;
}

Eigen::MatrixXd reconstruct_points(const Eigen::VectorXd& nu, int k) {
    const int n = k / 2;
    if (nu.size() != n) throw PreconditionError("weight vector length must be floor(K/2)");
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(k, k - 1);
    int col = 0;
    for (int l = 1; l <= n; ++l) {
        const double s = std::sqrt(std::max(0.0, nu(l - 1)));
        if (2 * l == k) {
            for (int t = 0; t < k; ++t) x(t, col) = (t % 2 == 0 ? s : -s);
            col += 1;
        } else {
            for (int t = 0; t < k; ++t) {
                const double a = 2.0 * std::numbers::pi * l * t / k;
                x(t, col) = s * std::cos(a);
                x(t, col + 1) = s * std::sin(a);
            }
            col += 2;
        }
    }
    return x;
}

LpResult lp_feasible(const HbParams& p, const FunctionClass& c, int k) {
    const auto lifts = lift_matrices(p, c, k);
    const int n = k / 2, m = k - 1;
    Eigen::MatrixXd pm(m, n);
    for (int i = 0; i < m; ++i)
        for (int l = 1; l <= n; ++l) pm(i, l - 1) = (lifts[static_cast<std::size_t>(i)].cwiseProduct(harmonic_gram(k, l))).sum();
    const double scale = std::max(1e-300, pm.cwiseAbs().maxCoeff());

    // Variables: nu_1..nu_n, t+, t-.
    LinearProgram lp;
    lp.a = Eigen::MatrixXd::Zero(m + 1, n + 2);
    lp.b = Eigen::VectorXd::Zero(m + 1);
    lp.c = Eigen::VectorXd::Zero(n + 2);
    lp.c(n) = 1.0;
    lp.c(n + 1) = -1.0;
    for (int i = 0; i < m; ++i) {
        lp.a.row(i).head(n) = pm.row(i) / scale;
        lp.a(i, n) = -1.0;
        lp.a(i, n + 1) = 1.0;
        lp.sense.push_back(RowSense::LessEqual);
    }
    lp.a.row(m).head(n).setOnes();
    lp.b(m) = 1.0;
    lp.sense.push_back(RowSense::Equal);
    const LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal)
        throw SolverError(std::string("cycle LP did not reach an optimum: ") +
                          (sol.status == LpStatus::Infeasible ? "infeasible" : "unbounded") + " (gamma " +
                          std::to_string(p.gamma) + ", beta " + std::to_string(p.beta) + ", K " + std::to_string(k) + ")");

    LpResult res;
    res.k = k;
    res.iterations = sol.iterations;
    res.nu = sol.x.head(n).cwiseMax(0.0);
    res.nu /= res.nu.sum();
    res.t_star = (pm * res.nu).maxCoeff();
    res.feasible = res.t_star <= kLpFeasTol;
    if (res.feasible) {
        res.points = reconstruct_points(res.nu, k);
        const Eigen::MatrixXd g = cycle_gradients(res.points, p);
        const Eigen::MatrixXd r = interpolation_residuals(res.points, g, Eigen::VectorXd::Zero(k), c);
        res.certificate_residual = std::max(0.0, r.maxCoeff());
    }
    return res;
}

std::optional<int> lp_member_any(const HbParams& p, const FunctionClass& c, int k_max) {
    for (int k = 3; k <= k_max; ++k)
        if (lp_feasible(p, c, k).feasible) return k;
    return std::nullopt;
}

}  // namespace hbcycle
