#include "hbcycle/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hbcycle/types.hpp"

namespace hbcycle {

namespace {

constexpr double kPivotTol = 1e-11;

// Tableau rows 0..m-1 are constraints, the last column is the right-hand side.
struct Tableau {
    Eigen::MatrixXd t;
    std::vector<int> basis;
    int iterations = 0;

    int rows() const { return static_cast<int>(basis.size()); }
    int rhs() const { return static_cast<int>(t.cols()) - 1; }

    void pivot(int r, int col) {
        t.row(r) /= t(r, col);
        for (int i = 0; i < t.rows(); ++i)
            if (i != r && t(i, col) != 0.0) t.row(i) -= t(i, col) * t.row(r);
        basis[static_cast<std::size_t>(r)] = col;
    }

    // Minimises the objective stored in row `obj` (reduced costs) over columns < ncols.
    LpStatus run(int obj, int ncols, int max_iterations) {
        for (;;) {
            int enter = -1;
            for (int j = 0; j < ncols; ++j)
                if (t(obj, j) < -kPivotTol) {
                    enter = j;
                    break;
                }
            if (enter < 0) return LpStatus::Optimal;
            int leave = -1;
            double best = std::numeric_limits<double>::infinity();
            double colmax = 0.0;
            for (int i = 0; i < rows(); ++i) colmax = std::max(colmax, t(i, enter));
            const double ptol = std::max(kPivotTol, 1e-9 * colmax);
            for (int i = 0; i < rows(); ++i) {
                if (t(i, enter) <= ptol) continue;
                // Round-off can push degenerate right-hand sides slightly negative.
                const double ratio = std::max(0.0, t(i, rhs())) / t(i, enter);
                const bool tie = leave >= 0 && std::abs(ratio - best) <= 1e-13 * (1.0 + best);
                if (leave < 0 || (!tie && ratio < best) ||
                    (tie && basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
                    best = std::min(best, ratio);
                    leave = i;
                }
            }
            if (leave < 0) return LpStatus::Unbounded;
            if (++iterations > max_iterations) {
                std::ostringstream os;
                os << "simplex iteration cap " << max_iterations << " reached (rows " << rows() << ", cols " << ncols
                   << ", objective " << -t(obj, rhs()) << ")";
                throw SolverError(os.str());
            }
            pivot(leave, enter);
        }
    }
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, int max_iterations) {
    const int m = static_cast<int>(lp.a.rows()), n = static_cast<int>(lp.a.cols());
    if (lp.b.size() != m || lp.c.size() != n || static_cast<int>(lp.sense.size()) != m)
        throw PreconditionError("linear program dimensions are inconsistent");

    // Normalise to nonnegative right-hand sides.
    Eigen::MatrixXd a = lp.a;
    Eigen::VectorXd b = lp.b;
    std::vector<RowSense> sense = lp.sense;
    for (int i = 0; i < m; ++i) {
        if (b(i) < 0.0) {
            a.row(i) *= -1.0;
            b(i) = -b(i);
            if (sense[static_cast<std::size_t>(i)] == RowSense::LessEqual)
                sense[static_cast<std::size_t>(i)] = RowSense::GreaterEqual;
            else if (sense[static_cast<std::size_t>(i)] == RowSense::GreaterEqual)
                sense[static_cast<std::size_t>(i)] = RowSense::LessEqual;
        }
    }

    int n_slack = 0, n_art = 0;
    for (auto s : sense) {
        if (s != RowSense::Equal) ++n_slack;
        if (s != RowSense::LessEqual) ++n_art;
    }
    const int cols = n + n_slack + n_art;
    Tableau tb;
    tb.t = Eigen::MatrixXd::Zero(m + 2, cols + 1);
    tb.basis.assign(static_cast<std::size_t>(m), -1);
    const int obj = m, aux = m + 1;
    int sl = n, ar = n + n_slack;
    for (int i = 0; i < m; ++i) {
        tb.t.row(i).head(n) = a.row(i);
        tb.t(i, cols) = b(i);
        const RowSense s = sense[static_cast<std::size_t>(i)];
        if (s == RowSense::LessEqual) {
            tb.t(i, sl) = 1.0;
            tb.basis[static_cast<std::size_t>(i)] = sl++;
        } else {
            if (s == RowSense::GreaterEqual) tb.t(i, sl++) = -1.0;
            tb.t(i, ar) = 1.0;
            tb.basis[static_cast<std::size_t>(i)] = ar++;
        }
    }
    tb.t.row(obj).head(n) = lp.c.transpose();

    // Phase one: minimise the sum of artificials.
    if (n_art > 0) {
        for (int j = n + n_slack; j < cols; ++j) tb.t(aux, j) = 1.0;
        for (int i = 0; i < m; ++i)
            if (tb.basis[static_cast<std::size_t>(i)] >= n + n_slack) tb.t.row(aux) -= tb.t.row(i);
        tb.run(aux, cols, max_iterations);
        const double scale = 1.0 + b.cwiseAbs().maxCoeff();
        if (-tb.t(aux, cols) > 1e-9 * scale)
            return {LpStatus::Infeasible, Eigen::VectorXd::Zero(n), std::numeric_limits<double>::quiet_NaN(),
                    tb.iterations};
        // Drive remaining artificials out of the basis.
        for (int i = 0; i < m; ++i) {
            if (tb.basis[static_cast<std::size_t>(i)] < n + n_slack) continue;
            for (int j = 0; j < n + n_slack; ++j)
                if (std::abs(tb.t(i, j)) > kPivotTol) {
                    tb.pivot(i, j);
                    break;
                }
        }
    }
    for (int i = 0; i < m; ++i) {
        const int bj = tb.basis[static_cast<std::size_t>(i)];
        if (bj < n + n_slack && tb.t(obj, bj) != 0.0) tb.t.row(obj) -= tb.t(obj, bj) * tb.t.row(i);
    }
    // Artificial columns are excluded from entering in phase two.
    const LpStatus st = tb.run(obj, n + n_slack, max_iterations);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i) {
        const int bj = tb.basis[static_cast<std::size_t>(i)];
        if (bj < n) x(bj) = tb.t(i, cols);
    }
    return {st, x, st == LpStatus::Optimal ? lp.c.dot(x) : -std::numeric_limits<double>::infinity(),
            tb.iterations};
}

}  // namespace hbcycle
