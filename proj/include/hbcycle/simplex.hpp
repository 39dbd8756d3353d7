#pragma once

#include <vector>

#include <Eigen/Dense>

namespace hbcycle {

enum class RowSense { LessEqual, Equal, GreaterEqual };

// minimize c'x subject to A x (sense) b, x >= 0.
struct LinearProgram {
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    Eigen::VectorXd c;
    std::vector<RowSense> sense;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status;
    Eigen::VectorXd x;
    double objective;
    int iterations;
};

// Dense two-phase simplex with Bland's anti-cycling rule.
LpSolution solve_lp(const LinearProgram& lp, int max_iterations = 10000);

}  // namespace hbcycle
