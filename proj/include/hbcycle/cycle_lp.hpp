/**
 * Existence of K-cycles of heavy-ball on smooth strongly convex functions,
 * decided by a small linear program over circulant Gram matrices.
 *
 * Points are stored row-wise: row t is x_t.
 */
#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hbcycle/types.hpp"

namespace hbcycle {

inline constexpr double kLpFeasTol = 1e-9;

// g_t = ((1 + beta) x_t - x_{t+1} - beta x_{t-1}) / gamma, indices modulo K.
Eigen::MatrixXd cycle_gradients(const Eigen::MatrixXd& points, const HbParams& p);

// r(i, j) = f_j + <g_j, x_i - x_j> + |g_i - g_j|^2 / 2L
//           + mu / (2 (1 - kappa)) |x_i - g_i / L - x_j + g_j / L|^2 - f_i.
// The data interpolate the class iff every entry is <= 0.
Eigen::MatrixXd interpolation_residuals(const Eigen::MatrixXd& points, const Eigen::MatrixXd& grads,
                                        const Eigen::VectorXd& values, const FunctionClass& c);

// Function values making the residuals nonpositive, if any exist.
std::optional<Eigen::VectorXd> interpolating_values(const Eigen::MatrixXd& points, const Eigen::MatrixXd& grads,
                                                    const FunctionClass& c, double tol = 1e-12);

Eigen::MatrixXd centered_gram(const Eigen::MatrixXd& points);

// Average of J^{-s} G J^s over cyclic shifts J.
Eigen::MatrixXd symmetrize_gram(const Eigen::MatrixXd& g0);

// H_l(i, j) = cos(2 pi l |i - j| / K).
Eigen::MatrixXd harmonic_gram(int k, int l);

// Nonnegative weights w_l (l = 1..floor(K/2), stored at index l-1) with G = sum w_l H_l.
Eigen::VectorXd decompose_circulant(const Eigen::MatrixXd& g);

// Symmetric M_i with <G, M_i> equal to the right-hand side of the interpolation
// inequality between x_i and x_0 for cycle-forced gradients, i = 1..K-1.
std::vector<Eigen::MatrixXd> lift_matrices(const HbParams& p, const FunctionClass& c, int k);

struct LpResult {
    int k = 0;
    bool feasible = false;
    double t_star = 0.0;
    Eigen::VectorXd nu;          // harmonic weights, sum 1
    Eigen::MatrixXd points;      // K x (K-1) certificate, empty when infeasible
    double certificate_residual = 0.0;
    int iterations = 0;
};

LpResult lp_feasible(const HbParams& p, const FunctionClass& c, int k);

// Smallest K in [3, k_max] with a feasible cycle LP.
std::optional<int> lp_member_any(const HbParams& p, const FunctionClass& c, int k_max);

// Points of a cycle with the given harmonic weights.
Eigen::MatrixXd reconstruct_points(const Eigen::VectorXd& nu, int k);

}  // namespace hbcycle
