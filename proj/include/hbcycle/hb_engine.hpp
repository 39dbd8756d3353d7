#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hbcycle/rou_region.hpp"
#include "hbcycle/types.hpp"

namespace hbcycle {

using GradOracle = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct SimTrace {
    std::vector<Eigen::VectorXd> iterates;  // x_0, x_1, ..., x_{steps+1}
    std::vector<HbParams> params_used;      // entry i is the step taken from x_{i+1}
    long grad_calls = 0;
    bool diverged = false;  // non-finite iterate encountered; trace truncated there
};

SimTrace run(const GradOracle& oracle, const HbParams& p, const Eigen::VectorXd& x0, const Eigen::VectorXd& x1,
             long steps);

struct CycleReport {
    bool is_cycle;
    double max_deviation;  // max over the tail of |z_t - z_{t-K}|
    double tail_diameter;
};

// Burn-in defaults to half the trace.
CycleReport detect_cycle(const SimTrace& trace, int k, double tol, long burn_in = -1);

// Rate from a least-squares fit of log |(z_t, z_{t-1}) - (x*, x*)| over the tail half.
double estimate_rate(const SimTrace& trace, const Eigen::VectorXd& reference);
double estimate_rate(const std::vector<Eigen::VectorXd>& seq, const Eigen::VectorXd& reference);

enum class JordanCase { Real, Complex, Boundary };

struct StabilityConstants {
    JordanCase kind;
    Eigen::Matrix2cd p;  // T = P D P^{-1}
    Eigen::Matrix2cd d;
    double kappa_p;      // 1 / (|P| |P^{-1}|)
    double rho_d;        // operator norm of D
};

// Decomposition of the residual recursion delta_{t+1} = (1 + beta - gamma mu) delta_t - beta delta_{t-1}.
StabilityConstants stability_constants(const HbParams& p, double mu, double epsilon = -1.0);

enum class NoiseMode { Uniform, Adversarial };

struct NoiseSpec {
    double init_radius = 0.0;   // |(delta_0, delta_1)| as a fraction of kappa_P r_max
    double gamma_jitter = 0.0;  // |delta gamma_t| bound
    double beta_jitter = 0.0;   // |delta beta_t| bound
    double grad_noise = 0.0;    // |delta g_t| bound
    NoiseMode mode = NoiseMode::Uniform;
    std::uint64_t seed = 1;
    bool strict = false;        // reject specs violating the guaranteed-tube conditions
};

// Largest per-channel noise levels for which the tube guarantee applies
// (each channel gets half of the budget it shares).
NoiseSpec guaranteed_noise(const CounterExample& ce, double init_fraction = 0.9, double epsilon = -1.0);

// Violated guarantee conditions for this spec; empty when compliant.
std::vector<std::string> tube_violations(const CounterExample& ce, const NoiseSpec& noise, double epsilon = -1.0);

struct PerturbedResult {
    SimTrace trace;
    std::vector<Eigen::Vector2d> residuals;  // z_t - x_t
    double max_residual;
    bool stayed_in_tube;
    double residual_decay_rate;  // NaN when fewer than 8 residuals sit above the noise floor
    StabilityConstants stability;
};

PerturbedResult perturbed_run(const CounterExample& ce, const NoiseSpec& noise, long steps, double epsilon = -1.0);

}  // namespace hbcycle
