#include "hbcycle/quad_rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hbcycle {

void validate(const FunctionClass& c) {
    if (!(c.mu > 0.0) || !(c.L >= c.mu) || !std::isfinite(c.L))
        throw PreconditionError("function class requires 0 < mu <= L");
}

std::string region_name(Region r) {
    switch (r) {
        case Region::Lazy: return "Lazy";
        case Region::Robust: return "Robust";
        case Region::KnifeEdge: return "KnifeEdge";
        case Region::NoConvergence: return "NoConvergence";
    }
    return "?";
}

namespace {

double nan_sqrt(double v) { return v < 0.0 ? std::numeric_limits<double>::quiet_NaN() : std::sqrt(v); }

// min/max that skip NaN operands.
double fmin_nan(double a, double b) { return std::fmin(a, b); }
double fmax_nan(double a, double b) { return std::fmax(a, b); }

double upper_root(double half_trace, double det) {
    return half_trace + std::sqrt(std::max(0.0, half_trace * half_trace - det));
}

}  // namespace

double spectral_radius(const HbParams& p, double lambda) {
    const double a = 1.0 + p.beta - p.gamma * lambda;
    const double disc = a * a / 4.0 - p.beta;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        return std::max(std::abs(a / 2.0 + s), std::abs(a / 2.0 - s));
    }
    return std::sqrt(p.beta);
}

RateResult rate_on_quadratics(const HbParams& p, const FunctionClass& c) {
    validate(c);
    const double g = p.gamma, b = p.beta, mu = c.mu, L = c.L;
    const double tol = kBoundaryTol;
    if (!(g > 0.0) || !(std::abs(b) < 1.0) || !(g / (1.0 + b) < 2.0 / L - tol))
        return {std::numeric_limits<double>::quiet_NaN(), Region::NoConvergence};

    const double sb = nan_sqrt(b);
    const double lo_robust = (1.0 - sb) * (1.0 - sb) / mu;
    const double hi_robust = (1.0 + sb) * (1.0 + sb) / L;
    if (b >= 0.0 && g >= lo_robust - tol && g <= hi_robust + tol) return {sb, Region::Robust};

    const double split = 2.0 * (1.0 + b) / (L + mu);
    if (g <= fmin_nan(split, lo_robust) + tol) return {upper_root((1.0 + b - mu * g) / 2.0, b), Region::Lazy};
    if (g >= fmax_nan(split, hi_robust) - tol) return {upper_root((L * g - (1.0 + b)) / 2.0, b), Region::KnifeEdge};

    // Unreachable for a consistent partition; fall back to the spectral definition.
    const double r = std::max(spectral_radius(p, mu), spectral_radius(p, L));
    return {r, g <= split ? Region::Lazy : Region::KnifeEdge};
}

Tuning optimal_tuning(const FunctionClass& c) {
    validate(c);
    const double sk = std::sqrt(c.kappa());
    const double r = (1.0 - sk) / (1.0 + sk);
    const double beta = r * r;
    return {2.0 * (1.0 + beta) / (c.L + c.mu), beta, r};
}

LevelSet level_set(double rho, const FunctionClass& c) {
    validate(c);
    const double rstar = optimal_tuning(c).rho;
    if (!(rho >= rstar - 1e-14) || !(rho <= 1.0))
        throw PreconditionError("level set requires rho in [rho*, 1]");
    const double k = c.kappa(), mu = c.mu, L = c.L;
    const double q = (1.0 - k) / (1.0 + k);
    const double b_hi = rho * rho;
    double b_lo = (q - rho) / (1.0 / rho - q);
    if (rho == 0.0) b_lo = 0.0;
    b_lo = std::min(b_lo, b_hi);
    auto lazy = [&](double b) { return (1.0 - rho) * (1.0 - b / rho) / mu; };
    auto knife = [&](double b) { return (1.0 + rho) * (1.0 + b / rho) / L; };
    if (rho == 0.0) {
        const double g = 1.0 / mu;
        return {rho, {Segment{Region::Lazy, 0, g, 0, g}, Segment{Region::Robust, 0, g, 0, g},
                      Segment{Region::KnifeEdge, 0, g, 0, g}}};
    }
    return {rho,
            {Segment{Region::Lazy, b_lo, lazy(b_lo), b_hi, lazy(b_hi)},
             Segment{Region::Robust, b_hi, (1.0 - rho) * (1.0 - rho) / mu, b_hi, (1.0 + rho) * (1.0 + rho) / L},
             Segment{Region::KnifeEdge, b_lo, knife(b_lo), b_hi, knife(b_hi)}}};
}

std::array<double, 2> level_set_point(const LevelSet& ls, int segment, double s) {
    const Segment& sg = ls.segments.at(static_cast<std::size_t>(segment));
    return {sg.gamma0 + s * (sg.gamma1 - sg.gamma0), sg.beta0 + s * (sg.beta1 - sg.beta0)};
}

bool sublevel_contains(const HbParams& p, const FunctionClass& c, double rho) {
    if (!(rho >= 0.0) || !(rho <= 1.0)) throw PreconditionError("sublevel set requires rho in [0, 1]");
    const RateResult r = rate_on_quadratics(p, c);
    return r.region != Region::NoConvergence && r.rho <= rho + kBoundaryTol;
}

bool ghadimi_contains(const HbParams& p, const FunctionClass& c) {
    validate(c);
    const double g = p.gamma, b = p.beta;
    if (!(g > 0.0) || !(g < 2.0 / c.L) || !(b >= 0.0)) return false;
    const double h = c.mu * g / 2.0;
    return b < 0.5 * (h + std::sqrt(h * h + 4.0 * (1.0 - c.L * g / 2.0)));
}

Tuning ghadimi_optimum(const FunctionClass& c) {
    validate(c);
    const double ki = 1.0 / c.kappa();
    const double s = std::sqrt((ki + 26.0) / 27.0);
    const double sb = std::cbrt(ki - 1.0) * (std::cbrt(s + 1.0) - std::cbrt(s - 1.0)) - 1.0;
    // Attained where the region's momentum bound crosses gamma = (1 - sqrt(beta))^2 / mu.
    return {(1.0 - sb) * (1.0 - sb) / c.mu, sb * sb, sb};
}

ReferenceRates reference_rates(const FunctionClass& c) {
    validate(c);
    const double k = c.kappa(), sk = std::sqrt(k);
    return {1.0 - k,
            (1.0 - k) / (1.0 + k),
            (1.0 - sk) / (1.0 + sk),
            std::sqrt(1.0 - sk),
            1.0 - sk,
            1.0 - sk,
            1.0 - sk,
            1.0 - sk,
            (1.0 - sk) / (1.0 + sk),
            ghadimi_optimum(c).rho};
}

}  // namespace hbcycle
