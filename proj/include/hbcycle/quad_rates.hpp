/**
 * Worst-case linear rates of heavy-ball on quadratics with Hessian
 * spectrum in [mu, L], optimal tunings and rate level sets.
 */
#pragma once

#include <array>
#include <string>

#include "hbcycle/types.hpp"

namespace hbcycle {

enum class Region { Lazy, Robust, KnifeEdge, NoConvergence };

std::string region_name(Region r);

struct RateResult {
    double rho = 1.0;  // NaN when region == NoConvergence
    Region region = Region::NoConvergence;
};

struct Tuning {
    double gamma = 0.0;
    double beta = 0.0;
    double rho = 0.0;
};

// One side of the rate level-set triangle, parameterised by a single segment.
struct Segment {
    Region region;
    double beta0, gamma0;
    double beta1, gamma1;
};

struct LevelSet {
    double rho;
    std::array<Segment, 3> segments;  // lazy, robust, knife
};

inline constexpr double kBoundaryTol = 1e-12;

RateResult rate_on_quadratics(const HbParams& p, const FunctionClass& c);

// Spectral radius of the 2x2 heavy-ball transfer matrix at curvature lambda.
double spectral_radius(const HbParams& p, double lambda);

Tuning optimal_tuning(const FunctionClass& c);

LevelSet level_set(double rho, const FunctionClass& c);

// Points on a level set, sampled uniformly along each segment.
std::array<double, 2> level_set_point(const LevelSet& ls, int segment, double s);

bool sublevel_contains(const HbParams& p, const FunctionClass& c, double rho);

bool ghadimi_contains(const HbParams& p, const FunctionClass& c);

Tuning ghadimi_optimum(const FunctionClass& c);

// Reference rates for comparison tables.
struct ReferenceRates {
    double gd_one_over_L;
    double gd_two_over_sum;
    double hb_quadratic;
    double nag_strongly_convex;
    double nag_quadratic;
    double item;
    double tmm;
    double lower_bound_strongly_convex;
    double lower_bound_quadratic;
    double hb_ghadimi;
};

ReferenceRates reference_rates(const FunctionClass& c);

}  // namespace hbcycle
