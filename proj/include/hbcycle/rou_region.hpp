#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hbcycle/types.hpp"

namespace hbcycle {

using Vec2 = Eigen::Vector2d;

// K-th roots of unity cycle in the plane.
struct RouCycle {
    int k;
    double theta;
    Vec2 point(long t) const;
    Eigen::Matrix2d rotation() const;
};

RouCycle make_rou_cycle(int k);

struct PolyRoots {
    double gamma_minus;  // NaN when the discriminant is negative
    double gamma_plus;
    double beta_minus;   // momentum threshold making the discriminant vanish
    double a;
    double b;
};

// P(gamma) = (mu gamma)^2 - 2 A (mu gamma) + C, with K-cycle membership iff P <= 0.
double membership_polynomial(const HbParams& p, int k, const FunctionClass& c);
PolyRoots membership_roots(double beta, int k, const FunctionClass& c);
double beta_minus(int k, const FunctionClass& c);

// Alternative closed form of beta_minus(k) - cos(2 pi / k).
double beta_minus_gap(int k, const FunctionClass& c);

bool in_convergence_region(const HbParams& p, const FunctionClass& c);

// Convergence region closed on the edge gamma = 2 (1 + beta) / L.
bool in_cycle_window(const HbParams& p, const FunctionClass& c);

bool rou_member(const HbParams& p, int k, const FunctionClass& c);

// Smallest k in [3, k_max] whose roots-of-unity cycle is admissible.
std::optional<int> rou_member_any(const HbParams& p, const FunctionClass& c, int k_max = 100);

// Same membership question answered through the single interval gamma >= gamma_-(K),
// valid for small kappa.
bool rou_member_any_interval(const HbParams& p, const FunctionClass& c, int k_max = 100);

// Convex polygon with counter-clockwise vertices.
class ConvexPolygon {
public:
    explicit ConvexPolygon(std::vector<Vec2> vertices);
    const std::vector<Vec2>& vertices() const { return v_; }
    Vec2 project(const Vec2& x) const;
    bool contains(const Vec2& x) const;
    double boundary_distance(const Vec2& x) const;

private:
    std::vector<Vec2> v_;
};

struct PsiEval {
    double value;
    Vec2 grad;
};

class CounterExample {
public:
    CounterExample(const HbParams& p, const FunctionClass& c, int k);

    PsiEval eval(const Vec2& x) const;
    double value(const Vec2& x) const { return eval(x).value; }
    Vec2 grad(const Vec2& x) const { return eval(x).grad; }

    const ConvexPolygon& hull() const { return hull_; }
    const RouCycle& cycle() const { return cycle_; }
    const Eigen::Matrix2d& m() const { return m_; }
    const HbParams& params() const { return p_; }
    const FunctionClass& function_class() const { return c_; }
    double r_max() const { return r_max_; }

    // Gradient of psi at cycle point t, equal to the cycle-forced gradient.
    Vec2 cycle_gradient(long t) const;

    // Distance from x to the nearest boundary between the smooth pieces of psi.
    double piece_boundary_distance(const Vec2& x) const;

private:
    HbParams p_;
    FunctionClass c_;
    RouCycle cycle_;
    Eigen::Matrix2d m_;
    ConvexPolygon hull_;
    double r_max_;
};

struct GridSpec {
    int n_gamma = 300;
    int n_beta = 300;
};

// Checks that every grid point of the sublevel set at rate (1 - C kappa)/(1 + C kappa)
// admits a roots-of-unity cycle.
struct ScanResult {
    bool empty;
    long sublevel_points;
    long violations;
    double rho;
};

ScanResult incompatibility_scan(const FunctionClass& c, double C, const GridSpec& grid, int k_max = 100);

}  // namespace hbcycle
