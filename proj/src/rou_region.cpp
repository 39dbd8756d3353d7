#include "hbcycle/rou_region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hbcycle/quad_rates.hpp"

namespace hbcycle {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPolyTol = 1e-12;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double segment_distance(const Vec2& x, const Vec2& a, const Vec2& b, Vec2* closest = nullptr) {
    const Vec2 d = b - a;
    const double t = std::clamp((x - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
    const Vec2 q = a + t * d;
    if (closest) *closest = q;
    return (x - q).norm();
}

double ray_distance(const Vec2& x, const Vec2& origin, const Vec2& dir) {
    const double t = std::max(0.0, (x - origin).dot(dir) / dir.squaredNorm());
    return (x - origin - t * dir).norm();
}

void check_k(int k) {
    if (k < 2) throw PreconditionError("cycle length must be at least 2");
}

}  // namespace

Vec2 RouCycle::point(long t) const {
    const long r = ((t % k) + k) % k;
    const double a = theta * static_cast<double>(r);
    return {std::cos(a), std::sin(a)};
}

Eigen::Matrix2d RouCycle::rotation() const {
    Eigen::Matrix2d r;
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return r;
}

RouCycle make_rou_cycle(int k) {
    check_k(k);
    return {k, 2.0 * std::numbers::pi / k};
}

double membership_polynomial(const HbParams& p, int k, const FunctionClass& c) {
    validate(c);
    check_k(k);
    if (!(p.beta >= 0.0) || !(p.beta < 1.0)) throw PreconditionError("membership polynomial requires beta in [0, 1)");
    const double cs = std::cos(2.0 * std::numbers::pi / k), kap = c.kappa(), b = p.beta;
    const double x = c.mu * p.gamma;
    const double a = b - cs + kap * (1.0 - b * cs);
    const double cc = 2.0 * kap * (1.0 - cs) * (1.0 + b * b - 2.0 * b * cs);
    return x * x - 2.0 * a * x + cc;
}

PolyRoots membership_roots(double beta, int k, const FunctionClass& c) {
    validate(c);
    check_k(k);
    const double cs = std::cos(2.0 * std::numbers::pi / k), kap = c.kappa();
    const double a = beta - cs + kap * (1.0 - beta * cs);
    const double disc = a * a - 2.0 * kap * (1.0 - cs) * (1.0 + beta * beta - 2.0 * beta * cs);
    PolyRoots r{kNaN, kNaN, beta_minus(k, c), a, kNaN};
    if (disc >= 0.0) {
        r.b = std::sqrt(disc);
        r.gamma_minus = (a - r.b) / c.mu;
        r.gamma_plus = (a + r.b) / c.mu;
    }
    return r;
}

double beta_minus(int k, const FunctionClass& c) {
    validate(c);
    check_k(k);
    const double cs = std::cos(2.0 * std::numbers::pi / k), kap = c.kappa();
    const double num = kap * cs * cs + (1.0 - kap) * (1.0 - kap) * cs - kap +
                       (1.0 - kap) * (1.0 - cs) * std::sqrt(2.0 * kap * (1.0 + cs));
    return num / (1.0 - 2.0 * kap + kap * kap * cs * cs);
}

double beta_minus_gap(int k, const FunctionClass& c) {
    validate(c);
    check_k(k);
    const double cs = std::cos(2.0 * std::numbers::pi / k), kap = c.kappa(), sk = std::sqrt(kap);
    const double root = std::sqrt(2.0 * kap * (1.0 + cs));
    return sk * (1.0 - cs) * ((1.0 + cs) * sk + std::sqrt(2.0 * (1.0 + cs))) / (1.0 + kap * cs + root);
}

bool in_convergence_region(const HbParams& p, const FunctionClass& c) {
    return p.beta > -1.0 && p.beta < 1.0 && p.gamma > 0.0 && p.gamma < 2.0 * (1.0 + p.beta) / c.L;
}

bool in_cycle_window(const HbParams& p, const FunctionClass& c) {
    return p.beta > -1.0 && p.beta < 1.0 && p.gamma > 0.0 && p.gamma <= 2.0 * (1.0 + p.beta) / c.L * (1.0 + 1e-12);
}

bool rou_member(const HbParams& p, int k, const FunctionClass& c) {
    validate(c);
    check_k(k);
    if (!(p.beta >= 0.0)) return false;
    // K = 2 only touches the closed edge, where the quadratic rate is already 1.
    if (k == 2) return in_convergence_region(p, c) && membership_polynomial(p, k, c) <= kPolyTol;
    if (!in_cycle_window(p, c)) return false;
    return membership_polynomial(p, k, c) <= kPolyTol;
}

std::optional<int> rou_member_any(const HbParams& p, const FunctionClass& c, int k_max) {
    if (k_max < 3) throw PreconditionError("k_max must be at least 3");
    validate(c);
    if (!(p.beta >= 0.0) || !in_cycle_window(p, c)) return std::nullopt;
    for (int k = 3; k <= k_max; ++k)
        if (membership_polynomial(p, k, c) <= kPolyTol) return k;
    return std::nullopt;
}

bool rou_member_any_interval(const HbParams& p, const FunctionClass& c, int k_max) {
    if (k_max < 3) throw PreconditionError("k_max must be at least 3");
    validate(c);
    if (!(p.beta >= 0.0) || !in_cycle_window(p, c)) return false;
    for (int k = 3; k <= k_max; ++k) {
        if (p.beta < beta_minus(k, c) - 1e-15) continue;
        const PolyRoots r = membership_roots(p.beta, k, c);
        if (std::isnan(r.gamma_minus)) continue;
        if (p.gamma >= r.gamma_minus * (1.0 - 1e-13)) return true;
    }
    return false;
}

ConvexPolygon::ConvexPolygon(std::vector<Vec2> vertices) : v_(std::move(vertices)) {
    const std::size_t n = v_.size();
    if (n < 3) throw PreconditionError("polygon needs at least three vertices");
    double scale = 0.0;
    for (const auto& v : v_) scale = std::max(scale, v.norm());
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e0 = v_[(i + 1) % n] - v_[i];
        const Vec2 e1 = v_[(i + 2) % n] - v_[(i + 1) % n];
        if (!(cross(e0, e1) > 1e-14 * scale * scale))
            throw NumericalError("polygon vertices are not in strictly convex counter-clockwise position");
    }
}

bool ConvexPolygon::contains(const Vec2& x) const {
    const std::size_t n = v_.size();
    for (std::size_t i = 0; i < n; ++i)
        if (cross(v_[(i + 1) % n] - v_[i], x - v_[i]) < 0.0) return false;
    return true;
}

Vec2 ConvexPolygon::project(const Vec2& x) const {
    if (contains(x)) return x;
    const std::size_t n = v_.size();
    Vec2 best = v_[0];
    double dbest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 q;
        const double d = segment_distance(x, v_[i], v_[(i + 1) % n], &q);
        if (d < dbest) {
            dbest = d;
            best = q;
        }
    }
    return best;
}

double ConvexPolygon::boundary_distance(const Vec2& x) const {
    double d = std::numeric_limits<double>::infinity();
    const std::size_t n = v_.size();
    for (std::size_t i = 0; i < n; ++i) d = std::min(d, segment_distance(x, v_[i], v_[(i + 1) % n]));
    return d;
}

namespace {

Eigen::Matrix2d hull_map(const HbParams& p, const FunctionClass& c, const RouCycle& cyc) {
    validate(c);
    if (cyc.k < 3 || !(c.L > c.mu) || !(p.gamma > 0.0))
        throw PreconditionError("counterexample requires K >= 3, mu < L and gamma > 0");
    const Eigen::Matrix2d r = cyc.rotation();
    const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
    return ((1.0 + p.beta - c.mu * p.gamma) * id - r - p.beta * r.transpose()) / ((c.L - c.mu) * p.gamma);
}

std::vector<Vec2> hull_vertices(const Eigen::Matrix2d& m, const RouCycle& cyc) {
    std::vector<Vec2> v;
    for (int t = 0; t < cyc.k; ++t) v.push_back(m * cyc.point(t));
    return v;
}

std::vector<Vec2> checked_vertices(const HbParams& p, const FunctionClass& c, int k, const Eigen::Matrix2d& m,
                                   const RouCycle& cyc) {
    if (!rou_member(p, k, c)) {
        const double pv = p.beta >= 0.0 && p.beta < 1.0 ? membership_polynomial(p, k, c) : kNaN;
        throw PreconditionError("parameters admit no roots-of-unity cycle of length " + std::to_string(k) +
                                " (P(gamma) = " + std::to_string(pv) + ")");
    }
    return hull_vertices(m, cyc);
}

}  // namespace

CounterExample::CounterExample(const HbParams& p, const FunctionClass& c, int k)
    : p_(p),
      c_(c),
      cycle_(make_rou_cycle(k)),
      m_(hull_map(p, c, cycle_)),
      hull_(checked_vertices(p, c, k, m_, cycle_)),
      r_max_(0.0) {
    const Vec2 x0 = cycle_.point(0), x1 = cycle_.point(1);
    const Vec2 e = m_ * (x1 - x0);
    r_max_ = -((x0 - m_ * x0).dot(e / e.norm()));
    if (r_max_ < 0.0) r_max_ = 0.0;
}

PsiEval CounterExample::eval(const Vec2& x) const {
    const Vec2 pr = hull_.project(x);
    const Vec2 d = x - pr;
    return {0.5 * c_.L * x.squaredNorm() - 0.5 * (c_.L - c_.mu) * d.squaredNorm(), c_.L * x - (c_.L - c_.mu) * d};
}

Vec2 CounterExample::cycle_gradient(long t) const {
    return ((1.0 + p_.beta) * cycle_.point(t) - cycle_.point(t + 1) - p_.beta * cycle_.point(t - 1)) / p_.gamma;
}

double CounterExample::piece_boundary_distance(const Vec2& x) const {
    const auto& v = hull_.vertices();
    const std::size_t n = v.size();
    double d = hull_.boundary_distance(x);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e = v[(i + 1) % n] - v[i];
        const Vec2 normal(e.y(), -e.x());
        d = std::min(d, ray_distance(x, v[i], normal));
        d = std::min(d, ray_distance(x, v[(i + 1) % n], normal));
    }
    return d;
}

ScanResult incompatibility_scan(const FunctionClass& c, double C, const GridSpec& grid, int k_max) {
    validate(c);
    if (grid.n_gamma < 2 || grid.n_beta < 2) throw PreconditionError("scan grid needs at least 2x2 points");
    const double k = c.kappa();
    const double rho = (1.0 - C * k) / (1.0 + C * k);
    ScanResult res{true, 0, 0, rho};
    if (rho < optimal_tuning(c).rho) return res;
    const LevelSet ls = level_set(rho, c);
    double g_lo = std::numeric_limits<double>::infinity(), g_hi = 0.0;
    double b_lo = std::numeric_limits<double>::infinity(), b_hi = -1.0;
    for (const auto& s : ls.segments) {
        g_lo = std::min({g_lo, s.gamma0, s.gamma1});
        g_hi = std::max({g_hi, s.gamma0, s.gamma1});
        b_lo = std::min({b_lo, s.beta0, s.beta1});
        b_hi = std::max({b_hi, s.beta0, s.beta1});
    }
    b_lo = std::max(b_lo, 0.0);
    for (int i = 0; i < grid.n_gamma; ++i) {
        const double g = g_lo + (g_hi - g_lo) * i / (grid.n_gamma - 1);
        for (int j = 0; j < grid.n_beta; ++j) {
            const HbParams p{g, b_lo + (b_hi - b_lo) * j / (grid.n_beta - 1)};
            if (!sublevel_contains(p, c, rho)) continue;
            ++res.sublevel_points;
            if (!rou_member_any(p, c, k_max)) ++res.violations;
        }
    }
    res.empty = res.violations == 0;
    return res;
}

}  // namespace hbcycle
