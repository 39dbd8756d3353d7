#include "hbcycle/hb_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace hbcycle {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kJordanTol = 1e-12;

double kappa_of(const Eigen::Matrix2cd& p) {
    const double tr = (p.adjoint() * p).trace().real();
    const double det = std::abs(p.determinant());
    const double h = tr / (2.0 * det);
    return h - std::sqrt(std::max(0.0, h * h - 1.0));
}

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

SimTrace run(const GradOracle& oracle, const HbParams& p, const Eigen::VectorXd& x0, const Eigen::VectorXd& x1,
             long steps) {
    if (steps < 0) throw PreconditionError("steps must be nonnegative");
    if (x0.size() != x1.size()) throw PreconditionError("initial iterates differ in dimension");
    SimTrace tr;
    tr.iterates.reserve(static_cast<std::size_t>(steps) + 2);
    tr.iterates.push_back(x0);
    tr.iterates.push_back(x1);
    for (long t = 1; t <= steps; ++t) {
        const Eigen::VectorXd& xt = tr.iterates[static_cast<std::size_t>(t)];
        const Eigen::VectorXd& xp = tr.iterates[static_cast<std::size_t>(t - 1)];
        const Eigen::VectorXd g = oracle(xt);
        ++tr.grad_calls;
        Eigen::VectorXd next = xt - p.gamma * g + p.beta * (xt - xp);
        tr.params_used.push_back(p);
        if (!all_finite(next)) {
            tr.diverged = true;
            break;
        }
        tr.iterates.push_back(std::move(next));
    }
    return tr;
}

CycleReport detect_cycle(const SimTrace& trace, int k, double tol, long burn_in) {
    const long n = static_cast<long>(trace.iterates.size());
    if (k < 1) throw PreconditionError("cycle length must be positive");
    if (n < 2L * k + 2) throw PreconditionError("trace too short for cycle detection");
    long start = burn_in < 0 ? n / 2 : burn_in;
    start = std::max<long>(start, k);
    if (start >= n) throw PreconditionError("burn-in leaves no tail");
    double dev = 0.0, diam = 0.0;
    const Eigen::VectorXd& anchor = trace.iterates[static_cast<std::size_t>(start)];
    for (long t = start; t < n; ++t) {
        const auto& z = trace.iterates[static_cast<std::size_t>(t)];
        dev = std::max(dev, (z - trace.iterates[static_cast<std::size_t>(t - k)]).norm());
        diam = std::max(diam, (z - anchor).norm());
    }
    if (trace.diverged) return {false, std::numeric_limits<double>::infinity(), diam};
    return {dev <= tol && diam > tol, dev, diam};
}

double estimate_rate(const std::vector<Eigen::VectorXd>& seq, const Eigen::VectorXd& reference) {
    std::vector<double> logs;
    for (std::size_t t = 1; t < seq.size(); ++t) {
        const double d = std::sqrt((seq[t] - reference).squaredNorm() + (seq[t - 1] - reference).squaredNorm());
        if (!(d >= 1e-300) || !std::isfinite(d)) break;
        logs.push_back(std::log(d));
    }
    const std::size_t n = logs.size();
    if (n < 4) return kNaN;
    const std::size_t first = n / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(n - first);
    for (std::size_t i = first; i < n; ++i) {
        const double x = static_cast<double>(i);
        sx += x;
        sy += logs[i];
        sxx += x * x;
        sxy += x * logs[i];
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return std::exp(slope);
}

double estimate_rate(const SimTrace& trace, const Eigen::VectorXd& reference) {
    return estimate_rate(trace.iterates, reference);
}

StabilityConstants stability_constants(const HbParams& p, double mu, double epsilon) {
    if (!(mu > 0.0)) throw PreconditionError("mu must be positive");
    const double b = p.beta;
    const double a = 1.0 + b - p.gamma * mu;
    const double disc = a * a / 4.0 - b;
    StabilityConstants sc{};
    using C = std::complex<double>;
    if (std::abs(disc) <= kJordanTol && b > 0.0) {
        const double sb = std::sqrt(b);
        const double eps = epsilon > 0.0 ? epsilon : (1.0 - b) / (2.0 * sb);
        sc.kind = JordanCase::Boundary;
        sc.p << C(sb), C(eps * sb / (1.0 + b)), C(1.0), C(-b * eps / (1.0 + b));
        sc.d << C(sb), C(sb * eps), C(0.0), C(sb);
        sc.rho_d = sb * (eps / 2.0 + std::sqrt(1.0 + eps * eps / 4.0));
    } else {
        C l1, l2;
        if (disc > 0.0) {
            sc.kind = JordanCase::Real;
            l1 = a / 2.0 + std::sqrt(disc);
            l2 = a / 2.0 - std::sqrt(disc);
            sc.rho_d = std::max(std::abs(l1), std::abs(l2));
        } else {
            sc.kind = JordanCase::Complex;
            l1 = C(a / 2.0, std::sqrt(-disc));
            l2 = std::conj(l1);
            sc.rho_d = std::sqrt(b);
        }
        sc.p << l1, l2, C(1.0), C(1.0);
        sc.d << l1, C(0.0), C(0.0), l2;
    }
    if (!(sc.rho_d < 1.0)) {
        std::ostringstream os;
        os << "residual recursion does not contract: |D| = " << sc.rho_d;
        throw NumericalError(os.str());
    }
    sc.kappa_p = kappa_of(sc.p);
    return sc;
}

namespace {

struct Budget {
    double radius;  // kappa_P r_max
    double share;   // (1 - rho_D) kappa_P r_max / 2
    StabilityConstants sc;
};

Budget budget_for(const CounterExample& ce, double epsilon) {
    const auto sc = stability_constants(ce.params(), ce.function_class().mu, epsilon);
    const double r = sc.kappa_p * ce.r_max();
    return {r, 0.5 * (1.0 - sc.rho_d) * r, sc};
}

}  // namespace

NoiseSpec guaranteed_noise(const CounterExample& ce, double init_fraction, double epsilon) {
    const Budget bg = budget_for(ce, epsilon);
    const double mu = ce.function_class().mu, g = ce.params().gamma;
    NoiseSpec ns;
    ns.init_radius = init_fraction;
    ns.gamma_jitter = 0.5 * bg.share / (4.0 / g + mu * bg.radius);
    ns.beta_jitter = 0.5 * bg.share / (2.0 + 2.0 * bg.radius);
    ns.grad_noise = bg.share * ce.function_class().L / 4.0;
    return ns;
}

std::vector<std::string> tube_violations(const CounterExample& ce, const NoiseSpec& noise, double epsilon) {
    const Budget bg = budget_for(ce, epsilon);
    const double mu = ce.function_class().mu, g = ce.params().gamma, L = ce.function_class().L;
    const double slack = 1.0 + 1e-12;
    std::vector<std::string> out;
    std::ostringstream os;
    if (noise.init_radius > 1.0 * slack) {
        os << "initial residual " << noise.init_radius * bg.radius << " exceeds kappa_P r_max = " << bg.radius;
        out.push_back(os.str());
        os.str("");
    }
    const double param = (4.0 / g + mu * bg.radius) * noise.gamma_jitter + (2.0 + 2.0 * bg.radius) * noise.beta_jitter;
    if (param > bg.share * slack) {
        os << "parameter jitter term " << param << " exceeds (1 - rho_D) kappa_P r_max / 2 = " << bg.share;
        out.push_back(os.str());
        os.str("");
    }
    if (4.0 / L * noise.grad_noise > bg.share * slack) {
        os << "gradient noise term " << 4.0 / L * noise.grad_noise << " exceeds " << bg.share;
        out.push_back(os.str());
    }
    return out;
}

PerturbedResult perturbed_run(const CounterExample& ce, const NoiseSpec& noise, long steps, double epsilon) {
    if (steps < 1) throw PreconditionError("steps must be positive");
    if (noise.strict) {
        const auto v = tube_violations(ce, noise, epsilon);
        if (!v.empty()) {
            std::string msg = "noise specification violates the tube guarantee:";
            for (const auto& s : v) msg += " [" + s + "]";
            throw PreconditionError(msg);
        }
    }
    const Budget bg = budget_for(ce, epsilon);
    const HbParams p = ce.params();
    const RouCycle& cyc = ce.cycle();
    std::mt19937_64 rng(noise.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::normal_distribution<double> normal;

    Eigen::Vector4d d0;
    for (int i = 0; i < 4; ++i) d0(i) = normal(rng);
    d0 *= noise.init_radius * bg.radius / std::max(d0.norm(), 1e-300);

    PerturbedResult res{};
    res.stability = bg.sc;
    auto& it = res.trace.iterates;
    it.push_back(cyc.point(0) + d0.head<2>());
    it.push_back(cyc.point(1) + d0.tail<2>());

    auto step = [&](const Eigen::Vector2d& z, const Eigen::Vector2d& zp, double dg, double db,
                    const Eigen::Vector2d& gn) -> Eigen::Vector2d {
        const double gt = p.gamma + dg;
        return z - gt * (ce.grad(z) + gn) + (p.beta + db) * (z - zp);
    };

    for (long t = 1; t <= steps; ++t) {
        const Eigen::Vector2d z = it[static_cast<std::size_t>(t)];
        const Eigen::Vector2d zp = it[static_cast<std::size_t>(t - 1)];
        const Eigen::Vector2d target = cyc.point(t + 1);
        double dg = 0.0, db = 0.0;
        Eigen::Vector2d gn = Eigen::Vector2d::Zero();
        if (noise.mode == NoiseMode::Uniform) {
            dg = noise.gamma_jitter * unif(rng);
            db = noise.beta_jitter * unif(rng);
            const double ang = std::numbers::pi * unif(rng);
            const double rad = noise.grad_noise * std::sqrt(0.5 * (unif(rng) + 1.0));
            gn = Eigen::Vector2d(rad * std::cos(ang), rad * std::sin(ang));
        } else {
            double best = -1.0;
            for (int sg : {-1, 1})
                for (int sb : {-1, 1}) {
                    const double cg = sg * noise.gamma_jitter, cb = sb * noise.beta_jitter;
                    const Eigen::Vector2d base = step(z, zp, cg, cb, Eigen::Vector2d::Zero()) - target;
                    Eigen::Vector2d dir = base.norm() > 0.0 ? Eigen::Vector2d(-base / base.norm())
                                                            : Eigen::Vector2d(1.0, 0.0);
                    const Eigen::Vector2d cand_g = noise.grad_noise * dir;
                    const double n = (step(z, zp, cg, cb, cand_g) - target).norm();
                    if (n > best) {
                        best = n;
                        dg = cg;
                        db = cb;
                        gn = cand_g;
                    }
                }
        }
        res.trace.params_used.push_back({p.gamma + dg, p.beta + db});
        ++res.trace.grad_calls;
        Eigen::Vector2d next = step(z, zp, dg, db, gn);
        if (!next.allFinite()) {
            res.trace.diverged = true;
            break;
        }
        it.push_back(next);
    }

    std::vector<Eigen::VectorXd> above_floor;
    res.max_residual = 0.0;
    for (std::size_t t = 0; t < it.size(); ++t) {
        const Eigen::Vector2d r = Eigen::Vector2d(it[t]) - cyc.point(static_cast<long>(t));
        res.residuals.push_back(r);
        res.max_residual = std::max(res.max_residual, r.norm());
        if (above_floor.size() == t && r.norm() > 1e-10) above_floor.push_back(r);
    }
    res.stayed_in_tube = !res.trace.diverged && res.max_residual <= ce.r_max();
    res.residual_decay_rate = above_floor.size() >= 8 ? estimate_rate(above_floor, Eigen::Vector2d::Zero()) : kNaN;
    return res;
}

}  // namespace hbcycle
