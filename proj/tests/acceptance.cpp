// Acceptance checks: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "hbcycle/cycle_lp.hpp"
#include "hbcycle/hb_engine.hpp"
#include "hbcycle/quad_rates.hpp"
#include "hbcycle/rou_region.hpp"
#include "hbcycle/smooth.hpp"
#include "oracles.hpp"

using namespace hbcycle;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] AC%02d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

const FunctionClass kFig4{0.005, 1.0};
const HbParams kFig4P{3.5, 0.75};

void ac1_rate_oracle() {
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (double kap : {0.04, 0.01}) {
        const FunctionClass c{kap, 1.0};
        for (int i = 0; i < 50; ++i)
            for (int j = 0; j < 50; ++j) {
                const double b = -0.95 + 1.9 * j / 49.0;
                const double g = 2.0 * (1.0 + b) / c.L * (0.01 + 0.98 * i / 49.0);
                const double r = rate_on_quadratics({g, b}, c).rho;
                worst = std::max(worst, std::abs(r - oracle::brute_rate(g, b, c.mu, c.L, 101)));
            }
    }
    const double dt = seconds_since(t0);
    report(1, "rate formula vs eigenvalue oracle", worst <= 1e-10 && dt < 5.0,
           fmt("max abs diff %.3g (tol 1e-10), %.2f s (limit 5 s)", worst, dt));
}

void ac2_optimal_tuning() {
    const auto t0 = Clock::now();
    const FunctionClass c{1.0, 25.0};
    const Tuning t = optimal_tuning(c);
    // Cell-centred grid over gamma in (0, 4/L], beta in [0, 1).
    const int n = 400;
    const double dg = 4.0 / c.L / n, db = 1.0 / n;
    double best = 2.0;
    int bi = -1, bj = -1;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const RateResult r = rate_on_quadratics({(i + 0.5) * dg, (j + 0.5) * db}, c);
            if (r.region != Region::NoConvergence && r.rho < best) {
                best = r.rho;
                bi = i;
                bj = j;
            }
        }
    const int ti = static_cast<int>(std::floor((1.0 / 9.0) / dg)), tj = static_cast<int>(std::floor((4.0 / 9.0) / db));
    const bool within = std::abs(bi - ti) <= 1 && std::abs(bj - tj) <= 1;
    const double err = std::abs(t.rho - 2.0 / 3.0);
    const double dt = seconds_since(t0);
    report(2, "optimal tuning", err <= 1e-15 && within && dt < 30.0,
           fmt("|rho*-2/3| = %.2g, grid argmin (%.5f, %.5f), ", err, (bi + 0.5) * dg, (bj + 0.5) * db) +
               fmt("cell offset (%.0f, %.0f), %.2f s", bi - ti, bj - tj, dt));
}

void ac3_psi_cycle() {
    const auto t0 = Clock::now();
    const CounterExample ce(kFig4P, kFig4, 7);
    const GradOracle g = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return ce.grad(Vec2(x)); };
    const SimTrace tr = run(g, kFig4P, ce.cycle().point(0), ce.cycle().point(1), 10000);
    double dev = tr.diverged ? 1e300 : 0.0;
    for (std::size_t t = 0; t < tr.iterates.size(); ++t)
        dev = std::max(dev, (Vec2(tr.iterates[t]) - ce.cycle().point(static_cast<long>(t))).norm());
    const double dt = seconds_since(t0);
    report(3, "counterexample cycles for 1e4 steps", dev <= 1e-9 && dt < 1.0,
           fmt("max deviation %.3g (tol 1e-9), %.3f s", dev, dt));
}

void ac4_gradient_fd() {
    const CounterExample ce(kFig4P, kFig4, 7);
    const double h = 1e-6;
    double worst = 0.0;
    int n = 0;
    while (n < 100) {
        const Vec2 x(oracle::uniform(-2.0, 2.0), oracle::uniform(-2.0, 2.0));
        if (ce.piece_boundary_distance(x) < 1e-4) continue;
        Vec2 fd;
        for (int j = 0; j < 2; ++j) {
            Vec2 e = Vec2::Zero();
            e(j) = h;
            fd(j) = (ce.value(x + e) - ce.value(x - e)) / (2.0 * h);
        }
        const Vec2 g = ce.grad(x);
        worst = std::max(worst, (g - fd).norm() / std::max(g.norm(), 1e-300));
        ++n;
    }
    report(4, "gradient vs central differences", worst <= 1e-6, fmt("max relative error %.3g over 100 points", worst));
}

void ac5_emptiness() {
    const auto t0 = Clock::now();
    const double C = 50.0 / 3.0 + 0.01;
    bool all = true;
    std::string detail;
    for (double kap : {0.01, 0.001, 0.0001}) {
        const ScanResult r = incompatibility_scan({kap, 1.0}, C, {300, 300});
        all = all && r.empty;
        detail += fmt("kappa=%g: %.0f sublevel pts, %.0f without cycle; ", kap, double(r.sublevel_points),
                      double(r.violations));
    }
    const double dt = seconds_since(t0);
    report(5, "fast sublevel sets all cycle", all && dt < 120.0, detail + fmt("%.1f s", dt));
}

void ac6_ghadimi() {
    const FunctionClass c{1e-4, 1.0};
    const double v = (1.0 - ghadimi_optimum(c).rho) / c.kappa();
    report(6, "Ghadimi region best rate", v >= 7.5 && v <= 8.5, fmt("(1-rho)/kappa = %.4f (range [7.5, 8.5])", v));
}

void ac7_lessard() {
    Eigen::MatrixXd x(3, 1);
    x << 792.0, -2208.0, 2592.0;
    x /= 1225.0;
    Eigen::Matrix3d expect;
    expect << 2, -1, -1, -1, 2, -1, -1, -1, 2;
    expect *= 64.0 / 49.0;
    const double err = (symmetrize_gram(centered_gram(x)) - expect).cwiseAbs().maxCoeff();
    report(7, "Lessard cycle symmetrised Gram", err <= 1e-12, fmt("max entry error %.3g", err));
}

void ac8_lp_vs_rou() {
    const auto t0 = Clock::now();
    const FunctionClass c{0.01, 1.0};
    const int n = 60, kmax = 25;
    std::vector<int> rou(n * n, -1), lp(n * n, -1);
    double worst_cert = 0.0;
    const double b_hi = 0.99;
    auto gamma_at = [&](int i, double) { return 4.0 * (i + 1) / n; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double b = b_hi * j / (n - 1);
            const HbParams p{gamma_at(i, b), b};
            if (!in_convergence_region(p, c)) continue;
            rou[i * n + j] = rou_member_any(p, c, kmax).has_value();
            int found = 0;
            for (int k = 3; k <= kmax && !found; ++k) {
                const LpResult r = lp_feasible(p, c, k);
                if (r.feasible) {
                    found = 1;
                    worst_cert = std::max(worst_cert, r.certificate_residual);
                }
            }
            lp[i * n + j] = found;
        }
    long compared = 0, agree = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int v = rou[i * n + j];
            if (v < 0) continue;
            bool edge = false;
            for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
                const int a = i + di, b = j + dj;
                if (a < 0 || b < 0 || a >= n || b >= n) continue;
                if (rou[a * n + b] != v) edge = true;
            }
            if (edge) continue;
            ++compared;
            agree += lp[i * n + j] == v;
        }
    const double frac = compared ? double(agree) / compared : 0.0;
    const double dt = seconds_since(t0);
    report(8, "LP region vs analytic region", frac >= 0.99 && worst_cert <= 1e-7 && dt < 600.0,
           fmt("agreement %.4f on %.0f interior cells, worst certificate residual %.3g, %.1f s", frac, double(compared),
               worst_cert, dt));
}

void ac9_robustness() {
    const CounterExample ce(kFig4P, kFig4, 7);
    int ok = 0;
    for (int r = 0; r < 100; ++r) {
        NoiseSpec ns = guaranteed_noise(ce);
        ns.strict = true;
        ns.seed = 1000 + static_cast<std::uint64_t>(r);
        ns.mode = r % 2 ? NoiseMode::Adversarial : NoiseMode::Uniform;
        ok += perturbed_run(ce, ns, 2000).stayed_in_tube;
    }
    NoiseSpec init_only;
    init_only.init_radius = 0.9;
    init_only.seed = 7;
    const double rate = perturbed_run(ce, init_only, 400).residual_decay_rate;
    const double expect = rate_on_quadratics(kFig4P, {kFig4.mu, kFig4.mu}).rho;
    report(9, "robustness tube", ok == 100 && std::abs(rate - expect) <= 2e-2,
           fmt("%.0f/100 runs in tube; init-only decay %.5f vs %.5f (tol 2e-2)", ok, rate, expect));
}

void ac10_smoothing() {
    const CounterExample ce(kFig4P, kFig4, 7);
    const SmoothedCounterExample s(ce, ce.r_max() / 2.0, 64, 64);
    double worst = 0.0;
    for (int k = 0; k < 7; ++k) {
        const Vec2 x = ce.cycle().point(k);
        worst = std::max(worst, (s.grad(x) - ce.grad(x)).norm());
    }
    const double dev = cycle_check_smoothed(s, 300, 10.0).max_deviation;
    report(10, "smoothed and dilated counterexample", worst <= 1e-4 && dev <= 1e-5,
           fmt("gradient gap %.3g (tol 1e-4); dilated run deviation from 10x circle %.3g", worst, dev));
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> checks = {ac1_rate_oracle, ac2_optimal_tuning, ac3_psi_cycle,
                                                       ac4_gradient_fd, ac5_emptiness,      ac6_ghadimi,
                                                       ac7_lessard,     ac8_lp_vs_rou,      ac9_robustness,
                                                       ac10_smoothing};
    for (std::size_t i = 0; i < checks.size(); ++i) {
        try {
            checks[i]();
        } catch (const std::exception& e) {
            report(static_cast<int>(i + 1), "exception", false, e.what());
        }
    }
    std::printf("%d of %zu criteria failed\n", failures, checks.size());
    return failures == 0 ? 0 : 1;
}
