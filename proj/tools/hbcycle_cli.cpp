// Command-line front end: rates, region sweeps, cycle demos, LP checks,
// robustness experiments and reference rate tables.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hbcycle/cycle_lp.hpp"
#include "hbcycle/hb_engine.hpp"
#include "hbcycle/quad_rates.hpp"
#include "hbcycle/reporting.hpp"
#include "hbcycle/rou_region.hpp"
#include "hbcycle/smooth.hpp"

using namespace hbcycle;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct ClassOpts {
    double mu = 0.01;
    double L = 1.0;
    FunctionClass get() const { return {mu, L}; }
};

void add_class(CLI::App* app, ClassOpts& c) {
    app->add_option("--mu", c.mu, "strong convexity parameter")->capture_default_str();
    app->add_option("--L", c.L, "smoothness parameter")->capture_default_str();
}

json envelope(const std::string& command, json params) {
    return {{"tool", "hbcycle"}, {"version", kToolVersion}, {"command", command}, {"parameters", std::move(params)}};
}


json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw PreconditionError("cannot write " + path);
    f << text;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw PreconditionError("cannot read " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

json reference_json(const FunctionClass& c) {
    const ReferenceRates r = reference_rates(c);
    return {{"gd_1_over_L", r.gd_one_over_L},
            {"gd_2_over_L_plus_mu", r.gd_two_over_sum},
            {"hb_optimal_quadratics", r.hb_quadratic},
            {"hb_ghadimi_region_best", r.hb_ghadimi},
            {"nag_strongly_convex", r.nag_strongly_convex},
            {"nag_quadratics", r.nag_quadratic},
            {"item", r.item},
            {"tmm", r.tmm},
            {"lower_bound_strongly_convex", r.lower_bound_strongly_convex},
            {"lower_bound_quadratics", r.lower_bound_quadratic}};
}

// --- rate ---
struct RateOpts {
    ClassOpts c;
    double gamma = 0, beta = 0;
};

int cmd_rate(const RateOpts& o) {
    const FunctionClass c = o.c.get();
    const RateResult r = rate_on_quadratics({o.gamma, o.beta}, c);
    json out = envelope("rate", {{"gamma", o.gamma}, {"beta", o.beta}, {"mu", c.mu}, {"L", c.L}});
    out["rho"] = jnum(r.rho);
    out["region"] = region_name(r.region);
    out["kappa"] = c.kappa();
    const Tuning t = optimal_tuning(c);
    out["optimal"] = {{"gamma", t.gamma}, {"beta", t.beta}, {"rho", t.rho}};
    out["reference"] = reference_json(c);
    std::cout << out.dump(2) << "\n";
    return 0;
}

// --- sweep ---
struct SweepOpts {
    ClassOpts c;
    SweepSpec spec;
    std::string out, svg;
};

int cmd_sweep(SweepOpts& o) {
    o.spec.c = o.c.get();
    const SweepResult r = run_sweep(o.spec);
    const std::string csv = sweep_csv(r);
    write_file(o.out, csv);
    write_file(o.out + ".json", r.meta.dump(2) + "\n");
    if (!o.svg.empty()) write_file(o.svg, render_svg(csv, "hbcycle sweep: " + r.spec.mode));
    json summary = r.meta;
    summary["csv"] = o.out;
    std::cout << summary.dump(2) << "\n";
    return 0;
}

// --- render ---
struct RenderOpts {
    std::string csv, svg, title;
};

int cmd_render(const RenderOpts& o) {
    write_file(o.svg, render_svg(read_file(o.csv), o.title));
    return 0;
}

// --- cycle-demo ---
struct DemoOpts {
    ClassOpts c{0.005, 1.0};
    double gamma = 3.5, beta = 0.75;
    int k = 7;
    long steps = 1000;
    std::string smooth = "none";
    double lambda = 1.0;
    double noise_init = 0.0, noise_gamma = 0.0, noise_beta = 0.0;
    std::string noise_grad = "0";
    std::string mode = "uniform";
    std::uint64_t seed = 1;
    bool strict = false;
    std::string trace;
};

std::string trace_csv(const std::vector<Eigen::VectorXd>& it, const std::vector<HbParams>& used, const RouCycle& cyc,
                      double lambda, const json& params) {
    std::ostringstream os;
    os << "# hbcycle " << kToolVersion << "\n# parameters " << params.dump() << "\n";
    os << "t,x,y,distance_to_cycle,gamma_t,beta_t\n";
    for (std::size_t t = 0; t < it.size(); ++t) {
        const Vec2 z(it[t]);
        const double d = (z - lambda * cyc.point(static_cast<long>(t))).norm();
        const double nan = std::nan("");
        // used[t - 1] is the step taken from x_t
        const bool has = t >= 1 && t - 1 < used.size();
        const double g = has ? used[t - 1].gamma : nan, b = has ? used[t - 1].beta : nan;
        os << t << ',' << format_double(z.x()) << ',' << format_double(z.y()) << ',' << format_double(d) << ','
           << format_double(g) << ',' << format_double(b) << '\n';
    }
    return os.str();
}

int cmd_cycle_demo(const DemoOpts& o) {
    const FunctionClass c = o.c.get();
    const HbParams p{o.gamma, o.beta};
    json params = {{"gamma", o.gamma},    {"beta", o.beta},         {"mu", c.mu},          {"L", c.L},
                   {"K", o.k},            {"steps", o.steps},       {"smooth", o.smooth},  {"lambda", o.lambda},
                   {"noise_init", o.noise_init}, {"noise_gamma", o.noise_gamma}, {"noise_beta", o.noise_beta},
                   {"noise_grad", o.noise_grad}, {"mode", o.mode},   {"seed", o.seed},      {"strict", o.strict}};
    const CounterExample ce(p, c, o.k);
    json out = envelope("cycle-demo", params);
    out["r_max"] = ce.r_max();
    out["membership_polynomial"] = membership_polynomial(p, o.k, c);
    out["quadratic_rate"] = jnum(rate_on_quadratics(p, c).rho);
    const StabilityConstants sc = stability_constants(p, c.mu);
    out["stability"] = {{"kappa_p", sc.kappa_p}, {"rho_d", sc.rho_d}};

    const bool noisy = o.noise_init > 0.0 || o.noise_gamma > 0.0 || o.noise_beta > 0.0 || o.noise_grad != "0";
    if (noisy) {
        if (o.smooth != "none" || o.lambda != 1.0)
            throw PreconditionError("noise experiments run on the unsmoothed, undilated counterexample");
        NoiseSpec ns;
        const NoiseSpec g = guaranteed_noise(ce);
        ns.init_radius = o.noise_init;
        ns.gamma_jitter = o.noise_gamma;
        ns.beta_jitter = o.noise_beta;
        if (o.noise_grad == "within-thm53") {
            ns.grad_noise = g.grad_noise;
            if (o.noise_gamma == 0.0) ns.gamma_jitter = g.gamma_jitter;
            if (o.noise_beta == 0.0) ns.beta_jitter = g.beta_jitter;
        } else {
            ns.grad_noise = std::stod(o.noise_grad);
        }
        ns.mode = o.mode == "adversarial" ? NoiseMode::Adversarial : NoiseMode::Uniform;
        ns.seed = o.seed;
        ns.strict = o.strict;
        const PerturbedResult r = perturbed_run(ce, ns, o.steps);
        out["noise"] = {{"init_radius", ns.init_radius}, {"gamma_jitter", ns.gamma_jitter},
                        {"beta_jitter", ns.beta_jitter}, {"grad_noise", ns.grad_noise}};
        out["violated_guarantees"] = tube_violations(ce, ns);
        out["max_residual"] = r.max_residual;
        out["stayed_in_tube"] = r.stayed_in_tube;
        out["residual_decay_rate"] = jnum(r.residual_decay_rate);
        out["isotropic_rate"] = jnum(rate_on_quadratics(p, {c.mu, c.mu}).rho);
        if (!o.trace.empty())
            write_file(o.trace, trace_csv(r.trace.iterates, r.trace.params_used, ce.cycle(), 1.0, params));
        std::cout << out.dump(2) << "\n";
        return 0;
    }

    double eps = 0.0;
    if (o.smooth == "auto")
        eps = ce.r_max() / 2.0;
    else if (o.smooth != "none")
        eps = std::stod(o.smooth);
    const SmoothedCounterExample s(ce, eps);
    const PlanarFunction f = dilate(s.as_function(), o.lambda);
    const GradOracle oracle = [&f](const Eigen::VectorXd& x) -> Eigen::VectorXd { return f.grad(Vec2(x)); };
    const SimTrace tr = run(oracle, p, o.lambda * ce.cycle().point(0), o.lambda * ce.cycle().point(1), o.steps);
    double dev = 0.0;
    for (std::size_t t = 0; t < tr.iterates.size(); ++t)
        dev = std::max(dev, (Vec2(tr.iterates[t]) - o.lambda * ce.cycle().point(static_cast<long>(t))).norm());
    const CycleReport rep = detect_cycle(tr, o.k, 1e-6 * std::max(1.0, o.lambda));
    out["epsilon"] = eps;
    out["max_deviation_from_cycle"] = dev;
    out["is_cycle"] = rep.is_cycle;
    out["estimated_rate"] = jnum(estimate_rate(tr, Eigen::Vector2d::Zero()));
    if (eps > 0.0) {
        const double h = eps / 8.0;
        const double tau1 = estimate_hessian_lipschitz(s.as_function(), Vec2::Zero(), 1.2, h, 200);
        const double tau = estimate_hessian_lipschitz(f, Vec2::Zero(), 1.2 * o.lambda, h * o.lambda, 200);
        out["hessian_lipschitz_estimate"] = tau;
        out["hessian_lipschitz_estimate_unit_scale"] = tau1;
        out["hessian_lipschitz_reduction"] = tau1 / tau;
    }
    if (!o.trace.empty()) write_file(o.trace, trace_csv(tr.iterates, tr.params_used, ce.cycle(), o.lambda, params));
    std::cout << out.dump(2) << "\n";
    return rep.is_cycle ? 0 : kExitNumerical;
}

// --- lp-check ---
struct LpOpts {
    ClassOpts c;
    double gamma = 0, beta = 0;
    int k = 0;
    int k_max = 25;
};

int cmd_lp_check(const LpOpts& o) {
    const FunctionClass c = o.c.get();
    const HbParams p{o.gamma, o.beta};
    json out = envelope("lp-check", {{"gamma", o.gamma}, {"beta", o.beta}, {"mu", c.mu}, {"L", c.L}, {"K", o.k},
                                     {"k_max", o.k_max}});
    json per_k = json::array();
    const int lo = o.k > 0 ? o.k : 3, hi = o.k > 0 ? o.k : o.k_max;
    std::optional<int> first;
    for (int k = lo; k <= hi; ++k) {
        const LpResult r = lp_feasible(p, c, k);
        json e = {{"K", k}, {"t_star", r.t_star}, {"feasible", r.feasible}};
        std::vector<double> nu(r.nu.data(), r.nu.data() + r.nu.size());
        e["nu"] = nu;
        if (r.feasible) {
            e["certificate_residual"] = r.certificate_residual;
            if (!first) first = k;
        }
        e["roots_of_unity_member"] = p.beta >= 0.0 && p.beta < 1.0 && rou_member(p, k, c);
        per_k.push_back(e);
    }
    out["results"] = per_k;
    out["lp_smallest_K"] = first ? json(*first) : json(nullptr);
    const auto rk = p.beta >= 0.0 && p.beta < 1.0 ? rou_member_any(p, c, hi) : std::nullopt;
    out["roots_of_unity_smallest_K"] = rk ? json(*rk) : json(nullptr);
    std::cout << out.dump(2) << "\n";
    return 0;
}

// --- robustness ---
struct RobustOpts {
    ClassOpts c{0.005, 1.0};
    double gamma = 3.5, beta = 0.75;
    int k = 7;
    int runs = 100;
    long steps = 2000;
    std::uint64_t seed = 1;
    std::string mode = "uniform";
};

int cmd_robustness(const RobustOpts& o) {
    const FunctionClass c = o.c.get();
    const HbParams p{o.gamma, o.beta};
    const CounterExample ce(p, c, o.k);
    const NoiseMode mode = o.mode == "adversarial" ? NoiseMode::Adversarial : NoiseMode::Uniform;
    json out = envelope("robustness", {{"gamma", o.gamma}, {"beta", o.beta}, {"mu", c.mu}, {"L", c.L}, {"K", o.k},
                                       {"runs", o.runs}, {"steps", o.steps}, {"seed", o.seed}, {"mode", o.mode}});
    const NoiseSpec g = guaranteed_noise(ce);
    const StabilityConstants sc = stability_constants(p, c.mu);
    out["r_max"] = ce.r_max();
    out["stability"] = {{"kappa_p", sc.kappa_p}, {"rho_d", sc.rho_d}};
    out["guaranteed"] = {{"init_radius", sc.kappa_p * ce.r_max()},
                         {"gamma_jitter", g.gamma_jitter},
                         {"beta_jitter", g.beta_jitter},
                         {"grad_noise", g.grad_noise}};

    auto batch = [&](double scale, double init) {
        int ok = 0;
        double worst = 0.0;
        for (int r = 0; r < o.runs; ++r) {
            NoiseSpec ns = g;
            ns.init_radius = init;
            ns.gamma_jitter *= scale;
            ns.beta_jitter *= scale;
            ns.grad_noise *= scale;
            ns.mode = mode;
            ns.seed = o.seed + static_cast<std::uint64_t>(r);
            const PerturbedResult res = perturbed_run(ce, ns, o.steps);
            ok += res.stayed_in_tube;
            worst = std::max(worst, res.max_residual);
        }
        return std::pair<int, double>(ok, worst);
    };
    const auto [ok, worst] = batch(1.0, 0.9);
    out["guaranteed_runs_in_tube"] = ok;
    out["guaranteed_worst_residual"] = worst;

    // Init-only decay rate.
    NoiseSpec init_only;
    init_only.init_radius = 0.9;
    init_only.seed = o.seed;
    const PerturbedResult ir = perturbed_run(ce, init_only, std::min<long>(o.steps, 400));
    out["init_only_decay_rate"] = jnum(ir.residual_decay_rate);
    out["isotropic_rate"] = jnum(rate_on_quadratics(p, {c.mu, c.mu}).rho);

    // Observed threshold: largest power-of-two multiple of the guaranteed noise with all runs in the tube.
    double observed = 1.0;
    for (double s = 2.0; s <= 1048576.0; s *= 2.0) {
        if (batch(s, 0.9).first != o.runs) break;
        observed = s;
    }
    out["observed_noise_multiple"] = observed;
    std::cout << out.dump(2) << "\n";
    return ok == o.runs ? 0 : kExitNumerical;
}

// --- table4 ---
struct TableOpts {
    ClassOpts c;
    std::string format = "csv";
};

int cmd_table4(const TableOpts& o) {
    const FunctionClass c = o.c.get();
    const json ref = reference_json(c);
    if (o.format == "json") {
        json out = envelope("table4", {{"mu", c.mu}, {"L", c.L}});
        out["rates"] = ref;
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    std::cout << "# hbcycle " << kToolVersion << "\n# parameters " << json({{"mu", c.mu}, {"L", c.L}}).dump() << "\n";
    std::cout << "method,rate\n";
    for (const auto& [k, v] : ref.items()) std::cout << k << ',' << format_double(v.get<double>()) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heavy-ball rates, cycles and counterexamples"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    RateOpts rate;
    auto* s_rate = app.add_subcommand("rate", "worst-case rate on quadratics");
    add_class(s_rate, rate.c);
    s_rate->add_option("--gamma", rate.gamma)->required();
    s_rate->add_option("--beta", rate.beta)->required();

    SweepOpts sweep;
    auto* s_sweep = app.add_subcommand("sweep", "grid sweep over (gamma, beta)");
    add_class(s_sweep, sweep.c);
    s_sweep->add_option("--mode", sweep.spec.mode)
        ->check(CLI::IsMember({"rate", "rou-region", "lp-region", "ghadimi", "sls-overlay"}))
        ->capture_default_str();
    s_sweep->add_option("--n-gamma", sweep.spec.n_gamma)->capture_default_str();
    s_sweep->add_option("--n-beta", sweep.spec.n_beta)->capture_default_str();
    s_sweep->add_option("--gamma-min", sweep.spec.gamma_lo);
    s_sweep->add_option("--gamma-max", sweep.spec.gamma_hi);
    s_sweep->add_option("--beta-min", sweep.spec.beta_lo);
    s_sweep->add_option("--beta-max", sweep.spec.beta_hi);
    s_sweep->add_option("--k-max", sweep.spec.k_max)->capture_default_str();
    s_sweep->add_option("--C", sweep.spec.sls_c, "sublevel constant for sls-overlay")->capture_default_str();
    s_sweep->add_option("--threads", sweep.spec.threads)->capture_default_str();
    s_sweep->add_option("--out", sweep.out, "CSV output path")->required();
    s_sweep->add_option("--svg", sweep.svg, "optional SVG raster");

    RenderOpts render;
    auto* s_render = app.add_subcommand("render", "SVG raster from a sweep CSV");
    s_render->add_option("--csv", render.csv)->required();
    s_render->add_option("--svg", render.svg)->required();
    s_render->add_option("--title", render.title);

    DemoOpts demo;
    auto* s_demo = app.add_subcommand("cycle-demo", "run heavy ball on the cycling counterexample");
    add_class(s_demo, demo.c);
    s_demo->add_option("--gamma", demo.gamma)->capture_default_str();
    s_demo->add_option("--beta", demo.beta)->capture_default_str();
    s_demo->add_option("--K", demo.k)->capture_default_str();
    s_demo->add_option("--steps", demo.steps)->capture_default_str();
    s_demo->add_option("--smooth", demo.smooth, "none | auto | radius")->capture_default_str();
    s_demo->add_option("--lambda", demo.lambda)->capture_default_str();
    s_demo->add_option("--noise-init", demo.noise_init, "fraction of kappa_P r_max");
    s_demo->add_option("--noise-gamma", demo.noise_gamma);
    s_demo->add_option("--noise-beta", demo.noise_beta);
    s_demo->add_option("--noise-grad", demo.noise_grad, "bound or within-thm53");
    s_demo->add_option("--noise-mode", demo.mode)->check(CLI::IsMember({"uniform", "adversarial"}));
    s_demo->add_option("--seed", demo.seed);
    s_demo->add_flag("--strict", demo.strict);
    s_demo->add_option("--trace", demo.trace, "trace CSV output path");

    LpOpts lp;
    auto* s_lp = app.add_subcommand("lp-check", "cycle LP feasibility");
    add_class(s_lp, lp.c);
    s_lp->add_option("--gamma", lp.gamma)->required();
    s_lp->add_option("--beta", lp.beta)->required();
    s_lp->add_option("--K", lp.k, "single cycle length (default: scan 3..k-max)");
    s_lp->add_option("--k-max", lp.k_max)->capture_default_str();

    RobustOpts rob;
    auto* s_rob = app.add_subcommand("robustness", "seeded noise experiments around the cycle");
    add_class(s_rob, rob.c);
    s_rob->add_option("--gamma", rob.gamma)->capture_default_str();
    s_rob->add_option("--beta", rob.beta)->capture_default_str();
    s_rob->add_option("--K", rob.k)->capture_default_str();
    s_rob->add_option("--runs", rob.runs)->capture_default_str();
    s_rob->add_option("--steps", rob.steps)->capture_default_str();
    s_rob->add_option("--seed", rob.seed)->capture_default_str();
    s_rob->add_option("--noise-mode", rob.mode)->check(CLI::IsMember({"uniform", "adversarial"}));

    TableOpts table;
    auto* s_table = app.add_subcommand("table4", "reference rates of first-order methods");
    add_class(s_table, table.c);
    s_table->add_option("--format", table.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*s_rate) return cmd_rate(rate);
        if (*s_sweep) return cmd_sweep(sweep);
        if (*s_render) return cmd_render(render);
        if (*s_demo) return cmd_cycle_demo(demo);
        if (*s_lp) return cmd_lp_check(lp);
        if (*s_rob) return cmd_robustness(rob);
        if (*s_table) return cmd_table4(table);
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}
