#include "hbcycle/reporting.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <mutex>
#include <thread>

#include "hbcycle/cycle_lp.hpp"
#include "hbcycle/quad_rates.hpp"
#include "hbcycle/rou_region.hpp"

namespace hbcycle {

namespace {

const std::vector<std::string> kModes = {"rate", "rou-region", "lp-region", "ghadimi", "sls-overlay"};

SweepCell evaluate(const SweepSpec& s, double g, double b) {
    const HbParams p{g, b};
    const FunctionClass& c = s.c;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (s.mode == "rate") {
        const RateResult r = rate_on_quadratics(p, c);
        return {g, b, r.rho, region_name(r.region)};
    }
    if (s.mode == "ghadimi") {
        if (!ghadimi_contains(p, c)) return {g, b, nan, "outside"};
        return {g, b, rate_on_quadratics(p, c).rho, "ghadimi"};
    }
    const bool inside = b >= 0.0 && in_convergence_region(p, c);
    if (s.mode == "rou-region") {
        if (!inside) return {g, b, 0.0, "outside"};
        const auto k = rou_member_any(p, c, s.k_max);
        return {g, b, k ? double(*k) : 0.0, k ? "cycle" : "none"};
    }
    if (s.mode == "lp-region") {
        if (!inside) return {g, b, 0.0, "outside"};
        double best = std::numeric_limits<double>::infinity();
        int kbest = 0;
        for (int k = 3; k <= s.k_max; ++k) {
            const double t = lp_feasible(p, c, k).t_star;
            if (t < best) {
                best = t;
                kbest = k;
            }
            if (t < -kLpFeasTol) break;
        }
        if (best < -kLpFeasTol) return {g, b, double(kbest), "cycle"};
        if (best > kLpFeasTol) return {g, b, 0.0, "none"};
        return {g, b, double(kbest), "indeterminate"};
    }
    // sls-overlay
    const double k = c.kappa();
    const double rho = (1.0 - s.sls_c * k) / (1.0 + s.sls_c * k);
    const RateResult r = rate_on_quadratics(p, c);
    const bool in_sls = rho >= 0.0 && r.region != Region::NoConvergence && r.rho <= rho + kBoundaryTol;
    const bool cyc = inside && rou_member_any(p, c, s.k_max).has_value();
    std::string tag = in_sls ? (cyc ? "sls-cycle" : "sls-no-cycle") : (cyc ? "cycle" : (inside ? "none" : "outside"));
    return {g, b, r.rho, tag};
}

double grid_at(double lo, double hi, int n, int i) { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); }

}  // namespace

SweepSpec resolved(SweepSpec s) {
    validate(s.c);
    if (std::find(kModes.begin(), kModes.end(), s.mode) == kModes.end())
        throw PreconditionError("unknown sweep mode: " + s.mode);
    if (s.n_gamma < 1 || s.n_beta < 1) throw PreconditionError("grid sizes must be positive");
    if (s.k_max < 3) throw PreconditionError("k_max must be at least 3");
    if (s.beta_lo == 0.0 && s.beta_hi == 0.0) s.beta_hi = 1.0 - 1.0 / s.n_beta;
    if (s.gamma_lo == 0.0 && s.gamma_hi == 0.0) {
        s.gamma_hi = 2.0 * (1.0 + s.beta_hi) / s.c.L;
        s.gamma_lo = s.gamma_hi / s.n_gamma;
    }
    if (!(s.gamma_hi >= s.gamma_lo) || !(s.beta_hi >= s.beta_lo)) throw PreconditionError("grid range is empty");
    return s;
}

SweepResult run_sweep(const SweepSpec& spec_in) {
    SweepResult res;
    res.spec = resolved(spec_in);
    const SweepSpec& s = res.spec;
    const std::size_t total = static_cast<std::size_t>(s.n_gamma) * static_cast<std::size_t>(s.n_beta);
    res.cells.resize(total);
    unsigned nt = s.threads > 0 ? static_cast<unsigned>(s.threads) : std::max(1u, std::thread::hardware_concurrency());
    std::atomic<int> next_row{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto worker = [&] {
        for (int i = next_row++; i < s.n_gamma; i = next_row++) {
            try {
                const double g = grid_at(s.gamma_lo, s.gamma_hi, s.n_gamma, i);
                for (int j = 0; j < s.n_beta; ++j)
                    res.cells[static_cast<std::size_t>(i) * s.n_beta + j] =
                        evaluate(s, g, grid_at(s.beta_lo, s.beta_hi, s.n_beta, j));
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);

    res.meta = {{"tool", "hbcycle"}, {"version", kToolVersion}, {"parameters", spec_json(s)}};
    std::map<std::string, long> counts;
    for (const auto& c : res.cells) ++counts[c.tag];
    res.meta["tag_counts"] = counts;
    if (s.mode == "sls-overlay") res.meta["sls_cycle_free_points"] = counts["sls-no-cycle"];
    if (s.mode == "sls-overlay") res.meta["empty_intersection"] = counts["sls-no-cycle"] == 0;
    return res;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json spec_json(const SweepSpec& s) {
    nlohmann::json j = {{"mode", s.mode},       {"mu", s.c.mu},         {"L", s.c.L},
                        {"gamma_lo", s.gamma_lo}, {"gamma_hi", s.gamma_hi}, {"n_gamma", s.n_gamma},
                        {"beta_lo", s.beta_lo},   {"beta_hi", s.beta_hi},   {"n_beta", s.n_beta},
                        {"k_max", s.k_max}};
    if (s.mode == "sls-overlay") j["C"] = s.sls_c;
    return j;
}

std::string sweep_csv(const SweepResult& r) {
    std::ostringstream os;
    os << "# hbcycle " << kToolVersion << "\n";
    os << "# parameters " << spec_json(r.spec).dump() << "\n";
    os << "gamma,beta,value,tag\n";
    for (const auto& c : r.cells)
        os << format_double(c.gamma) << ',' << format_double(c.beta) << ',' << format_double(c.value) << ',' << c.tag
           << '\n';
    return os.str();
}

std::string render_svg(const std::string& csv_text, const std::string& title) {
    std::istringstream is(csv_text);
    std::string line;
    bool header = false;
    std::vector<SweepCell> cells;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        std::istringstream ls(line);
        std::string f[4];
        for (auto& s : f) std::getline(ls, s, ',');
        cells.push_back({std::stod(f[0]), std::stod(f[1]), 0.0, f[3]});
    }
    if (cells.empty()) throw PreconditionError("CSV has no data rows");
    std::set<double> gs, bs;
    std::vector<std::string> tags;
    for (const auto& c : cells) {
        gs.insert(c.gamma);
        bs.insert(c.beta);
        if (std::find(tags.begin(), tags.end(), c.tag) == tags.end()) tags.push_back(c.tag);
    }
    std::sort(tags.begin(), tags.end());
    const std::map<std::string, std::string> fixed = {
        {"Lazy", "#4e79a7"},        {"Robust", "#59a14f"},        {"KnifeEdge", "#f28e2b"},
        {"NoConvergence", "#dddddd"}, {"outside", "#eeeeee"},       {"none", "#bab0ac"},
        {"cycle", "#e15759"},       {"ghadimi", "#76b7b2"},       {"indeterminate", "#edc948"},
        {"sls-cycle", "#b07aa1"},   {"sls-no-cycle", "#000000"}};
    const std::vector<std::string> spare = {"#9c755f", "#ff9da7", "#86bcb6", "#d37295"};
    std::map<std::string, std::string> color;
    std::size_t si = 0;
    for (const auto& t : tags) color[t] = fixed.count(t) ? fixed.at(t) : spare[si++ % spare.size()];

    const std::vector<double> gv(gs.begin(), gs.end()), bv(bs.begin(), bs.end());
    const double w = 600.0, h = 600.0, x0 = 60.0, y0 = 40.0;
    const double cw = w / gv.size(), ch = h / bv.size();
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << x0 + w + 180 << "\" height=\"" << y0 + h + 60
       << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty()) os << "<text x=\"" << x0 << "\" y=\"24\" font-size=\"16\">" << title << "</text>\n";
    for (const auto& c : cells) {
        const auto gi = std::lower_bound(gv.begin(), gv.end(), c.gamma) - gv.begin();
        const auto bi = std::lower_bound(bv.begin(), bv.end(), c.beta) - bv.begin();
        os << "<rect x=\"" << format_double(x0 + gi * cw) << "\" y=\""
           << format_double(y0 + h - (bi + 1) * ch) << "\" width=\"" << format_double(cw) << "\" height=\""
           << format_double(ch) << "\" fill=\"" << color[c.tag] << "\"/>\n";
    }
    os << "<text x=\"" << x0 + w / 2 << "\" y=\"" << y0 + h + 35 << "\" font-size=\"14\">gamma ["
       << format_double(gv.front()) << ", " << format_double(gv.back()) << "]</text>\n";
    os << "<text x=\"10\" y=\"" << y0 + h / 2 << "\" font-size=\"14\">beta</text>\n";
    double ly = y0 + 10;
    for (const auto& t : tags) {
        os << "<rect x=\"" << x0 + w + 20 << "\" y=\"" << ly << "\" width=\"14\" height=\"14\" fill=\"" << color[t]
           << "\"/><text x=\"" << x0 + w + 40 << "\" y=\"" << ly + 12 << "\" font-size=\"12\">" << t << "</text>\n";
        ly += 20;
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace hbcycle
