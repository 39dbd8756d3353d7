#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hbcycle/types.hpp"

namespace hbcycle {

inline constexpr const char* kToolVersion = "0.1.0";

struct SweepSpec {
    std::string mode = "rate";  // rate | rou-region | lp-region | ghadimi | sls-overlay
    FunctionClass c{0.01, 1.0};
    double gamma_lo = 0.0, gamma_hi = 0.0;  // defaults to (0, 2 (1 + beta_hi) / L]
    double beta_lo = 0.0, beta_hi = 0.0;    // defaults to [0, 1)
    int n_gamma = 200;
    int n_beta = 200;
    int k_max = 100;
    double sls_c = 50.0 / 3.0 + 0.01;  // sls-overlay only
    int threads = 0;                   // 0: hardware concurrency
};

// Fills unset ranges with the default window.
SweepSpec resolved(SweepSpec s);

struct SweepCell {
    double gamma;
    double beta;
    double value;
    std::string tag;
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepCell> cells;  // row-major: gamma outer, beta inner
    nlohmann::json meta;
};

SweepResult run_sweep(const SweepSpec& spec);

std::string format_double(double v);

nlohmann::json spec_json(const SweepSpec& s);

std::string sweep_csv(const SweepResult& r);

// Filled raster of the tag column; depends only on the CSV text.
std::string render_svg(const std::string& csv_text, const std::string& title = "");

}  // namespace hbcycle
