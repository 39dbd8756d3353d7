#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "hbcycle/quad_rates.hpp"
#include "hbcycle/reporting.hpp"

using namespace hbcycle;

namespace {

long count(const std::string& s, const std::string& needle) {
    long n = 0;
    for (std::size_t p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("numbers are written with 17 significant digits") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(2.0 / 3.0) == "0.66666666666666663");
    CHECK(std::stod(format_double(1.0 / 7.0)) == 1.0 / 7.0);
    CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("rate sweep layout and values") {
    SweepSpec s;
    s.mode = "rate";
    s.c = {0.04, 1.0};
    s.n_gamma = 7;
    s.n_beta = 5;
    const SweepResult r = run_sweep(s);
    REQUIRE(r.cells.size() == 35);
    CHECK(r.cells[0].gamma == r.cells[4].gamma);
    CHECK(r.cells[0].beta < r.cells[1].beta);
    CHECK(r.cells[5].gamma > r.cells[4].gamma);
    for (const auto& c : r.cells) {
        const RateResult q = rate_on_quadratics({c.gamma, c.beta}, s.c);
        CHECK(c.tag == region_name(q.region));
        if (q.region != Region::NoConvergence) CHECK(c.value == q.rho);
    }
    const std::string csv = sweep_csv(r);
    CHECK(count(csv, "\n") == 35 + 3);
    CHECK(csv.find("gamma,beta,value,tag\n") != std::string::npos);
    CHECK(csv.find('\r') == std::string::npos);
    CHECK(r.meta["version"] == kToolVersion);
    CHECK(r.meta["parameters"]["n_gamma"] == 7);
}

TEST_CASE("sweeps are deterministic across thread counts") {
    SweepSpec s;
    s.mode = "rou-region";
    s.n_gamma = 40;
    s.n_beta = 30;
    s.threads = 1;
    const std::string a = sweep_csv(run_sweep(s));
    s.threads = 4;
    const std::string b = sweep_csv(run_sweep(s));
    CHECK(a == b);
    CHECK(render_svg(a) == render_svg(b));
}

TEST_CASE("svg raster has one cell per row") {
    SweepSpec s;
    s.mode = "ghadimi";
    s.n_gamma = 12;
    s.n_beta = 9;
    const std::string csv = sweep_csv(run_sweep(s));
    const std::string svg = render_svg(csv, "t");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(count(svg, "<rect x=") == 12 * 9 + 2);  // cells plus legend swatches
    CHECK_THROWS_AS(render_svg("# only comments\n"), PreconditionError);
}

TEST_CASE("sublevel overlay verdict") {
    SweepSpec s;
    s.mode = "sls-overlay";
    s.c = {0.001, 1.0};
    s.n_gamma = 60;
    s.n_beta = 60;
    s.beta_lo = 0.8;
    s.beta_hi = 0.999;
    s.gamma_lo = 1.0;
    s.gamma_hi = 3.99;
    const SweepResult r = run_sweep(s);
    CHECK(r.meta["empty_intersection"] == true);
    CHECK(r.meta["tag_counts"].contains("sls-cycle"));
    s.sls_c = 2.0;
    const SweepResult loose = run_sweep(s);
    CHECK(loose.meta["empty_intersection"] == false);
}

TEST_CASE("sweep preconditions") {
    SweepSpec s;
    s.mode = "bogus";
    CHECK_THROWS_AS(run_sweep(s), PreconditionError);
    s.mode = "rate";
    s.n_gamma = 0;
    CHECK_THROWS_AS(run_sweep(s), PreconditionError);
    s.n_gamma = 3;
    s.k_max = 2;
    CHECK_THROWS_AS(run_sweep(s), PreconditionError);
}

TEST_CASE("lp-region sweep tags") {
    SweepSpec s;
    s.mode = "lp-region";
    s.n_gamma = 6;
    s.n_beta = 6;
    s.k_max = 8;
    const SweepResult r = run_sweep(s);
    for (const auto& c : r.cells)
        CHECK((c.tag == "cycle" || c.tag == "none" || c.tag == "outside" || c.tag == "indeterminate"));
}
