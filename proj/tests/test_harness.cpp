#include "infsamp/harness.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace infsamp;

namespace {

ExperimentCell small_cell() {
    ExperimentCell c;
    c.name = "small";
    c.params = {0.5, 0.16 * 0.16, 0.0, 1.0, 1.0};
    c.N = 30;
    c.n = 5;
    c.K = 6;
    c.mcmc.burn_in = 100;
    c.mcmc.keep = 60;
    c.sir_M0 = 30;
    c.constants.mvn.initial_points = 8;
    c.constants.mvn.max_points = 128;
    c.constants.mvn.target_error = 1e-2;
    c.constants.r2_burn_in = 10;
    c.constants.r2_draws = 40;
    c.tables = {1, 2, 3};
    c.figures = {1, 2};
    return c;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("generated populations respect the design") {
    RandomStream rng(1, 1);
    for (int k = 0; k < 200; ++k) {
        const auto pop = generate_population({0.5, 0.49, 0.0, 1.0, 5.5 * 5.5}, 100, 10, rng);
        CHECK((pop.nu.array() > 0.0).all());
        CHECK((pop.nu.array() * 10.0 < pop.t).all());
        CHECK(pop.t == doctest::Approx(pop.nu.sum()));
        CHECK((pop.y.array() > 0.0).all());
    }
}

TEST_CASE("without size noise the link is exact") {
    RandomStream rng(2, 1);
    const auto pop = generate_population({0.5, 0.49, 50.0, 1.0, 0.0}, 100, 10, rng);
    CHECK((pop.nu - (pop.y.array() + 50.0).matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("impossible designs fault") {
    RandomStream rng(3, 1);
    // Every population of 3 with n = 2 and equal-ish sizes is fine; n = 2 of 2 is not allowed.
    CHECK_THROWS(generate_population({0.0, 1.0, 0.0, 1.0, 1.0}, 2, 2, rng));
    // Sizes that can almost never be positive.
    CHECK_THROWS(generate_population({0.0, 0.01, -1000.0, 1.0, 1.0}, 10, 2, rng));
}

TEST_CASE("replications do not depend on the worker count") {
    const auto cell = small_cell();
    const auto one = run_cell(cell, 1);
    const auto three = run_cell(cell, 3);
    REQUIRE(one.reps.size() == 6);
    for (std::size_t r = 0; r < 6; ++r) {
        CHECK(one.reps[r].ok);
        CHECK(one.reps[r].nig_ybar.point == three.reps[r].nig_ybar.point);
        CHECK(one.reps[r].ig_ey.hi == three.reps[r].ig_ey.hi);
        CHECK(one.reps[r].ht_ybar.lo == three.reps[r].ht_ybar.lo);
    }
    CHECK_FALSE(one.metrics.cell_failed);
    CHECK(one.metrics.completed == 6);

    const auto dir1 = std::filesystem::temp_directory_path() / "infsamp_h1";
    const auto dir3 = std::filesystem::temp_directory_path() / "infsamp_h3";
    emit_outputs({one}, dir1);
    emit_outputs({three}, dir3);
    for (const char* f : {"table1.csv", "table2.csv", "table3.csv", "figure1.csv", "figure2.csv", "cells.csv", "replications_small.csv"})
        CHECK(slurp(dir1 / f) == slurp(dir3 / f));
    CHECK(slurp(dir1 / "table1.csv").find("mu,sigma,corr,ig_rb_ey") == 0);
}

TEST_CASE("metrics from hand-made replications") {
    ExperimentCell cell = small_cell();
    std::vector<ReplicationResult> reps(4);
    for (std::size_t i = 0; i < 4; ++i) {
        auto& r = reps[i];
        r.ok = true;
        r.truth_ybar = 2.0;
        r.truth_ey = 2.0;
        r.nig_ybar = {2.2, 1.9, 2.5};
        r.nig_ey = r.nig_ybar;
        // Wide but off-centre: covers, yet the NIG-width version centred on it does not.
        r.ht_ybar = {2.7, 1.5, 3.9};
        r.ig_ybar = r.ht_ybar;
        r.ig_ey = r.ht_ybar;
    }
    reps[3].ok = false;
    const auto m = summarize_cell(cell, reps);
    CHECK(m.completed == 3);
    CHECK(m.failed == 1);
    CHECK(m.cell_failed);
    CHECK(m.nig_ybar.relative_bias == doctest::Approx(0.1));
    CHECK(m.nig_ybar.mean_width == doctest::Approx(0.6));
    CHECK(m.nig_ybar.coverage == 1.0);
    CHECK(m.ht_ybar.coverage == 1.0);
    CHECK(m.ht_ybar.adjusted_coverage == 0.0);
    CHECK(m.ht_ybar.relative_bias == doctest::Approx(0.35));
}

TEST_CASE("config parsing") {
    const auto path = std::filesystem::temp_directory_path() / "infsamp_cfg.ini";
    {
        std::ofstream out(path);
        out << "[defaults]\nK = 7\nbeta0 = 0\nbeta1 = 1\nsigma_e = 1\nvariant = lognormal-Y\n\n"
            << "[a]\nmu = 0.5\nsigma = 0.3\ntables = 1,3\n\n[b]\nmu = 1\nsigma = 0.7\nbeta0 = 50\nsigma_e = 0.1\nK = 3\ninterval = hpd\n";
    }
    const auto cells = load_config(path);
    REQUIRE(cells.size() == 2);
    CHECK(cells[0].name == "a");
    CHECK(cells[0].K == 7);
    CHECK(cells[0].params.sigma2 == doctest::Approx(0.09));
    CHECK(cells[0].tables == std::set<int>{1, 3});
    CHECK(cells[0].mcmc.variant == ModelVariant::LognormalY);
    CHECK(cells[1].K == 3);
    CHECK(cells[1].params.sigmaE2 == doctest::Approx(0.01));
    CHECK(cells[1].interval == IntervalKind::HPD);

    {
        std::ofstream out(path);
        out << "[a]\nmu = 0.5\nsigma = 0.3\nbeta0 = 0\nbeta1 = 1\nsigma_e = 1\nkeeep = 10\n";
    }
    CHECK_THROWS(load_config(path));
    {
        std::ofstream out(path);
        out << "[a]\nmu = 0.5\nbeta0 = 0\nbeta1 = 1\nsigma_e = 1\n";
    }
    CHECK_THROWS(load_config(path));
}
