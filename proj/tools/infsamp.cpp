// Command-line driver for the simulation study.
#include "infsamp/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <optional>
#include <thread>

int main(int argc, char** argv) {
    CLI::App app{"infsamp: predictive inference under informative pps sampling"};
    std::string config = "configs/full_grid.ini";
    std::string out_dir = "results";
    std::vector<int> tables, figures;
    std::vector<std::string> only_cells;
    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    std::optional<std::uint64_t> seed;
    std::optional<std::string> variant, ht_ci, interval;
    std::optional<std::size_t> keep, burn_in, sir_m0, K, mvn_max, mvn_initial, r2_burn, r2_draws;
    std::optional<double> mvn_target;
    bool quiet = false;

    app.add_option("--config", config, "INI file with [defaults] and one section per cell")->check(CLI::ExistingFile);
    app.add_option("--table", tables, "run only cells feeding these tables (1-4)")->check(CLI::Range(1, 4));
    app.add_option("--figure", figures, "run only cells feeding these figures (1-3)")->check(CLI::Range(1, 3));
    app.add_option("--cell", only_cells, "run only the named cells");
    app.add_option("--seed", seed, "override the base seed");
    app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out-dir", out_dir, "output directory");
    app.add_option("--variant", variant, "appendixB-literal or lognormal-Y");
    app.add_option("--ht-ci", ht_ci, "rooted or literal")->check(CLI::IsMember({"rooted", "literal"}));
    app.add_option("--interval", interval, "equal-tail or hpd")->check(CLI::IsMember({"equal-tail", "hpd"}));
    app.add_option("--gibbs-keep", keep, "retained Gibbs draws per chain");
    app.add_option("--burn-in", burn_in, "Gibbs burn-in sweeps");
    app.add_option("--sir-m0", sir_m0, "SIR resample size");
    app.add_option("-K,--replications", K, "replications per cell");
    app.add_option("--mvn-initial", mvn_initial, "initial lattice points per randomization");
    app.add_option("--mvn-max", mvn_max, "maximum integrand evaluations");
    app.add_option("--mvn-target", mvn_target, "target relative error for rectangle probabilities");
    app.add_option("--r2-burn-in", r2_burn, "inner Gibbs burn-in for the R2 proportion");
    app.add_option("--r2-draws", r2_draws, "inner Gibbs draws for the R2 proportion");
    app.add_flag("-q,--quiet", quiet, "no progress output");
    CLI11_PARSE(app, argc, argv);

    try {
        auto cells = infsamp::load_config(config);
        std::vector<infsamp::CellRun> runs;
        bool any_failed = false;
        for (auto& c : cells) {
            bool wanted = tables.empty() && figures.empty() && only_cells.empty();
            for (int t : tables) wanted |= c.tables.count(t) > 0;
            for (int f : figures) wanted |= c.figures.count(f) > 0;
            for (const auto& name : only_cells) wanted |= name == c.name;
            if (!wanted) continue;
            if (seed) c.seed = *seed;
            if (variant) c.mcmc.variant = infsamp::parse_variant(*variant);
            if (ht_ci) c.ht_form = *ht_ci == "rooted" ? infsamp::HtInterval::Rooted : infsamp::HtInterval::Literal;
            if (interval) c.interval = *interval == "hpd" ? infsamp::IntervalKind::HPD : infsamp::IntervalKind::EqualTail;
            if (keep) c.mcmc.keep = *keep;
            if (burn_in) c.mcmc.burn_in = *burn_in;
            if (sir_m0) c.sir_M0 = *sir_m0;
            if (K) c.K = *K;
            if (mvn_initial) c.constants.mvn.initial_points = *mvn_initial;
            if (mvn_max) c.constants.mvn.max_points = *mvn_max;
            if (mvn_target) c.constants.mvn.target_error = *mvn_target;
            if (r2_burn) c.constants.r2_burn_in = *r2_burn;
            if (r2_draws) c.constants.r2_draws = *r2_draws;
            c.validate();

            infsamp::ProgressFn progress;
            if (!quiet)
                progress = [](const std::string& name, std::size_t done, std::size_t total) {
                    std::cerr << "\r" << name << ": " << done << "/" << total << std::flush;
                    if (done == total) std::cerr << "\n";
                };
            runs.push_back(infsamp::run_cell(c, workers, progress));
            const auto& m = runs.back().metrics;
            if (m.cell_failed) {
                any_failed = true;
                std::cerr << "cell " << c.name << " failed: " << m.failed << " of " << c.K << " replications\n";
                for (const auto& r : runs.back().reps)
                    if (!r.ok) {
                        std::cerr << "  first error: " << r.error << "\n";
                        break;
                    }
            }
        }
        if (runs.empty()) {
            std::cerr << "no cells selected\n";
            return 2;
        }
        nlohmann::json extra = {{"config", config}};
        infsamp::emit_outputs(runs, out_dir, extra.dump());
        return any_failed ? 1 : 0;
    } catch (const std::exception& e) {
        std::cerr << "infsamp: " << e.what() << "\n";
        return 2;
    }
}
