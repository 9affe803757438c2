#include "infsamp/harness.hpp"

#include "infsamp/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace infsamp {

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

double pearson(const Vector& a, const Vector& b) {
    const double ma = a.mean(), mb = b.mean();
    const double sab = ((a.array() - ma) * (b.array() - mb)).sum();
    const double saa = (a.array() - ma).square().sum();
    const double sbb = (b.array() - mb).square().sum();
    return sab / std::sqrt(saa * sbb);
}

MethodInterval pick(const Summary& s, IntervalKind kind) {
    const auto& iv = kind == IntervalKind::HPD ? s.hpd : s.equal_tail;
    return {iv.point, iv.lo, iv.hi};
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

} // namespace

void ExperimentCell::validate() const {
    if (!(n < N)) throw ConstraintViolation("cell " + name + ": need n < N");
    if (n < 3) throw ConstraintViolation("cell " + name + ": need n >= 3");
    if (K < 1) throw ConstraintViolation("cell " + name + ": need K >= 1");
    if (!(params.sigma2 > 0.0)) throw DomainError("cell " + name + ": sigma must be positive");
    if (!(params.sigmaE2 > 0.0)) throw DomainError("cell " + name + ": sigma_e must be positive for inference");
    mcmc.validate();
}

FinitePopulation generate_population(const SuperParams& p, std::size_t N, std::size_t n, RandomStream& rng) {
    if (!(p.sigma2 > 0.0)) throw DomainError("generate_population: sigma2 must be positive");
    if (p.sigmaE2 < 0.0) throw DomainError("generate_population: sigmaE2 must be non-negative");
    if (N < 2 || n == 0 || n >= N) throw ConstraintViolation("generate_population: need 1 <= n < N, N >= 2");
    constexpr std::size_t max_rejections = 10000;
    const auto Ni = static_cast<Eigen::Index>(N);
    const double sd = std::sqrt(p.sigma2), sde = std::sqrt(p.sigmaE2);

    FinitePopulation pop;
    pop.y.resize(Ni);
    pop.nu.resize(Ni);
    for (Eigen::Index i = 0; i < Ni; ++i) pop.y[i] = std::exp(p.mu + sd * rng.normal());

    std::size_t rejections = 0;
    auto draw_size = [&](Eigen::Index i) {
        for (;;) {
            const double v = p.beta0 + p.beta1 * pop.y[i] + sde * rng.normal();
            if (v > 0.0) {
                pop.nu[i] = v;
                return;
            }
            if (++rejections >= max_rejections)
                throw InfeasibleDesign("generate_population: 10^4 consecutive rejections (sizes not positive)");
        }
    };
    for (Eigen::Index i = 0; i < Ni; ++i) {
        draw_size(i);
        rejections = 0;
    }
    // Redraw units that would be certainty units until none remain.
    for (;;) {
        const double cap = pop.nu.sum() / static_cast<double>(n);
        Eigen::Index worst = -1;
        for (Eigen::Index i = 0; i < Ni; ++i)
            if (pop.nu[i] >= cap && (worst < 0 || pop.nu[i] > pop.nu[worst])) worst = i;
        if (worst < 0) break;
        if (++rejections >= max_rejections)
            throw InfeasibleDesign("generate_population: 10^4 consecutive rejections (certainty units)");
        draw_size(worst);
    }
    pop.t = pop.nu.sum();
    return pop;
}

NigResult nig_infer(const ObservedData& data, const GibbsConfig& mcmc, const NormConstConfig& constants, std::size_t M0,
                    double level, RandomStream& rng, const GibbsState* start) {
    RandomStream gibbs_rng = rng.substream(1);
    const RandomStream const_root = rng.substream(2);
    RandomStream sir_rng = rng.substream(3);

    GibbsState state = start ? *start : initial_state(data, mcmc.variant, gibbs_rng);
    auto run = run_gibbs(data, mcmc, state, gibbs_rng);
    const auto M = run.draws.size();
    const auto n = static_cast<Eigen::Index>(data.n);
    std::vector<double> log_c(M);
    Vector y(static_cast<Eigen::Index>(data.N));
    y.head(n) = data.y_s;

    NigResult out;
    for (std::size_t k = 0; k < M; ++k) {
        auto& d = run.draws[k];
        y.tail(y.size() - n) = d.y_ns;
        RandomStream r = const_root.substream(k);
        const auto est = log_C(y, d.beta0, d.beta1, d.sigmaE2, data.t, data.n, data.N, constants, r);
        d.log_c = est.log_c;
        log_c[k] = est.log_c;
        out.flagged_constants += est.flagged;
    }
    const auto wd = compute_weights(log_c);
    out.ess = wd.ess;
    for (std::size_t k = 0; k < M; ++k)
        if (wd.normalized[static_cast<Eigen::Index>(k)] > 0.0)
            out.weighted_ybar += wd.normalized[static_cast<Eigen::Index>(k)] *
                                 finite_population_functionals(run.draws[k], data, mcmc.variant).ybar;
    const auto picks = resample_without_replacement(wd, std::min(M0, wd.positive), sir_rng);

    out.ybar_draws.reserve(picks.size());
    out.ey_draws.reserve(picks.size());
    double ns_sum = 0.0;
    for (auto k : picks) {
        const auto f = finite_population_functionals(run.draws[k], data, mcmc.variant);
        out.ybar_draws.push_back(f.ybar);
        out.ey_draws.push_back(f.ey);
        ns_sum += run.draws[k].y_ns.mean();
    }
    out.posterior_mean_nonsampled = ns_sum / static_cast<double>(picks.size());
    out.ybar = summarize(out.ybar_draws, level);
    out.ey = summarize(out.ey_draws, level);
    out.diagnostics = run.diagnostics;
    return out;
}

ReplicationResult run_replication(const ExperimentCell& cell, std::size_t rep) {
    const auto start = std::chrono::steady_clock::now();
    ReplicationResult r;
    r.rep = rep;
    const RandomStream base(cell.seed, combine_ids(fnv1a(cell.name), rep));
    try {
        RandomStream pop_rng = base.substream(1);
        RandomStream design_rng = base.substream(2);
        RandomStream nig_rng = base.substream(3);
        RandomStream ig_rng = base.substream(4);

        const auto pop = generate_population(cell.params, cell.N, cell.n, pop_rng);
        r.truth_ybar = pop.mean_y();
        r.truth_ey = std::exp(cell.params.mu + 0.5 * cell.params.sigma2);
        r.corr = pearson(pop.y, pop.nu);

        // Random frame order, then systematic pps along it.
        std::vector<std::size_t> frame(cell.N);
        std::iota(frame.begin(), frame.end(), std::size_t{0});
        std::shuffle(frame.begin(), frame.end(), design_rng.engine());
        Vector nu_frame(static_cast<Eigen::Index>(cell.N));
        for (std::size_t i = 0; i < cell.N; ++i) nu_frame[static_cast<Eigen::Index>(i)] = pop.nu[static_cast<Eigen::Index>(frame[i])];
        const auto picks = systematic_pps(nu_frame, cell.n, design_rng);

        std::vector<std::size_t> sample_idx;
        Vector y_s(static_cast<Eigen::Index>(cell.n)), nu_s(static_cast<Eigen::Index>(cell.n));
        for (std::size_t j = 0; j < cell.n; ++j) {
            const auto unit = frame[picks[j]];
            sample_idx.push_back(unit);
            y_s[static_cast<Eigen::Index>(j)] = pop.y[static_cast<Eigen::Index>(unit)];
            nu_s[static_cast<Eigen::Index>(j)] = pop.nu[static_cast<Eigen::Index>(unit)];
        }
        const Vector pi_s = nu_s * (static_cast<double>(cell.n) / pop.t);
        const auto data = ObservedData::from_sample(y_s, pi_s, pop.t, cell.N, sample_idx);
        r.sample_mean = y_s.mean();

        const auto nig = nig_infer(data, cell.mcmc, cell.constants, cell.sir_M0, cell.level, nig_rng);
        r.nig_ybar = pick(nig.ybar, cell.interval);
        r.nig_ey = pick(nig.ey, cell.interval);
        r.nig_post_mean_ns = nig.posterior_mean_nonsampled;
        r.nig_ess = nig.ess;

        const auto ig = ig_infer(y_s, cell.N, cell.sir_M0, cell.level, cell.mcmc.variant, ig_rng);
        r.ig_ybar = pick(ig.ybar, cell.interval);
        r.ig_ey = pick(ig.ey, cell.interval);

        const auto ht = ht_estimate(y_s, data.nu_s, pop.t, cell.N, cell.level, cell.ht_form);
        r.ht_ybar = {ht.mean_hat, ht.mean_ci.lo, ht.mean_ci.hi};
        r.ok = true;
    } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

double adjust_width(const std::vector<IntervalRecord>& a, const std::vector<IntervalRecord>& b) {
    if (a.size() != b.size()) throw ConstraintViolation("adjust_width: interval lists differ in length");
    if (a.empty()) throw ConstraintViolation("adjust_width: no intervals");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double mid = 0.5 * (a[i].lo + a[i].hi);
        const double half = 0.5 * (b[i].hi - b[i].lo);
        hits += mid - half <= a[i].truth && a[i].truth <= mid + half;
    }
    return static_cast<double>(hits) / static_cast<double>(a.size());
}

namespace {

TargetMetrics target_metrics(const std::vector<const ReplicationResult*>& ok, MethodInterval ReplicationResult::*method,
                             double ReplicationResult::*truth, MethodInterval ReplicationResult::*reference) {
    TargetMetrics m;
    const double K = static_cast<double>(ok.size());
    std::vector<IntervalRecord> mine, ref;
    std::size_t covered = 0;
    for (const auto* r : ok) {
        const auto& iv = r->*method;
        const double tr = r->*truth;
        m.relative_bias += (iv.point - tr) / tr;
        m.mean_width += iv.hi - iv.lo;
        covered += iv.lo <= tr && tr <= iv.hi;
        mine.push_back({iv.lo, iv.hi, tr});
        const auto& rv = r->*reference;
        ref.push_back({rv.lo, rv.hi, tr});
    }
    m.relative_bias /= K;
    m.mean_width /= K;
    m.coverage = static_cast<double>(covered) / K;
    m.coverage_se = std::sqrt(m.coverage * (1.0 - m.coverage) / K);
    m.adjusted_coverage = adjust_width(mine, ref);
    m.adjusted_coverage_se = std::sqrt(m.adjusted_coverage * (1.0 - m.adjusted_coverage) / K);
    return m;
}

} // namespace

CellMetrics summarize_cell(const ExperimentCell& cell, const std::vector<ReplicationResult>& reps) {
    CellMetrics m;
    m.name = cell.name;
    std::vector<const ReplicationResult*> ok;
    for (const auto& r : reps) {
        if (r.ok)
            ok.push_back(&r);
        else
            ++m.failed;
    }
    m.completed = ok.size();
    m.cell_failed = static_cast<double>(m.failed) > 0.05 * static_cast<double>(reps.size()) || ok.empty();
    if (ok.empty()) return m;
    for (const auto* r : ok) {
        m.mean_corr += r->corr;
        m.mean_ess += r->nig_ess;
    }
    m.mean_corr /= static_cast<double>(ok.size());
    m.mean_ess /= static_cast<double>(ok.size());
    using R = ReplicationResult;
    m.nig_ybar = target_metrics(ok, &R::nig_ybar, &R::truth_ybar, &R::nig_ybar);
    m.nig_ey = target_metrics(ok, &R::nig_ey, &R::truth_ey, &R::nig_ey);
    m.ig_ybar = target_metrics(ok, &R::ig_ybar, &R::truth_ybar, &R::nig_ybar);
    m.ig_ey = target_metrics(ok, &R::ig_ey, &R::truth_ey, &R::nig_ey);
    m.ht_ybar = target_metrics(ok, &R::ht_ybar, &R::truth_ybar, &R::nig_ybar);
    return m;
}

CellRun run_cell(const ExperimentCell& cell, std::size_t workers, const ProgressFn& progress) {
    cell.validate();
    CellRun run;
    run.cell = cell;
    run.reps.resize(cell.K);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t rep = next.fetch_add(1);
            if (rep >= cell.K) return;
            run.reps[rep] = run_replication(cell, rep);
            const std::size_t d = done.fetch_add(1) + 1;
            if (progress) {
                std::lock_guard<std::mutex> lock(progress_mutex);
                progress(cell.name, d, cell.K);
            }
        }
    };
    workers = std::max<std::size_t>(1, std::min(workers, cell.K));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    run.metrics = summarize_cell(cell, run.reps);
    return run;
}

std::vector<ExperimentCell> load_config(const std::filesystem::path& path) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::ini_parser::read_ini(path.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConstraintViolation(std::string("config: ") + e.what());
    }
    static const std::set<std::string> known = {
        "N", "n", "K", "seed", "burn_in", "keep", "thin", "sir_m0", "variant", "ht_ci", "interval", "level",
        "random_scan", "selection_factor", "mvn_randomizations", "mvn_initial_points", "mvn_max_points", "mvn_target",
        "r2_burn_in", "r2_draws", "mu", "sigma", "beta0", "beta1", "sigma_e", "tables", "figures"};
    pt::ptree defaults;
    if (auto d = tree.get_child_optional("defaults")) defaults = *d;

    auto parse_set = [](const std::string& s) {
        std::set<int> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) out.insert(std::stoi(item));
        return out;
    };

    std::vector<ExperimentCell> cells;
    for (const auto& [section, body] : tree) {
        if (section == "defaults") continue;
        for (const pt::ptree* sec : {static_cast<const pt::ptree*>(&defaults), &body})
            for (const auto& kv : *sec)
                if (!known.count(kv.first)) throw ConstraintViolation("config: unknown key '" + kv.first + "' in [" + section + "]");
        auto get = [&](const std::string& key, auto fallback) {
            using T = decltype(fallback);
            if (auto v = body.get_optional<T>(key)) return *v;
            if (auto v = defaults.get_optional<T>(key)) return *v;
            return fallback;
        };
        auto require = [&](const std::string& key) {
            if (auto v = body.get_optional<double>(key)) return *v;
            if (auto v = defaults.get_optional<double>(key)) return *v;
            throw ConstraintViolation("config: [" + section + "] is missing '" + key + "'");
        };
        ExperimentCell c;
        c.name = section;
        c.params.mu = require("mu");
        const double sigma = require("sigma");
        c.params.sigma2 = sigma * sigma;
        c.params.beta0 = require("beta0");
        c.params.beta1 = require("beta1");
        const double se = require("sigma_e");
        c.params.sigmaE2 = se * se;
        c.N = get("N", c.N);
        c.n = get("n", c.n);
        c.K = get("K", c.K);
        c.seed = get("seed", c.seed);
        c.mcmc.burn_in = get("burn_in", c.mcmc.burn_in);
        c.mcmc.keep = get("keep", c.mcmc.keep);
        c.mcmc.thin = get("thin", c.mcmc.thin);
        c.mcmc.variant = parse_variant(get("variant", std::string("appendixB-literal")));
        c.mcmc.random_scan = get("random_scan", false);
        c.mcmc.selection_factor = get("selection_factor", true);
        c.sir_M0 = get("sir_m0", c.sir_M0);
        c.level = get("level", c.level);
        const auto ht = get("ht_ci", std::string("rooted"));
        if (ht != "rooted" && ht != "literal") throw ConstraintViolation("config: ht_ci must be rooted or literal");
        c.ht_form = ht == "rooted" ? HtInterval::Rooted : HtInterval::Literal;
        const auto iv = get("interval", std::string("equal-tail"));
        if (iv != "equal-tail" && iv != "hpd") throw ConstraintViolation("config: interval must be equal-tail or hpd");
        c.interval = iv == "hpd" ? IntervalKind::HPD : IntervalKind::EqualTail;
        c.constants.mvn.randomizations = get("mvn_randomizations", c.constants.mvn.randomizations);
        c.constants.mvn.initial_points = get("mvn_initial_points", c.constants.mvn.initial_points);
        c.constants.mvn.max_points = get("mvn_max_points", c.constants.mvn.max_points);
        c.constants.mvn.target_error = get("mvn_target", c.constants.mvn.target_error);
        c.constants.r2_burn_in = get("r2_burn_in", c.constants.r2_burn_in);
        c.constants.r2_draws = get("r2_draws", c.constants.r2_draws);
        c.tables = parse_set(get("tables", std::string()));
        c.figures = parse_set(get("figures", std::string()));
        c.validate();
        cells.push_back(std::move(c));
    }
    return cells;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s + "\n";
}

double sigma_of(const ExperimentCell& c) { return std::sqrt(c.params.sigma2); }
double sigma_e_of(const ExperimentCell& c) { return std::sqrt(c.params.sigmaE2); }

nlohmann::json cell_json(const ExperimentCell& c) {
    return {{"name", c.name},
            {"mu", c.params.mu},
            {"sigma", sigma_of(c)},
            {"beta0", c.params.beta0},
            {"beta1", c.params.beta1},
            {"sigma_e", sigma_e_of(c)},
            {"N", c.N},
            {"n", c.n},
            {"K", c.K},
            {"seed", c.seed},
            {"burn_in", c.mcmc.burn_in},
            {"keep", c.mcmc.keep},
            {"thin", c.mcmc.thin},
            {"variant", to_string(c.mcmc.variant)},
            {"selection_factor", c.mcmc.selection_factor},
            {"sir_m0", c.sir_M0},
            {"level", c.level},
            {"interval", c.interval == IntervalKind::HPD ? "hpd" : "equal-tail"},
            {"ht_ci", c.ht_form == HtInterval::Rooted ? "rooted" : "literal"},
            {"mvn", {{"randomizations", c.constants.mvn.randomizations},
                     {"initial_points", c.constants.mvn.initial_points},
                     {"max_points", c.constants.mvn.max_points},
                     {"target", c.constants.mvn.target_error}}},
            {"r2", {{"burn_in", c.constants.r2_burn_in}, {"draws", c.constants.r2_draws}}},
            {"tables", c.tables},
            {"figures", c.figures}};
}

} // namespace

std::string cell_description(const ExperimentCell& cell) { return cell_json(cell).dump(); }

void emit_outputs(const std::vector<CellRun>& runs, const std::filesystem::path& out_dir, const std::string& manifest_extra_json) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());

    auto rows_for = [&](int table) {
        std::vector<const CellRun*> rows;
        for (const auto& r : runs)
            if (r.cell.tables.count(table)) rows.push_back(&r);
        return rows;
    };

    {
        std::string s = join({"mu", "sigma", "corr", "ig_rb_ey", "ig_rb_ybar", "nig_rb_ey", "nig_rb_ybar"});
        for (const auto* r : rows_for(1)) {
            const auto& m = r->metrics;
            s += join({fmt(r->cell.params.mu), fmt(sigma_of(r->cell)), fmt(m.mean_corr), fmt(m.ig_ey.relative_bias),
                       fmt(m.ig_ybar.relative_bias), fmt(m.nig_ey.relative_bias), fmt(m.nig_ybar.relative_bias)});
        }
        write_file(out_dir / "table1.csv", s);
    }
    {
        std::string s = join({"mu", "sigma", "corr", "ig_ey_width", "ig_ey_cp", "ig_ey_adj_cp", "ig_ybar_width", "ig_ybar_cp",
                              "ig_ybar_adj_cp", "nig_ey_width", "nig_ey_cp", "nig_ybar_width", "nig_ybar_cp", "ig_ey_adj_cp_se",
                              "ig_ybar_adj_cp_se", "nig_ey_cp_se", "nig_ybar_cp_se"});
        for (const auto* r : rows_for(2)) {
            const auto& m = r->metrics;
            s += join({fmt(r->cell.params.mu), fmt(sigma_of(r->cell)), fmt(m.mean_corr), fmt(m.ig_ey.mean_width),
                       fmt(m.ig_ey.coverage), fmt(m.ig_ey.adjusted_coverage), fmt(m.ig_ybar.mean_width), fmt(m.ig_ybar.coverage),
                       fmt(m.ig_ybar.adjusted_coverage), fmt(m.nig_ey.mean_width), fmt(m.nig_ey.coverage),
                       fmt(m.nig_ybar.mean_width), fmt(m.nig_ybar.coverage), fmt(m.ig_ey.adjusted_coverage_se),
                       fmt(m.ig_ybar.adjusted_coverage_se), fmt(m.nig_ey.coverage_se), fmt(m.nig_ybar.coverage_se)});
        }
        write_file(out_dir / "table2.csv", s);
    }
    for (int table : {3, 4}) {
        std::vector<std::string> head = table == 3 ? std::vector<std::string>{"mu", "sigma", "corr"}
                                                   : std::vector<std::string>{"beta0", "sigma_e", "corr"};
        for (const char* h : {"ht_rb_ybar", "nig_rb_ybar", "ht_width", "ht_cp", "ht_adj_cp", "nig_width", "nig_cp", "ht_adj_cp_se",
                              "nig_cp_se"})
            head.push_back(h);
        std::string s = join(head);
        for (const auto* r : rows_for(table)) {
            const auto& m = r->metrics;
            const auto& c = r->cell;
            std::vector<std::string> row = table == 3 ? std::vector<std::string>{fmt(c.params.mu), fmt(sigma_of(c)), fmt(m.mean_corr)}
                                                      : std::vector<std::string>{fmt(c.params.beta0), fmt(sigma_e_of(c)), fmt(m.mean_corr)};
            for (double v : {m.ht_ybar.relative_bias, m.nig_ybar.relative_bias, m.ht_ybar.mean_width, m.ht_ybar.coverage,
                             m.ht_ybar.adjusted_coverage, m.nig_ybar.mean_width, m.nig_ybar.coverage, m.ht_ybar.adjusted_coverage_se,
                             m.nig_ybar.coverage_se})
                row.push_back(fmt(v));
            s += join(row);
        }
        write_file(out_dir / ("table" + std::to_string(table) + ".csv"), s);
    }

    for (const auto& r : runs) {
        if (r.cell.figures.count(1)) {
            std::string s = join({"population", "sample_mean", "posterior_mean_nonsampled"});
            for (const auto& rep : r.reps)
                if (rep.ok) s += join({std::to_string(rep.rep + 1), fmt(rep.sample_mean), fmt(rep.nig_post_mean_ns)});
            write_file(out_dir / "figure1.csv", s);
        }
        for (int fig : {2, 3}) {
            if (!r.cell.figures.count(fig)) continue;
            std::string s = join({"population", "nig_rb", "ht_rb"});
            for (const auto& rep : r.reps)
                if (rep.ok)
                    s += join({std::to_string(rep.rep + 1), fmt((rep.nig_ybar.point - rep.truth_ybar) / rep.truth_ybar),
                               fmt((rep.ht_ybar.point - rep.truth_ybar) / rep.truth_ybar)});
            write_file(out_dir / ("figure" + std::to_string(fig) + ".csv"), s);
        }
    }

    {
        std::vector<std::string> head = {"cell", "mu", "sigma", "beta0", "beta1", "sigma_e", "completed", "failed", "corr", "nig_ess"};
        const char* targets[] = {"nig_ybar", "nig_ey", "ig_ybar", "ig_ey", "ht_ybar"};
        for (const char* t : targets)
            for (const char* f : {"rb", "width", "cp", "cp_se", "adj_cp", "adj_cp_se"}) head.push_back(std::string(t) + "_" + f);
        std::string s = join(head);
        for (const auto& r : runs) {
            const auto& m = r.metrics;
            const auto& c = r.cell;
            std::vector<std::string> row = {c.name, fmt(c.params.mu), fmt(sigma_of(c)), fmt(c.params.beta0), fmt(c.params.beta1),
                                            fmt(sigma_e_of(c)), std::to_string(m.completed), std::to_string(m.failed), fmt(m.mean_corr),
                                            fmt(m.mean_ess)};
            for (const TargetMetrics* t : {&m.nig_ybar, &m.nig_ey, &m.ig_ybar, &m.ig_ey, &m.ht_ybar})
                for (double v : {t->relative_bias, t->mean_width, t->coverage, t->coverage_se, t->adjusted_coverage, t->adjusted_coverage_se})
                    row.push_back(fmt(v));
            s += join(row);
        }
        write_file(out_dir / "cells.csv", s);
    }

    for (const auto& r : runs) {
        std::string s = join({"rep", "ok", "truth_ybar", "truth_ey", "corr", "sample_mean", "nig_post_mean_ns", "nig_ess",
                              "nig_ybar", "nig_ybar_lo", "nig_ybar_hi", "nig_ey", "nig_ey_lo", "nig_ey_hi", "ig_ybar", "ig_ybar_lo",
                              "ig_ybar_hi", "ig_ey", "ig_ey_lo", "ig_ey_hi", "ht_ybar", "ht_ybar_lo", "ht_ybar_hi", "error"});
        for (const auto& rep : r.reps) {
            std::vector<std::string> row = {std::to_string(rep.rep), rep.ok ? "1" : "0"};
            for (double v : {rep.truth_ybar, rep.truth_ey, rep.corr, rep.sample_mean, rep.nig_post_mean_ns, rep.nig_ess})
                row.push_back(fmt(v));
            for (const auto* iv : {&rep.nig_ybar, &rep.nig_ey, &rep.ig_ybar, &rep.ig_ey, &rep.ht_ybar})
                for (double v : {iv->point, iv->lo, iv->hi}) row.push_back(fmt(v));
            std::string err = rep.error;
            std::replace(err.begin(), err.end(), ',', ';');
            std::replace(err.begin(), err.end(), '\n', ' ');
            row.push_back("\"" + err + "\"");
            s += join(row);
        }
        write_file(out_dir / ("replications_" + r.cell.name + ".csv"), s);
    }

    nlohmann::json manifest;
    manifest["program"] = "infsamp";
    manifest["version"] = "0.1.0";
    manifest["cells"] = nlohmann::json::array();
    for (const auto& r : runs) {
        auto c = cell_json(r.cell);
        c["completed"] = r.metrics.completed;
        c["failed"] = r.metrics.failed;
        c["cell_failed"] = r.metrics.cell_failed;
        manifest["cells"].push_back(std::move(c));
    }
    manifest["run"] = nlohmann::json::parse(manifest_extra_json);
    write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

} // namespace infsamp
