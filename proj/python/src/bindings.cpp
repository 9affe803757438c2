#include "infsamp/baselines.hpp"
#include "infsamp/error.hpp"
#include "infsamp/harness.hpp"
#include "infsamp/normconst.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace infsamp;

namespace {

py::dict interval_dict(const IntervalEstimate& e) {
    py::dict d;
    d["point"] = e.point;
    d["lo"] = e.lo;
    d["hi"] = e.hi;
    return d;
}

py::dict summary_dict(const Summary& s) {
    py::dict d;
    d["equal_tail"] = interval_dict(s.equal_tail);
    d["hpd"] = interval_dict(s.hpd);
    return d;
}

py::dict target_dict(const TargetMetrics& m) {
    py::dict d;
    d["relative_bias"] = m.relative_bias;
    d["mean_width"] = m.mean_width;
    d["coverage"] = m.coverage;
    d["coverage_se"] = m.coverage_se;
    d["adjusted_coverage"] = m.adjusted_coverage;
    d["adjusted_coverage_se"] = m.adjusted_coverage_se;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Predictive inference for finite-population means under informative PPS sampling.";

    py::register_exception<ConstraintViolation>(m, "ConstraintViolation", PyExc_ValueError);
    py::register_exception<InfeasibleDesign>(m, "InfeasibleDesign", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<DecompositionError>(m, "DecompositionError", PyExc_RuntimeError);
    py::register_exception<NumericalFault>(m, "NumericalFault", PyExc_RuntimeError);

    py::class_<RandomStream>(m, "RandomStream")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream_id") = 0)
        .def("substream", &RandomStream::substream)
        .def("uniform", &RandomStream::uniform)
        .def("normal", &RandomStream::normal)
        .def_property_readonly("seed", &RandomStream::seed)
        .def_property_readonly("stream_id", &RandomStream::stream_id);

    py::enum_<ModelVariant>(m, "ModelVariant")
        .value("APPENDIX_B_LITERAL", ModelVariant::AppendixBLiteral)
        .value("LOGNORMAL_Y", ModelVariant::LognormalY);
    py::enum_<IntervalKind>(m, "IntervalKind").value("EQUAL_TAIL", IntervalKind::EqualTail).value("HPD", IntervalKind::HPD);
    py::enum_<HtInterval>(m, "HtInterval").value("ROOTED", HtInterval::Rooted).value("LITERAL", HtInterval::Literal);

    py::class_<SuperParams>(m, "SuperParams")
        .def(py::init([](double mu, double sigma2, double beta0, double beta1, double sigmaE2) {
                 return SuperParams{mu, sigma2, beta0, beta1, sigmaE2};
             }),
             py::arg("mu") = 0.0, py::arg("sigma2") = 1.0, py::arg("beta0") = 0.0, py::arg("beta1") = 1.0,
             py::arg("sigmaE2") = 1.0)
        .def_readwrite("mu", &SuperParams::mu)
        .def_readwrite("sigma2", &SuperParams::sigma2)
        .def_readwrite("beta0", &SuperParams::beta0)
        .def_readwrite("beta1", &SuperParams::beta1)
        .def_readwrite("sigmaE2", &SuperParams::sigmaE2);

    py::class_<FinitePopulation>(m, "FinitePopulation")
        .def_readonly("y", &FinitePopulation::y)
        .def_readonly("nu", &FinitePopulation::nu)
        .def_readonly("t", &FinitePopulation::t)
        .def("mean_y", &FinitePopulation::mean_y);

    py::class_<ObservedData>(m, "ObservedData")
        .def_static("from_sample", &ObservedData::from_sample, py::arg("y_s"), py::arg("pi_s"), py::arg("t"), py::arg("N"),
                    py::arg("sample_idx") = std::vector<std::size_t>{})
        .def_readonly("y_s", &ObservedData::y_s)
        .def_readonly("pi_s", &ObservedData::pi_s)
        .def_readonly("nu_s", &ObservedData::nu_s)
        .def_readonly("t", &ObservedData::t)
        .def_readonly("n", &ObservedData::n)
        .def_readonly("N", &ObservedData::N);

    py::class_<MvnOptions>(m, "MvnOptions")
        .def(py::init<>())
        .def_readwrite("randomizations", &MvnOptions::randomizations)
        .def_readwrite("initial_points", &MvnOptions::initial_points)
        .def_readwrite("max_points", &MvnOptions::max_points)
        .def_readwrite("target_error", &MvnOptions::target_error);

    py::class_<NormConstConfig>(m, "NormConstConfig")
        .def(py::init<>())
        .def_readwrite("mvn", &NormConstConfig::mvn)
        .def_readwrite("r2_burn_in", &NormConstConfig::r2_burn_in)
        .def_readwrite("r2_draws", &NormConstConfig::r2_draws);

    py::class_<GibbsConfig>(m, "GibbsConfig")
        .def(py::init<>())
        .def_readwrite("burn_in", &GibbsConfig::burn_in)
        .def_readwrite("keep", &GibbsConfig::keep)
        .def_readwrite("thin", &GibbsConfig::thin)
        .def_readwrite("variant", &GibbsConfig::variant)
        .def_readwrite("random_scan", &GibbsConfig::random_scan)
        .def_readwrite("selection_factor", &GibbsConfig::selection_factor)
        .def_readwrite("fix_eta", &GibbsConfig::fix_eta);

    py::class_<ConstantEstimate>(m, "ConstantEstimate")
        .def_readonly("log_c", &ConstantEstimate::log_c)
        .def_readonly("log_c0", &ConstantEstimate::log_c0)
        .def_readonly("log_r1_prob", &ConstantEstimate::log_r1_prob)
        .def_readonly("r2_proportion", &ConstantEstimate::r2_proportion)
        .def_readonly("mc_error", &ConstantEstimate::mc_error)
        .def_readonly("flagged", &ConstantEstimate::flagged);

    m.def("inclusion_probs", &inclusion_probs, py::arg("nu"), py::arg("n"));
    m.def("systematic_pps", &systematic_pps, py::arg("nu"), py::arg("n"), py::arg("rng"));
    m.def("generate_population", &generate_population, py::arg("params"), py::arg("N"), py::arg("n"), py::arg("rng"));

    m.def("log_C", &log_C, py::arg("y"), py::arg("beta0"), py::arg("beta1"), py::arg("sigmaE2"), py::arg("t"), py::arg("n"),
          py::arg("N"), py::arg("config") = NormConstConfig{}, py::arg("rng"));

    m.def(
        "ht_estimate",
        [](const Vector& y_s, const Vector& nu_s, double t, std::size_t N, double level, HtInterval form) {
            const auto r = ht_estimate(y_s, nu_s, t, N, level, form);
            py::dict d;
            d["total"] = r.total_hat;
            d["variance"] = r.var_hat;
            d["total_ci"] = interval_dict(r.ci);
            d["mean"] = r.mean_hat;
            d["mean_ci"] = interval_dict(r.mean_ci);
            return d;
        },
        py::arg("y_s"), py::arg("nu_s"), py::arg("t"), py::arg("N"), py::arg("level") = 0.95,
        py::arg("form") = HtInterval::Rooted);

    m.def(
        "ig_infer",
        [](const Vector& y_s, std::size_t N, std::size_t M0, double level, ModelVariant variant, RandomStream& rng) {
            auto r = ig_infer(y_s, N, M0, level, variant, rng);
            py::dict d;
            d["ybar"] = summary_dict(r.ybar);
            d["ey"] = summary_dict(r.ey);
            d["ybar_draws"] = std::move(r.ybar_draws);
            d["ey_draws"] = std::move(r.ey_draws);
            return d;
        },
        py::arg("y_s"), py::arg("N"), py::arg("M0") = 1000, py::arg("level") = 0.95,
        py::arg("variant") = ModelVariant::AppendixBLiteral, py::arg("rng"));

    m.def(
        "nig_infer",
        [](const ObservedData& data, const GibbsConfig& mcmc, const NormConstConfig& constants, std::size_t M0, double level,
           RandomStream& rng) {
            NigResult r;
            {
                py::gil_scoped_release release;
                r = nig_infer(data, mcmc, constants, M0, level, rng);
            }
            py::dict d;
            d["ybar"] = summary_dict(r.ybar);
            d["ey"] = summary_dict(r.ey);
            d["ess"] = r.ess;
            d["weighted_ybar"] = r.weighted_ybar;
            d["flagged_constants"] = r.flagged_constants;
            d["ybar_draws"] = std::move(r.ybar_draws);
            d["ey_draws"] = std::move(r.ey_draws);
            return d;
        },
        py::arg("data"), py::arg("mcmc") = GibbsConfig{}, py::arg("constants") = NormConstConfig{}, py::arg("M0") = 200,
        py::arg("level") = 0.95, py::arg("rng"));

    py::class_<ExperimentCell>(m, "ExperimentCell")
        .def_readwrite("name", &ExperimentCell::name)
        .def_readwrite("params", &ExperimentCell::params)
        .def_readwrite("N", &ExperimentCell::N)
        .def_readwrite("n", &ExperimentCell::n)
        .def_readwrite("K", &ExperimentCell::K)
        .def_readwrite("mcmc", &ExperimentCell::mcmc)
        .def_readwrite("constants", &ExperimentCell::constants)
        .def_readwrite("sir_M0", &ExperimentCell::sir_M0)
        .def_readwrite("level", &ExperimentCell::level)
        .def_readwrite("seed", &ExperimentCell::seed)
        .def("validate", &ExperimentCell::validate)
        .def("describe", &cell_description);

    m.def("load_config", &load_config, py::arg("path"));

    py::class_<CellRun>(m, "CellRun").def_readonly("cell", &CellRun::cell);

    m.def(
        "run_cell",
        [](const ExperimentCell& cell, std::size_t workers) {
            py::gil_scoped_release release;
            return run_cell(cell, workers);
        },
        py::arg("cell"), py::arg("workers") = 1);

    m.def(
        "cell_metrics",
        [](const CellRun& run) {
            const auto& c = run.metrics;
            py::dict d;
            d["name"] = c.name;
            d["completed"] = c.completed;
            d["failed"] = c.failed;
            d["cell_failed"] = c.cell_failed;
            d["nig_ybar"] = target_dict(c.nig_ybar);
            d["nig_ey"] = target_dict(c.nig_ey);
            d["ig_ybar"] = target_dict(c.ig_ybar);
            d["ig_ey"] = target_dict(c.ig_ey);
            d["ht_ybar"] = target_dict(c.ht_ybar);
            return d;
        },
        py::arg("run"));

    m.def("emit_outputs", &emit_outputs, py::arg("runs"), py::arg("out_dir"), py::arg("manifest_extra_json") = "{}");
}
