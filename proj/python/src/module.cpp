#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include "bnpmix/diagnostics.hpp"
#include "bnpmix/eppf.hpp"
#include "bnpmix/errors.hpp"
#include "bnpmix/harness.hpp"
#include "bnpmix/mtm.hpp"
#include "bnpmix/ot.hpp"
#include "bnpmix/prior_clusters.hpp"
#include "bnpmix/sampler.hpp"

namespace py = pybind11;
using namespace bnpmix;

namespace {

// Python objects cross as JSON text; the json module is always present.
nlohmann::json to_json(const py::object& obj) {
  if (obj.is_none()) return nlohmann::json::object();
  const auto dumps = py::module_::import("json").attr("dumps");
  return nlohmann::json::parse(dumps(obj).cast<std::string>());
}

py::object from_json(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

AtomicMeasure measure(std::vector<double> weights, std::vector<std::vector<double>> locations) {
  AtomicMeasure m{std::move(weights), std::move(locations)};
  m.validate(1e-9);
  return m;
}

py::dict path_dict(const RegularizationPath& p) { return from_json(path_json(p)).cast<py::dict>(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "bnpmix native core";
  m.attr("__version__") = BNPMIX_VERSION;

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<BracketError>(m, "BracketError", PyExc_ValueError);
  py::register_exception<PrecisionError>(m, "PrecisionError", PyExc_ArithmeticError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<ProcessSpec>(m, "ProcessSpec")
      .def_static("dp", &ProcessSpec::dp, py::arg("alpha"))
      .def_static("py", &ProcessSpec::py, py::arg("sigma"), py::arg("alpha"))
      .def_static("ngg", &ProcessSpec::ngg, py::arg("sigma"), py::arg("beta"))
      .def_static("dmp", &ProcessSpec::dmp, py::arg("alpha"), py::arg("K"))
      .def_static("pym", &ProcessSpec::pym, py::arg("sigma"), py::arg("alpha"), py::arg("K"))
      .def_static("nggm", &ProcessSpec::nggm, py::arg("sigma"), py::arg("beta"), py::arg("K"))
      .def_static("from_dict", [](const py::object& d) { return spec_from_json(to_json(d)); })
      .def("to_dict", [](const ProcessSpec& s) { return from_json(spec_to_json(s)); })
      .def_property_readonly("family", [](const ProcessSpec& s) { return to_string(s.family); })
      .def_readonly("alpha", &ProcessSpec::alpha)
      .def_readonly("sigma", &ProcessSpec::sigma)
      .def_readonly("beta", &ProcessSpec::beta)
      .def_readonly("K", &ProcessSpec::K)
      .def("__repr__", &ProcessSpec::describe)
      .def(py::self == py::self);

  m.def(
      "log_eppf",
      [](const ProcessSpec& spec, std::vector<long> blocks, bool unordered, long bits) {
        const EppfEvaluator eval(spec, Composition(blocks).n(), bits);
        const Composition comp(std::move(blocks));
        return static_cast<double>((unordered ? eval.log_eppf_unordered(comp) : eval.log_eppf(comp)).log());
      },
      py::arg("spec"), py::arg("blocks"), py::arg("unordered") = false, py::arg("precision_bits") = kDefaultPrecisionBits,
      "Log probability of a partition with the given block sizes (-inf when impossible).");

  m.def(
      "prior_kn",
      [](const ProcessSpec& spec, long n, const std::string& method, long draws, std::uint64_t seed, long bits) {
        const PriorKnPmf pmf = method == "mc" ? prior_kn_mc(spec, n, draws, seed, bits) : prior_kn_exact(spec, n, bits);
        return pmf.pmf;
      },
      py::arg("spec"), py::arg("n"), py::arg("method") = "exact", py::arg("draws") = 20000, py::arg("seed") = 1,
      py::arg("precision_bits") = kDefaultPrecisionBits, "P(K_n = k) for k = 1.., as a list indexed from 0.");
  m.def("prior_mean_kn", &prior_mean_kn, py::arg("spec"), py::arg("n"),
        py::arg("precision_bits") = kDefaultPrecisionBits);
  m.def(
      "solve_param_for_ekn",
      [](const ProcessSpec& base, const std::string& free, long n, double target) {
        return solve_param_for_ekn(base, free, n, target);
      },
      py::arg("spec"), py::arg("free"), py::arg("n"), py::arg("target"));

  m.def(
      "cnk",
      [](const ProcessSpec& spec, long n, long k, bool exact, long bits) {
        return exact ? cnk_exact(spec, n, k, bits) : cnk_fast(spec, n, k, bits);
      },
      py::arg("spec"), py::arg("n"), py::arg("k"), py::arg("exact") = false,
      py::arg("precision_bits") = kDefaultPrecisionBits);
  m.def(
      "cnk_curve",
      [](const ProcessSpec& spec, long k, const std::vector<long>& ns, long exact_max_n, long bits) {
        const auto curve = cnk_curve(spec, k, ns, exact_max_n, bits);
        std::vector<std::pair<long, double>> out;
        for (const auto& p : curve.points) out.emplace_back(p.n, p.value);
        return out;
      },
      py::arg("spec"), py::arg("k"), py::arg("ns"), py::arg("exact_max_n") = 0,
      py::arg("precision_bits") = kDefaultPrecisionBits);

  m.def(
      "wasserstein",
      [](std::vector<double> wp, std::vector<std::vector<double>> lp, std::vector<double> wq,
         std::vector<std::vector<double>> lq, double r) {
        return wasserstein(measure(std::move(wp), std::move(lp)), measure(std::move(wq), std::move(lq)), r);
      },
      py::arg("weights_p"), py::arg("locations_p"), py::arg("weights_q"), py::arg("locations_q"), py::arg("r") = 2.0);
  m.def("rate_overfitted", &rate_overfitted, py::arg("n"));

  m.def(
      "mtm_apply",
      [](std::vector<double> w, std::vector<std::vector<double>> loc, double c, double omega, double r,
         std::uint64_t seed) {
        MtmConfig cfg;
        cfg.c = c;
        cfg.omega_n = omega;
        cfg.r = r;
        cfg.seed = seed;
        const auto out = mtm_apply(measure(std::move(w), std::move(loc)), cfg);
        py::dict d;
        d["k_tilde"] = out.k_tilde;
        d["weights"] = out.measure.weights;
        d["locations"] = out.measure.locations;
        d["kept"] = out.kept;
        return d;
      },
      py::arg("weights"), py::arg("locations"), py::arg("c"), py::arg("omega"), py::arg("r") = 2.0,
      py::arg("seed") = 0);

  using Sample = std::pair<std::vector<double>, std::vector<std::vector<double>>>;
  auto samples_of = [](const std::vector<Sample>& s) {
    std::vector<AtomicMeasure> out;
    out.reserve(s.size());
    for (const auto& [w, l] : s) out.push_back(measure(w, l));
    return out;
  };
  m.def(
      "regularization_path",
      [samples_of](const std::vector<Sample>& samples, const std::vector<double>& c_grid, double omega, double r,
                   std::uint64_t seed) {
        MtmConfig base;
        base.omega_n = omega;
        base.r = r;
        base.seed = seed;
        return path_dict(regularization_path(samples_of(samples), c_grid, base));
      },
      py::arg("samples"), py::arg("c_grid"), py::arg("omega"), py::arg("r") = 2.0, py::arg("seed") = 0,
      "samples: list of (weights, locations) pairs.");
  m.def(
      "mtm_calibrate",
      [samples_of](const std::vector<Sample>& samples, double omega, long k_hint, long grid_points, double r) {
        MtmConfig base;
        base.omega_n = omega;
        base.r = r;
        const auto cal = mtm_calibrate(samples_of(samples), base, k_hint, grid_points);
        py::dict d;
        d["c_min"] = cal.c_min;
        d["c_max"] = cal.c_max;
        d["plateau_found"] = cal.plateau_found;
        d["k_plateau"] = cal.k_plateau;
        d["plateau_lo"] = cal.plateau_lo;
        d["plateau_hi"] = cal.plateau_hi;
        d["message"] = cal.message;
        d["path"] = path_dict(cal.path);
        return d;
      },
      py::arg("samples"), py::arg("omega"), py::arg("k_hint"), py::arg("grid_points") = 100, py::arg("r") = 2.0);

  m.def(
      "simulate_data",
      [](long n, std::uint64_t seed) {
        const auto data = generate_data(GenSpec::three_component(seed), n);
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(data.n()));
        for (long i = 0; i < data.n(); ++i) rows[static_cast<std::size_t>(i)].assign(data.row(i), data.row(i) + data.d);
        return py::make_tuple(rows, data.label);
      },
      py::arg("n"), py::arg("seed") = 1, "Draws from the three-component bivariate mixture: (rows, labels).");

  m.def(
      "sample_posterior",
      [](const std::vector<std::vector<double>>& rows, long K, double alpha_bar, long chains, long iters, long burnin,
         std::uint64_t seed, bool prior_only) {
        if (rows.empty()) throw DomainError("sample_posterior: no data");
        Dataset data;
        data.d = static_cast<long>(rows.front().size());
        for (const auto& r : rows) {
          if (static_cast<long>(r.size()) != data.d) throw DomainError("sample_posterior: ragged data rows");
          data.x.insert(data.x.end(), r.begin(), r.end());
          data.label.push_back(-1);
        }
        ModelConfig cfg;
        cfg.K = K;
        cfg.alpha_bar = alpha_bar;
        cfg.prior_only = prior_only;
        RunOptions opts;
        opts.n_chains = chains;
        opts.iters = iters;
        opts.burnin = burnin;
        opts.seed = seed;
        opts.snapshot_stride = 0;
        std::vector<Trace> traces;
        {
          py::gil_scoped_release release;
          traces = run_chains(data, cfg, opts);
        }
        py::dict d;
        d["kn_pmf"] = posterior_kn_pmf(traces);
        d["mean_kn"] = posterior_mean_kn(traces);
        if (chains > 1) {
          d["rhat_loglik"] = gelman_rubin(traces, TraceScalar::LogLik);
          d["rhat_k"] = gelman_rubin(traces, TraceScalar::KOccupied);
        }
        std::vector<double> medians;
        for (const auto& r : posterior_sorted_weights(traces)) medians.push_back(r.median);
        d["weight_medians"] = medians;
        return d;
      },
      py::arg("data"), py::arg("K") = 10, py::arg("alpha_bar") = 1.0, py::arg("chains") = 2, py::arg("iters") = 2000,
      py::arg("burnin") = 500, py::arg("seed") = 1, py::arg("prior_only") = false);

  m.def(
      "run_experiment",
      [](const std::string& id, const std::string& out, std::uint64_t seed, const std::string& scale,
         const py::object& overrides, unsigned threads) {
        ExperimentConfig cfg;
        cfg.id = experiment_from_string(id);
        cfg.out_dir = out;
        cfg.seed = seed;
        cfg.scale = scale_from_string(scale);
        cfg.overrides = to_json(overrides);
        cfg.threads = threads;
        RunResult res;
        {
          py::gil_scoped_release release;
          res = run(cfg);
        }
        return from_json(res.manifest);
      },
      py::arg("id"), py::arg("out"), py::arg("seed") = 2024, py::arg("scale") = "desk", py::arg("overrides") = py::none(),
      py::arg("threads") = 0, "Runs one experiment and returns its manifest.");
  m.def("experiments", [] {
    std::vector<std::string> out;
    for (auto e : all_experiments()) out.push_back(to_string(e));
    return out;
  });
}
