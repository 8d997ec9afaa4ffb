#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "bnpmix/config.hpp"
#include "bnpmix/csv.hpp"
#include "bnpmix/diagnostics.hpp"
#include "bnpmix/eppf.hpp"
#include "bnpmix/errors.hpp"
#include "bnpmix/harness.hpp"
#include "bnpmix/mtm.hpp"
#include "bnpmix/prior_clusters.hpp"
#include "bnpmix/sampler.hpp"
#include "bnpmix/trace_io.hpp"

using namespace bnpmix;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::uint64_t seed = 2024;
  std::string out;
  std::string scale = "desk";
  long precision_bits = 512;
  std::string config;
  unsigned threads = 0;
};

struct SpecArgs {
  std::string family = "dp";
  double alpha = 1.0, sigma = 0.25, beta = 1.0;
  long K = 10;

  ProcessSpec spec() const {
    ProcessSpec s;
    s.family = family_from_string(family);
    s.alpha = alpha;
    s.sigma = s.family == Family::DP || s.family == Family::DMP ? 0.0 : sigma;
    s.beta = beta;
    s.K = K;
    s.validate();
    return s;
  }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "global seed");
  app->add_option("--out", c.out, "output directory (default: $BNPMIX_OUTPUT_ROOT/<command> or ./bnpmix-out/<command>)");
  app->add_option("--scale", c.scale, "desk or full")->check(CLI::IsMember({"desk", "full"}));
  app->add_option("--precision-bits", c.precision_bits, "MPFR working precision for NGG weights");
  app->add_option("--config", c.config, "TOML or JSON file with option defaults");
  app->add_option("--threads", c.threads, "worker threads (0 = hardware concurrency)");
}

void add_spec(CLI::App* app, SpecArgs& s) {
  app->add_option("--family", s.family, "dp, py, ngg, dmp, pym or nggm");
  app->add_option("--alpha", s.alpha, "concentration");
  app->add_option("--sigma", s.sigma, "discount");
  app->add_option("--beta", s.beta, "NGG beta");
  app->add_option("-K,--components", s.K, "number of components (finite families)");
}

fs::path out_dir(const Common& c, const std::string& name) {
  fs::path p = c.out.empty() ? default_output_root() / name : fs::path(c.out);
  fs::create_directories(p);
  return p;
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

// Extra arguments taken from the config file for options the user did not
// give on the command line. Keys may sit at top level or in a table named
// after the subcommand; underscores map to dashes.
std::vector<std::string> config_args(CLI::App* sub, const json& cfg) {
  std::vector<std::string> extra;
  auto consider = [&](const std::string& key, const json& v) {
    if (v.is_object() || key == "config") return;
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    const CLI::Option* opt = sub->get_option_no_throw("--" + name);
    if (!opt || opt->count() > 0) return;
    auto scalar = [](const json& x) { return x.is_string() ? x.get<std::string>() : x.dump(); };
    if (v.is_array()) {
      for (const auto& e : v) {
        extra.push_back("--" + name);
        extra.push_back(scalar(e));
      }
    } else {
      extra.push_back("--" + name);
      extra.push_back(scalar(v));
    }
  };
  for (const auto& [k, v] : cfg.items()) consider(k, v);
  if (cfg.contains(sub->get_name()) && cfg.at(sub->get_name()).is_object())
    for (const auto& [k, v] : cfg.at(sub->get_name()).items()) consider(k, v);
  return extra;
}

json parse_override_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception&) {
    return text;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clustering priors, overfitted mixtures and Merge-Truncate-Merge post-processing"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Common common;
  SpecArgs spec_args;

  // priors
  auto* priors = app.add_subcommand("priors", "prior distribution of the number of clusters K_n");
  long pr_n = 50, pr_draws = 20000;
  std::string pr_method = "exact", pr_free;
  double pr_target = 0.0;
  add_common(priors, common);
  add_spec(priors, spec_args);
  priors->add_option("-n,--n", pr_n, "sample size");
  priors->add_option("--method", pr_method, "exact or mc")->check(CLI::IsMember({"exact", "mc"}));
  priors->add_option("--draws", pr_draws, "Monte Carlo draws");
  priors->add_option("--solve-ekn", pr_target, "solve the free parameter so that E[K_n] equals this target");
  priors->add_option("--free", pr_free, "parameter to solve for (alpha, beta, sigma)");

  // cnk
  auto* cnk = app.add_subcommand("cnk", "split-ratio diagnostic c_n(k) over a grid of n");
  std::vector<long> cnk_k = {1}, cnk_ns;
  long cnk_nmax = 5000, cnk_points = 40, cnk_exact = kCnkExactMaxN;
  add_common(cnk, common);
  add_spec(cnk, spec_args);
  cnk->add_option("-k,--k", cnk_k, "number of blocks (repeatable)");
  cnk->add_option("--ns", cnk_ns, "explicit sample sizes (default: log grid up to --n-max)");
  cnk->add_option("--n-max", cnk_nmax, "largest n of the log grid");
  cnk->add_option("--grid-points", cnk_points, "points in the log grid");
  cnk->add_option("--exact-max-n", cnk_exact, "use partition enumeration up to this n");

  // eppf
  auto* eppf = app.add_subcommand("eppf", "EPPF of one composition");
  std::vector<long> blocks;
  add_common(eppf, common);
  add_spec(eppf, spec_args);
  eppf->add_option("blocks", blocks, "block sizes")->required();

  // simulate
  auto* sim = app.add_subcommand("simulate", "draw data from the three-component bivariate mixture");
  long sim_n = 200;
  add_common(sim, common);
  sim->add_option("-n,--n", sim_n, "number of observations");

  // sample
  auto* sample = app.add_subcommand("sample", "overfitted Gaussian mixture Gibbs sampler");
  std::string sm_data, sm_mode = "fixed";
  long sm_n = 200, sm_K = 10;
  double sm_abar = 1.0, sm_target = 5.0, sm_ga = 1.0, sm_gb = 0.1;
  RunOptions sm_run;
  bool sm_prior_only = false;
  add_common(sample, common);
  sample->add_option("--data", sm_data, "dataset CSV (default: simulate --n points)");
  sample->add_option("-n,--n", sm_n, "number of simulated observations");
  sample->add_option("-K,--components", sm_K, "number of mixture components");
  sample->add_option("--alpha-mode", sm_mode, "fixed, ekn or gamma")->check(CLI::IsMember({"fixed", "ekn", "gamma"}));
  sample->add_option("--alpha-bar", sm_abar, "alpha / K");
  sample->add_option("--ekn-target", sm_target, "prior E[K_n] for --alpha-mode ekn");
  sample->add_option("--gamma-a", sm_ga, "shape of the alpha_bar hyperprior");
  sample->add_option("--gamma-b", sm_gb, "rate of the alpha_bar hyperprior, divided by K");
  sample->add_option("--chains", sm_run.n_chains, "number of chains");
  sample->add_option("--iters", sm_run.iters, "iterations per chain");
  sample->add_option("--burnin", sm_run.burnin, "burn-in iterations");
  sample->add_option("--thin", sm_run.thin, "thinning");
  sample->add_option("--snapshot-stride", sm_run.snapshot_stride, "keep a mixing measure every this many kept draws");
  sample->add_flag("--prior-only", sm_prior_only, "ignore the likelihood");

  // mtm
  auto* mtm = app.add_subcommand("mtm", "Merge-Truncate-Merge over stored mixing measures");
  std::vector<std::string> mtm_inputs;
  std::vector<double> mtm_c;
  double mtm_r = 2.0, mtm_omega = 0.0, mtm_lo = 0.01, mtm_hi = 2.0;
  long mtm_n = 0, mtm_points = 200, mtm_hint = 0;
  bool mtm_calib = false;
  add_common(mtm, common);
  mtm->add_option("inputs", mtm_inputs, "*.mixing.ndjson files or directories containing them")->required();
  mtm->add_option("-n,--n", mtm_n, "sample size behind the posterior (sets omega_n = (log n / n)^(1/4))");
  mtm->add_option("--omega", mtm_omega, "explicit omega_n");
  mtm->add_option("-r,--r", mtm_r, "Wasserstein order");
  mtm->add_option("--c", mtm_c, "explicit c values (repeatable)");
  mtm->add_option("--c-lo", mtm_lo, "path lower end");
  mtm->add_option("--c-hi", mtm_hi, "path upper end");
  mtm->add_option("--c-points", mtm_points, "path grid size");
  mtm->add_flag("--calibrate", mtm_calib, "search for c_min / c_max and report the plateau");
  mtm->add_option("--k-hint", mtm_hint, "expected atom count for --calibrate (default: K of the samples)");

  // reproduce
  auto* repro = app.add_subcommand("reproduce", "run one experiment (or all) and write its data files");
  std::string repro_id;
  std::vector<std::string> repro_set;
  add_common(repro, common);
  std::string ids = "all";
  for (auto e : all_experiments()) ids += ", " + to_string(e);
  repro->add_option("experiment", repro_id, ids)->required();
  repro->add_option("--set", repro_set, "override key=value (value parsed as JSON when possible)");

  json cfg_json = json::object();
  try {
    app.parse(argc, argv);
    CLI::App* sub = app.get_subcommands().front();
    if (!common.config.empty()) {
      cfg_json = load_config_file(common.config);
      auto extra = config_args(sub, cfg_json);
      if (!extra.empty()) {
        std::vector<std::string> args(argv + 1, argv + argc);
        args.insert(args.end(), extra.begin(), extra.end());
        std::reverse(args.begin(), args.end());
        app.clear();
        app.parse(args);
      }
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "bnpmix: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*priors) {
      ProcessSpec spec = spec_args.spec();
      json result;
      if (pr_target > 0.0) {
        std::string free = pr_free.empty() ? (spec.family == Family::NGG || spec.family == Family::NGGM ? "beta" : "alpha")
                                           : pr_free;
        const double v = solve_param_for_ekn(spec, free, pr_n, pr_target);
        spec = with_param(spec, free, v);
        result["solved"] = {{"param", free}, {"value", v}, {"target", pr_target}};
      }
      const PriorKnPmf pmf = pr_method == "exact" ? prior_kn_exact(spec, pr_n, common.precision_bits)
                                                  : prior_kn_mc(spec, pr_n, pr_draws, common.seed,
                                                                common.precision_bits, common.threads);
      const fs::path dir = out_dir(common, "priors");
      pmf_table(pmf).write(dir / "prior_kn.csv");
      json j = pmf_json(pmf);
      if (result.contains("solved")) j["solved"] = result["solved"];
      write_json(dir / "prior_kn.json", j);
      print({{"spec", spec_to_json(spec)}, {"n", pr_n}, {"mean", pmf.mean()}, {"out", dir.string()}});
    } else if (*cnk) {
      const ProcessSpec spec = spec_args.spec();
      std::vector<CnkCurve> curves;
      for (long k : cnk_k) {
        std::vector<long> ns = cnk_ns;
        if (ns.empty()) ns = log_grid(k + 1, cnk_nmax, cnk_points);
        curves.push_back(cnk_curve(spec, k, ns, cnk_exact, common.precision_bits, common.threads));
      }
      const fs::path dir = out_dir(common, "cnk");
      cnk_table(curves).write(dir / "cnk.csv");
      json s = json::array();
      for (const auto& c : curves) {
        json pts = json::array();
        for (const auto& p : c.points) pts.push_back({p.n, p.value});
        s.push_back({{"k", c.k}, {"points", pts}});
      }
      print({{"spec", spec_to_json(spec)}, {"curves", s}, {"out", dir.string()}});
    } else if (*eppf) {
      const ProcessSpec spec = spec_args.spec();
      const Composition comp(blocks);
      EppfEvaluator ev(spec, comp.n(), common.precision_bits);
      const LogValue p = ev.log_eppf(comp);
      const LogValue u = ev.log_eppf_unordered(comp);
      print({{"spec", spec_to_json(spec)},
             {"blocks", blocks},
             {"log_eppf_ordered", static_cast<double>(p.log())},
             {"log_eppf_unordered", static_cast<double>(u.log())},
             {"eppf_unordered", static_cast<double>(u.value())}});
    } else if (*sim) {
      const Dataset d = generate_data(GenSpec::three_component(common.seed), sim_n);
      const fs::path dir = out_dir(common, "simulate");
      write_dataset(dir / "data.csv", d);
      print({{"n", d.n()}, {"d", d.d}, {"seed", common.seed}, {"out", (dir / "data.csv").string()}});
    } else if (*sample) {
      const Dataset data = sm_data.empty() ? generate_data(GenSpec::three_component(derive_seed(common.seed, {1})), sm_n)
                                           : read_dataset(sm_data);
      ModelConfig m;
      m.K = sm_K;
      m.alpha_bar = sm_abar;
      m.prior_only = sm_prior_only;
      m.gamma_a = sm_ga;
      m.gamma_b = sm_gb;
      if (sm_mode == "ekn") {
        m.alpha_bar = alpha_for_fixed_ekn(data.n(), sm_target, sm_K);
      } else if (sm_mode == "gamma") {
        m.alpha_mode = AlphaMode::GammaPrior;
        m.alpha_bar = sm_ga / (sm_gb * static_cast<double>(sm_K));
      }
      sm_run.seed = derive_seed(common.seed, {2});
      const auto traces = run_chains(data, m, sm_run);
      const fs::path dir = out_dir(common, "sample");
      json chains = json::array();
      for (const auto& t : traces) {
        const std::string base = "chain" + std::to_string(t.chain);
        write_trace(dir / (base + ".trace.ndjson"), t);
        write_mixing_measures(dir / (base + ".mixing.ndjson"), t);
        chains.push_back({{"chain", t.chain}, {"seed", t.seed}, {"error", t.error}});
      }
      const json summary = {{"n", data.n()},
                            {"K", m.K},
                            {"alpha_bar", m.alpha_bar},
                            {"alpha_mode", sm_mode},
                            {"posterior_mean_kn", posterior_mean_kn(traces)},
                            {"posterior_kn_pmf", posterior_kn_pmf(traces)},
                            {"psrf_loglik", traces.size() > 1 ? gelman_rubin(traces, TraceScalar::LogLik) : 1.0},
                            {"psrf_k_occupied", traces.size() > 1 ? gelman_rubin(traces, TraceScalar::KOccupied) : 1.0},
                            {"chains", chains}};
      write_json(dir / "summary.json", summary);
      print(summary);
    } else if (*mtm) {
      std::vector<fs::path> files;
      for (const auto& in : mtm_inputs) {
        if (fs::is_directory(in)) {
          for (const auto& e : fs::recursive_directory_iterator(in))
            if (e.path().string().ends_with(".mixing.ndjson")) files.push_back(e.path());
        } else {
          files.emplace_back(in);
        }
      }
      std::sort(files.begin(), files.end());
      if (files.empty()) throw DomainError("mtm: no *.mixing.ndjson inputs found");
      std::vector<AtomicMeasure> samples;
      for (const auto& f : files) {
        Trace t;
        read_mixing_measures(f, t);
        for (auto& s : export_mixing_measures(t)) samples.push_back(std::move(s));
      }
      if (samples.empty()) throw DomainError("mtm: inputs contain no mixing measures");
      MtmConfig base;
      base.r = mtm_r;
      base.seed = derive_seed(common.seed, {3});
      if (mtm_omega > 0.0) base.omega_n = mtm_omega;
      else if (mtm_n > 1) base.omega_n = rate_overfitted(static_cast<double>(mtm_n));
      else throw DomainError("mtm: give --n or --omega");
      const fs::path dir = out_dir(common, "mtm");
      json result = {{"samples", samples.size()}, {"omega_n", base.omega_n}, {"r", mtm_r}};
      if (mtm_calib) {
        long hint = mtm_hint;
        if (hint <= 0)
          for (const auto& s : samples) hint = std::max<long>(hint, static_cast<long>(s.size()));
        const Calibration cal = mtm_calibrate(samples, base, hint, mtm_points);
        path_table(cal.path).write(dir / "calibration_path.csv");
        result["calibration"] = {{"c_min", cal.c_min},         {"c_max", cal.c_max},
                                 {"plateau_found", cal.plateau_found}, {"k_plateau", cal.k_plateau},
                                 {"plateau_lo", cal.plateau_lo}, {"plateau_hi", cal.plateau_hi},
                                 {"message", cal.message}};
      } else {
        const auto grid = mtm_c.empty() ? linear_grid(mtm_lo, mtm_hi, mtm_points) : mtm_c;
        const auto path = regularization_path(samples, grid, base, common.threads);
        path_table(path).write(dir / "path.csv");
        result["path"] = path_json(path);
      }
      write_json(dir / "mtm.json", result);
      print(result);
    } else if (*repro) {
      json overrides = cfg_json.contains("overrides") ? cfg_json.at("overrides") : json::object();
      if (cfg_json.contains("reproduce") && cfg_json.at("reproduce").contains("overrides"))
        overrides.update(cfg_json.at("reproduce").at("overrides"));
      for (const auto& kv : repro_set) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw DomainError("--set expects key=value, got '" + kv + "'");
        overrides[kv.substr(0, eq)] = parse_override_value(kv.substr(eq + 1));
      }
      std::vector<Experiment> todo;
      if (repro_id == "all") todo = all_experiments();
      else todo.push_back(experiment_from_string(repro_id));
      const fs::path root = common.out.empty() ? default_output_root() : fs::path(common.out);
      json results = json::array();
      for (auto id : todo) {
        ExperimentConfig cfg;
        cfg.id = id;
        cfg.seed = common.seed;
        cfg.scale = scale_from_string(common.scale);
        cfg.precision_bits = common.precision_bits;
        cfg.threads = common.threads;
        cfg.overrides = overrides;
        cfg.out_dir = (todo.size() > 1 || common.out.empty()) ? root / to_string(id) : root;
        const RunResult r = run(cfg);
        results.push_back({{"experiment", to_string(id)},
                           {"manifest", r.manifest_path.string()},
                           {"manifest_fnv1a64", r.manifest_hash},
                           {"wall_seconds", r.wall_seconds}});
      }
      print(results);
    }
  } catch (const std::exception& e) {
    std::cerr << "bnpmix: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
