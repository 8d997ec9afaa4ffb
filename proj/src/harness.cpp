#include "bnpmix/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <set>
#include <thread>
#include <tuple>

#include "bnpmix/errors.hpp"
#include "bnpmix/rng.hpp"
#include "bnpmix/trace_io.hpp"

namespace bnpmix {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::vector<std::pair<Experiment, std::string>>& experiment_names() {
  static const std::vector<std::pair<Experiment, std::string>> names = {
      {Experiment::Fig2Top, "fig2_top"}, {Experiment::Fig2Bottom, "fig2_bottom"}, {Experiment::Table2, "table2"},
      {Experiment::Fig3, "fig3"},        {Experiment::Fig4, "fig4"},              {Experiment::Fig5, "fig5"},
      {Experiment::Fig6, "fig6"},        {Experiment::Fig7, "fig7"}};
  return names;
}

template <class T>
T opt(const json& o, const char* key, T def) {
  if (!o.is_object() || !o.contains(key)) return def;
  return o.at(key).get<T>();
}

unsigned resolve_threads(unsigned t) { return t ? t : std::max(1u, std::thread::hardware_concurrency()); }

// Collects every file written by a run, for the manifest.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}
  const fs::path& dir() const { return dir_; }

  void table(const std::string& name, const CsvTable& t) {
    t.write(dir_ / name);
    add(name);
    add(name + ".schema.json");
  }
  void json_file(const std::string& name, const json& j) {
    write_json(dir_ / name, j);
    add(name);
  }
  void add(const std::string& rel) {
    std::lock_guard<std::mutex> lock(m_);
    files_.insert(rel);
  }
  json listing() const {
    json out = json::array();
    for (const auto& rel : files_) {
      const std::string bytes = read_file(dir_ / rel);
      out.push_back({{"path", rel}, {"bytes", bytes.size()}, {"fnv1a64", hex64(fnv1a64(bytes))}});
    }
    return out;
  }

 private:
  fs::path dir_;
  std::set<std::string> files_;
  std::mutex m_;
};

std::vector<ProcessSpec> reference_priors() {
  return {ProcessSpec::dp(19.2), ProcessSpec::py(0.25, 12.2), ProcessSpec::ngg(0.25, 48.4),
          ProcessSpec::dmp(22.5, 200)};
}

std::vector<ProcessSpec> priors_from(const json& o) {
  if (!o.is_object() || !o.contains("priors")) return reference_priors();
  std::vector<ProcessSpec> out;
  for (const auto& p : o.at("priors")) out.push_back(spec_from_json(p));
  return out;
}

// ---------------------------------------------------------------- fig2

json run_fig2_top(const ExperimentConfig& cfg, Outputs& out) {
  const json& o = cfg.overrides;
  const auto ks = opt<std::vector<long>>(o, "ks", {1, 10, 100});
  const long n_max = opt<long>(o, "n_max", 5000);
  const long points = opt<long>(o, "grid_points", cfg.scale == Scale::Full ? 120 : 40);
  const long exact_max = opt<long>(o, "exact_max_n", kCnkExactMaxN);
  const long plateau_lo = opt<long>(o, "plateau_lo", 2500), plateau_hi = opt<long>(o, "plateau_hi", 5000);
  const auto priors = priors_from(o);

  std::vector<CnkCurve> curves;
  json summary = json::array();
  for (const auto& spec : priors) {
    for (long k : ks) {
      if (k + 1 > n_max) continue;
      auto ns = log_grid(k + 1, n_max, points);
      for (long extra : {plateau_lo, plateau_hi})
        if (extra > k && extra <= n_max) ns.push_back(extra);
      std::sort(ns.begin(), ns.end());
      ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
      curves.push_back(cnk_curve(spec, k, ns, exact_max, cfg.precision_bits, cfg.threads));
      const auto& c = curves.back();
      json entry = {{"spec", spec_to_json(spec)}, {"k", k}};
      double mx = 0.0;
      bool finite = true;
      for (const auto& p : c.points) {
        finite = finite && std::isfinite(p.value);
        mx = std::max(mx, p.value);
      }
      entry["all_finite"] = finite;
      entry["max_c_n_k"] = mx;
      if (plateau_hi <= n_max && plateau_lo > k) {
        entry["plateau_window"] = {plateau_lo, plateau_hi};
        entry["relative_change"] = c.relative_change(plateau_lo, plateau_hi);
      }
      summary.push_back(entry);
    }
  }
  out.table("fig2_top_cnk.csv", cnk_table(curves));
  out.json_file("fig2_top_summary.json", {{"curves", summary}});
  return {{"ks", ks}, {"n_max", n_max}, {"grid_points", points}, {"exact_max_n", exact_max}};
}

json run_fig2_bottom(const ExperimentConfig& cfg, Outputs& out) {
  const json& o = cfg.overrides;
  const long n = opt<long>(o, "n", 50);
  const double target = opt<double>(o, "target", 25.0);
  struct Job {
    ProcessSpec base;
    std::string free;
  };
  const std::vector<Job> jobs = {{ProcessSpec::dp(1.0), "alpha"},
                                 {ProcessSpec::py(0.25, 1.0), "alpha"},
                                 {ProcessSpec::ngg(0.25, 1.0), "beta"},
                                 {ProcessSpec::dmp(1.0, 200), "alpha"}};
  CsvTable table("prior distribution of the number of clusters for priors calibrated to a target E[K_n]",
                 {{"family", "string", "prior family"},
                  {"params", "string", "prior parameters after calibration"},
                  {"n", "integer", "number of observations"},
                  {"k", "integer", "number of clusters"},
                  {"probability", "number", "P(K_n = k)"}});
  json records = json::array();
  for (const auto& job : jobs) {
    const double v = solve_param_for_ekn(job.base, job.free, n, target);
    const ProcessSpec spec = with_param(job.base, job.free, v);
    const auto pmf = prior_kn_exact(spec, n, cfg.precision_bits);
    for (long k = 1; k <= pmf.k_max(); ++k)
      table.add_row({to_string(spec.family), spec_params(spec), n, k, pmf.probability(k)});
    json r = pmf_json(pmf);
    r["free_param"] = job.free;
    r["solved_value"] = v;
    records.push_back(r);
  }
  out.table("fig2_bottom_prior_kn.csv", table);
  out.json_file("fig2_bottom.json", {{"n", n}, {"target", target}, {"priors", records}});
  return {{"n", n}, {"target", target}};
}

// ---------------------------------------------------------------- posterior grids

struct GridChoice {
  PosteriorGrid grid;
  bool write_traces = false;
};

GridChoice fixed_grid(const ExperimentConfig& cfg, bool write_traces_default) {
  const json& o = cfg.overrides;
  GridChoice g;
  g.grid.alpha_bars = opt<std::vector<double>>(o, "alpha_bars", {0.01, 1.0, 2.5, 3.0});
  std::vector<long> ns = {20, 200, 2000};
  if (cfg.scale == Scale::Full) ns.push_back(20000);
  g.grid.ns = opt<std::vector<long>>(o, "ns", ns);
  g.grid.model.K = opt<long>(o, "K", 10);
  g.grid.model.alpha_mode = AlphaMode::Fixed;
  g.grid.run.n_chains = opt<long>(o, "chains", 2);
  g.grid.run.iters = opt<long>(o, "iters", 15000);
  g.grid.run.burnin = opt<long>(o, "burnin", 6000);
  g.grid.run.thin = opt<long>(o, "thin", 1);
  g.grid.run.snapshot_stride = opt<long>(o, "snapshot_stride", 10);
  g.grid.data_seed = opt<std::uint64_t>(o, "data_seed", derive_seed(cfg.seed, {1}));
  g.grid.seed = derive_seed(cfg.seed, {2});
  g.write_traces = opt<bool>(o, "write_traces", write_traces_default);
  return g;
}

json grid_inputs(const PosteriorGrid& g) {
  return {{"alpha_bars", g.alpha_bars},
          {"ns", g.ns},
          {"K", g.model.K},
          {"chains", g.run.n_chains},
          {"iters", g.run.iters},
          {"burnin", g.run.burnin},
          {"thin", g.run.thin},
          {"snapshot_stride", g.run.snapshot_stride},
          {"data_seed", g.data_seed},
          {"chain_seed_root", g.seed}};
}

void write_traces(const std::vector<PosteriorCell>& cells, Outputs& out) {
  for (const auto& cell : cells) {
    for (const auto& t : cell.traces) {
      const std::string base = "traces/" + cell.label + "/chain" + std::to_string(t.chain);
      write_trace(out.dir() / (base + ".trace.ndjson"), t);
      out.add(base + ".trace.ndjson");
      write_mixing_measures(out.dir() / (base + ".mixing.ndjson"), t);
      out.add(base + ".mixing.ndjson");
    }
  }
}

json chain_errors(const PosteriorCell& c) {
  json e = json::array();
  for (const auto& t : c.traces)
    if (!t.error.empty()) e.push_back({{"chain", t.chain}, {"error", t.error}});
  return e;
}

double safe_psrf(const PosteriorCell& c, TraceScalar s) {
  try {
    return gelman_rubin(c.traces, s);
  } catch (const DomainError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

json run_posterior_experiment(const ExperimentConfig& cfg, Outputs& out) {
  const bool mtm_fig = cfg.id == Experiment::Fig5 || cfg.id == Experiment::Fig6;
  GridChoice gc = fixed_grid(cfg, mtm_fig);
  const auto cells = run_posterior_grid(gc.grid, cfg.threads);
  if (gc.write_traces) write_traces(cells, out);
  json inputs = grid_inputs(gc.grid);
  const long K = gc.grid.model.K;

  switch (cfg.id) {
    case Experiment::Table2: {
      CsvTable t("prior and posterior expected number of occupied components",
                 {{"alpha_bar", "number", "Dirichlet parameter alpha / K"},
                  {"n", "integer", "number of observations"},
                  {"prior_mean", "number", "prior E[K_n]"},
                  {"posterior_mean", "number", "posterior mean of the number of occupied components"},
                  {"psrf_loglik", "number", "Gelman-Rubin factor of the log-likelihood"},
                  {"psrf_k_occupied", "number", "Gelman-Rubin factor of the occupied-component count"}});
      json errs = json::object();
      for (const auto& c : cells) {
        t.add_row({c.alpha_bar, c.n, c.prior_mean, posterior_mean_kn(c.traces), safe_psrf(c, TraceScalar::LogLik),
                   safe_psrf(c, TraceScalar::KOccupied)});
        if (!chain_errors(c).empty()) errs[c.label] = chain_errors(c);
      }
      out.table("table2.csv", t);
      if (!errs.empty()) out.json_file("table2_errors.json", errs);
      break;
    }
    case Experiment::Fig3: {
      CsvTable t("prior and posterior distributions of the number of occupied components",
                 {{"alpha_bar", "number", "Dirichlet parameter alpha / K"},
                  {"n", "integer", "number of observations"},
                  {"k", "integer", "number of occupied components"},
                  {"prior_probability", "number", "prior P(K_n = k)"},
                  {"posterior_probability", "number", "posterior probability of k occupied components"}});
      for (const auto& c : cells) {
        const auto post = posterior_kn_pmf(c.traces);
        for (long k = 0; k <= K; ++k)
          t.add_row({c.alpha_bar, c.n, k, c.prior_pmf[static_cast<std::size_t>(k)],
                     static_cast<std::size_t>(k) < post.size() ? post[static_cast<std::size_t>(k)] : 0.0});
      }
      out.table("fig3_kn.csv", t);
      break;
    }
    case Experiment::Fig4: {
      CsvTable t("posterior summaries of rank-sorted mixture weights",
                 {{"alpha_bar", "number", "Dirichlet parameter alpha / K"},
                  {"n", "integer", "number of observations"},
                  {"rank", "integer", "1 = largest weight"},
                  {"min", "number", "minimum"},
                  {"q1", "number", "first quartile"},
                  {"median", "number", "median"},
                  {"q3", "number", "third quartile"},
                  {"max", "number", "maximum"},
                  {"mean", "number", "mean"}});
      for (const auto& c : cells)
        for (const auto& r : posterior_sorted_weights(c.traces))
          t.add_row({c.alpha_bar, c.n, r.rank, r.min, r.q1, r.median, r.q3, r.max, r.mean});
      out.table("fig4_weights.csv", t);
      break;
    }
    case Experiment::Fig5:
    case Experiment::Fig6: {
      const json& o = cfg.overrides;
      const double r = opt<double>(o, "r", 2.0);
      std::vector<double> grid;
      if (cfg.id == Experiment::Fig5) {
        grid = opt<std::vector<double>>(o, "c_grid", {0.1, 0.5, 1.0, 2.0});
      } else {
        grid = linear_grid(opt<double>(o, "c_lo", 0.01), opt<double>(o, "c_hi", 2.0), opt<long>(o, "c_points", 200));
      }
      inputs["c_grid"] = grid;
      inputs["r"] = r;
      inputs["omega"] = "(log n / n)^(1/4)";
      CsvTable t5("posterior distribution of the post-processed cluster count per c",
                  {{"alpha_bar", "number", "Dirichlet parameter alpha / K"},
                   {"n", "integer", "number of observations"},
                   {"c", "number", "truncation constant"},
                   {"k_tilde", "integer", "post-processed number of clusters"},
                   {"probability", "number", "posterior probability"}});
      CsvTable t6("regularization path of the post-processed cluster count",
                  {{"alpha_bar", "number", "Dirichlet parameter alpha / K"},
                   {"n", "integer", "number of observations"},
                   {"c", "number", "truncation constant"},
                   {"mean", "number", "posterior mean of the cluster count"},
                   {"map", "integer", "posterior mode of the cluster count"}});
      json paths = json::array();
      for (const auto& c : cells) {
        MtmConfig m;
        m.omega_n = rate_overfitted(static_cast<double>(c.n));
        m.r = r;
        m.seed = derive_seed(cfg.seed, {3, fnv1a64(c.label)});
        const auto samples = export_mixing_measures(c.traces);
        if (samples.empty()) continue;
        const auto path = regularization_path(samples, grid, m, cfg.threads);
        for (const auto& p : path.points) {
          if (cfg.id == Experiment::Fig5) {
            for (std::size_t k = 0; k < p.pmf.size(); ++k)
              t5.add_row({c.alpha_bar, c.n, p.c, static_cast<long>(k), p.pmf[k]});
          } else {
            t6.add_row({c.alpha_bar, c.n, p.c, p.mean, p.map});
          }
        }
        json pj = path_json(path);
        pj["alpha_bar"] = c.alpha_bar;
        pj["n"] = c.n;
        pj["omega_n"] = m.omega_n;
        pj["samples"] = samples.size();
        paths.push_back(pj);
      }
      if (cfg.id == Experiment::Fig5) {
        out.table("fig5_mtm.csv", t5);
        out.json_file("fig5_summary.json", {{"cells", paths}});
      } else {
        out.table("fig6_path.csv", t6);
        out.json_file("fig6_summary.json", {{"cells", paths}});
      }
      break;
    }
    default:
      throw DomainError("not a posterior experiment");
  }
  return inputs;
}

json run_fig7(const ExperimentConfig& cfg, Outputs& out) {
  const json& o = cfg.overrides;
  GridChoice base = fixed_grid(cfg, false);
  base.grid.alpha_bars.clear();
  const double target = opt<double>(o, "ekn_target", 5.0);
  const double ga = opt<double>(o, "gamma_a", 1.0), gb = opt<double>(o, "gamma_b", 0.1);

  PosteriorGrid ekn = base.grid, gam = base.grid;
  ekn.model.alpha_mode = AlphaMode::SolveEkn;
  ekn.model.ekn_target = target;
  gam.model.alpha_mode = AlphaMode::GammaPrior;
  gam.model.gamma_a = ga;
  gam.model.gamma_b = gb;
  gam.model.alpha_bar = ga / (gb * static_cast<double>(gam.model.K));
  ekn.seed = derive_seed(cfg.seed, {4});
  gam.seed = derive_seed(cfg.seed, {5});

  CsvTable kn("prior and posterior number of occupied components with a varying Dirichlet parameter",
              {{"mode", "string", "ekn: alpha_bar solved per n; gamma: alpha_bar ~ Gamma(a, rate b K)"},
               {"n", "integer", "number of observations"},
               {"alpha_bar", "number", "solved alpha_bar (ekn) or posterior mean of alpha_bar (gamma)"},
               {"k", "integer", "number of occupied components"},
               {"prior_probability", "number", "prior probability"},
               {"posterior_probability", "number", "posterior probability"}});
  CsvTable wt("posterior summaries of rank-sorted weights with a varying Dirichlet parameter",
              {{"mode", "string", "ekn or gamma"},
               {"n", "integer", "number of observations"},
               {"rank", "integer", "1 = largest weight"},
               {"min", "number", "minimum"},
               {"q1", "number", "first quartile"},
               {"median", "number", "median"},
               {"q3", "number", "third quartile"},
               {"max", "number", "maximum"},
               {"mean", "number", "mean"}});
  json summary = json::array();
  for (const auto& [mode, grid] : {std::pair<std::string, PosteriorGrid>{"ekn", ekn}, {"gamma", gam}}) {
    const auto cells = run_posterior_grid(grid, cfg.threads);
    for (const auto& c : cells) {
      const auto post = posterior_kn_pmf(c.traces);
      double abar = c.alpha_bar;
      if (mode == "gamma") {
        double s = 0.0;
        long cnt = 0;
        for (const auto& t : c.traces)
          for (const auto& r : t.records) {
            s += r.alpha_bar;
            ++cnt;
          }
        abar = cnt ? s / static_cast<double>(cnt) : abar;
      }
      for (long k = 0; k <= grid.model.K; ++k)
        kn.add_row({mode, c.n, abar, k, c.prior_pmf[static_cast<std::size_t>(k)],
                    static_cast<std::size_t>(k) < post.size() ? post[static_cast<std::size_t>(k)] : 0.0});
      for (const auto& r : posterior_sorted_weights(c.traces))
        wt.add_row({mode, c.n, r.rank, r.min, r.q1, r.median, r.q3, r.max, r.mean});
      double acc = 0.0;
      for (const auto& t : c.traces) acc += t.alpha_acceptance / static_cast<double>(c.traces.size());
      summary.push_back({{"mode", mode}, {"n", c.n}, {"alpha_bar", abar}, {"prior_mean", c.prior_mean},
                         {"posterior_mean", posterior_mean_kn(c.traces)}, {"alpha_acceptance", acc}});
    }
  }
  out.table("fig7_kn.csv", kn);
  out.table("fig7_weights.csv", wt);
  out.json_file("fig7_summary.json", {{"cells", summary}});
  json inputs = grid_inputs(base.grid);
  inputs.erase("alpha_bars");
  inputs["ekn_target"] = target;
  inputs["gamma_a"] = ga;
  inputs["gamma_b"] = gb;
  return inputs;
}

}  // namespace

std::string to_string(Experiment e) {
  for (const auto& [v, s] : experiment_names())
    if (v == e) return s;
  return "unknown";
}

Experiment experiment_from_string(const std::string& s) {
  for (const auto& [v, name] : experiment_names())
    if (name == s) return v;
  std::string list;
  for (const auto& [v, name] : experiment_names()) list += (list.empty() ? "" : ", ") + name;
  throw DomainError("unknown experiment '" + s + "' (expected one of " + list + ")");
}

std::string to_string(Scale s) { return s == Scale::Desk ? "desk" : "full"; }

Scale scale_from_string(const std::string& s) {
  if (s == "desk") return Scale::Desk;
  if (s == "full") return Scale::Full;
  throw DomainError("unknown scale '" + s + "' (expected desk or full)");
}

std::vector<Experiment> all_experiments() {
  std::vector<Experiment> v;
  for (const auto& [e, s] : experiment_names()) v.push_back(e);
  return v;
}

fs::path default_output_root() {
  if (const char* env = std::getenv("BNPMIX_OUTPUT_ROOT"); env && *env) return env;
  return "bnpmix-out";
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  if (j.contains("experiment")) c.id = experiment_from_string(j.at("experiment").get<std::string>());
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("scale")) c.scale = scale_from_string(j.at("scale").get<std::string>());
  if (j.contains("out")) c.out_dir = j.at("out").get<std::string>();
  if (j.contains("precision_bits")) c.precision_bits = j.at("precision_bits").get<long>();
  if (j.contains("threads")) c.threads = j.at("threads").get<unsigned>();
  if (j.contains("overrides")) c.overrides = j.at("overrides");
  return c;
}

json ExperimentConfig::to_json() const {
  return {{"experiment", to_string(id)}, {"seed", seed},        {"scale", to_string(scale)},
          {"precision_bits", precision_bits}, {"overrides", overrides}};
}

json spec_to_json(const ProcessSpec& s) {
  json j = {{"family", to_string(s.family)}};
  switch (s.family) {
    case Family::DP: j["alpha"] = s.alpha; break;
    case Family::PY: j["sigma"] = s.sigma; j["alpha"] = s.alpha; break;
    case Family::NGG: j["sigma"] = s.sigma; j["beta"] = s.beta; break;
    case Family::DMP: j["alpha"] = s.alpha; j["K"] = s.K; break;
    case Family::PYM: j["sigma"] = s.sigma; j["alpha"] = s.alpha; j["K"] = s.K; break;
    case Family::NGGM: j["sigma"] = s.sigma; j["beta"] = s.beta; j["K"] = s.K; break;
  }
  return j;
}

ProcessSpec spec_from_json(const json& j) {
  auto num = [&](const char* key) {
    if (!j.contains(key)) throw DomainError(std::string("prior spec: missing '") + key + "'");
    return j.at(key).get<double>();
  };
  auto count = [&] {
    if (!j.contains("K")) throw DomainError("prior spec: missing 'K'");
    return j.at("K").get<long>();
  };
  switch (family_from_string(j.at("family").get<std::string>())) {
    case Family::DP: return ProcessSpec::dp(num("alpha"));
    case Family::PY: return ProcessSpec::py(num("sigma"), num("alpha"));
    case Family::NGG: return ProcessSpec::ngg(num("sigma"), num("beta"));
    case Family::DMP: return ProcessSpec::dmp(num("alpha"), count());
    case Family::PYM: return ProcessSpec::pym(num("sigma"), num("alpha"), count());
    case Family::NGGM: return ProcessSpec::nggm(num("sigma"), num("beta"), count());
  }
  throw DomainError("prior spec: unknown family");
}

std::string spec_params(const ProcessSpec& s) {
  std::string out;
  const json j = spec_to_json(s);
  for (const auto& [k, v] : j.items()) {
    if (k == "family") continue;
    if (!out.empty()) out += ';';
    out += k + "=" + (v.is_number_integer() ? std::to_string(v.get<long>()) : format_double(v.get<double>()));
  }
  return out;
}

json pmf_json(const PriorKnPmf& p) {
  json j = {{"spec", spec_to_json(p.spec)},
            {"n", p.n},
            {"method", p.method == PmfMethod::Exact ? "exact" : "monte_carlo"},
            {"pmf", p.pmf},
            {"mean", p.mean()}};
  if (p.method == PmfMethod::MonteCarlo) {
    j["draws"] = p.draws;
    j["seed"] = p.seed;
  }
  return j;
}

CsvTable pmf_table(const PriorKnPmf& p) {
  CsvTable t("prior distribution of the number of clusters for " + p.spec.describe() + ", n = " + std::to_string(p.n),
             {{"k", "integer", "number of clusters"}, {"probability", "number", "P(K_n = k)"}});
  for (long k = 1; k <= p.k_max(); ++k) t.add_row({k, p.probability(k)});
  return t;
}

CsvTable cnk_table(const std::vector<CnkCurve>& curves) {
  CsvTable t("singleton-split EPPF ratio diagnostic c_n(k)",
             {{"family", "string", "prior family"},
              {"params", "string", "prior parameters"},
              {"k", "integer", "number of blocks"},
              {"n", "integer", "number of observations"},
              {"c_n_k", "number", "c_n(k)"},
              {"method", "string", "exact_bruteforce or heuristic_argmax"}});
  for (const auto& c : curves)
    for (const auto& p : c.points)
      t.add_row({to_string(c.spec.family), spec_params(c.spec), c.k, p.n, p.value,
                 std::string(p.method == CnkMethod::ExactBruteforce ? "exact_bruteforce" : "heuristic_argmax")});
  return t;
}

CsvTable path_table(const RegularizationPath& path) {
  CsvTable t("distribution of the post-processed cluster count per c",
             {{"c", "number", "truncation constant"},
              {"k_tilde", "integer", "post-processed number of clusters"},
              {"probability", "number", "fraction of samples"}});
  for (const auto& p : path.points)
    for (std::size_t k = 0; k < p.pmf.size(); ++k) t.add_row({p.c, static_cast<long>(k), p.pmf[k]});
  return t;
}

json path_json(const RegularizationPath& path) {
  json pts = json::array();
  for (const auto& p : path.points) pts.push_back({{"c", p.c}, {"mean", p.mean}, {"map", p.map}});
  auto pl = [](const Plateau& p) {
    return json{{"found", p.found}, {"value", p.value}, {"c_lo", p.c_lo}, {"c_hi", p.c_hi},
                {"points", p.found ? p.last - p.first + 1 : 0}};
  };
  json runs = json::array();
  for (const auto& r : path.runs) runs.push_back(pl(r));
  return {{"path", pts}, {"plateau", pl(path.plateau)}, {"runs", runs}};
}

std::vector<double> dmp_prior_pmf(const ModelConfig& model, double alpha_bar, long n, std::uint64_t seed,
                                  long draws) {
  std::vector<double> out(static_cast<std::size_t>(model.K + 1), 0.0);
  auto accumulate = [&](double abar, double weight) {
    const auto p = prior_kn_dmp(ProcessSpec::dmp(abar * static_cast<double>(model.K), model.K), n);
    for (long k = 1; k <= p.k_max(); ++k) out[static_cast<std::size_t>(k)] += weight * p.probability(k);
  };
  if (model.alpha_mode != AlphaMode::GammaPrior) {
    accumulate(alpha_bar, 1.0);
    return out;
  }
  Rng rng(seed);
  const double rate = model.gamma_b * static_cast<double>(model.K);
  for (long d = 0; d < draws; ++d)
    accumulate(std::exp(log_gamma_variate(rng, model.gamma_a)) / rate, 1.0 / static_cast<double>(draws));
  return out;
}

std::vector<PosteriorCell> run_posterior_grid(const PosteriorGrid& grid, unsigned threads) {
  if (grid.ns.empty()) throw DomainError("posterior grid: no sample sizes");
  const long n_max = *std::max_element(grid.ns.begin(), grid.ns.end());
  const Dataset full = generate_data(GenSpec::three_component(grid.data_seed), n_max);

  std::vector<PosteriorCell> cells;
  const bool fixed = grid.model.alpha_mode == AlphaMode::Fixed;
  const std::string tag = fixed ? "fixed" : grid.model.alpha_mode == AlphaMode::SolveEkn ? "ekn" : "gamma";
  for (long n : grid.ns) {
    if (fixed) {
      for (double a : grid.alpha_bars) {
        PosteriorCell c;
        c.mode = AlphaMode::Fixed;
        c.alpha_bar = a;
        c.n = n;
        cells.push_back(std::move(c));
      }
    } else {
      PosteriorCell c;
      c.mode = grid.model.alpha_mode;
      c.n = n;
      c.alpha_bar = c.mode == AlphaMode::SolveEkn ? alpha_for_fixed_ekn(n, grid.model.ekn_target, grid.model.K)
                                                  : grid.model.alpha_bar;
      cells.push_back(std::move(c));
    }
  }
  // Order cells by alpha then n so outputs read naturally.
  std::stable_sort(cells.begin(), cells.end(), [](const PosteriorCell& a, const PosteriorCell& b) {
    return std::tie(a.alpha_bar, a.n) < std::tie(b.alpha_bar, b.n);
  });
  for (auto& c : cells) {
    c.label = tag + "_a" + format_double(c.alpha_bar) + "_n" + std::to_string(c.n);
    if (!fixed) c.label = tag + "_n" + std::to_string(c.n);
  }

  const unsigned total = resolve_threads(threads);
  const unsigned per_cell = grid.run.parallel ? static_cast<unsigned>(std::max<long>(1, grid.run.n_chains)) : 1u;
  const unsigned workers = std::max(1u, std::min<unsigned>(total / per_cell, static_cast<unsigned>(cells.size())));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned w) {
    try {
      for (std::size_t i; (i = next.fetch_add(1)) < cells.size();) {
        auto& c = cells[i];
        ModelConfig m = grid.model;
        m.alpha_mode = c.mode == AlphaMode::SolveEkn ? AlphaMode::Fixed : c.mode;
        m.alpha_bar = c.alpha_bar;
        RunOptions r = grid.run;
        r.seed = derive_seed(grid.seed, {fnv1a64(c.label)});
        c.traces = run_chains(full.prefix(c.n), m, r);
        c.prior_pmf = dmp_prior_pmf(grid.model, c.alpha_bar, c.n, derive_seed(grid.seed, {7, fnv1a64(c.label)}),
                                    c.n > 2000 ? 400 : 2000);
        c.prior_mean = 0.0;
        for (std::size_t k = 0; k < c.prior_pmf.size(); ++k) c.prior_mean += static_cast<double>(k) * c.prior_pmf[k];
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work, w);
  work(0);
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return cells;
}

RunResult run(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.out_dir.empty()) throw DomainError("run: output directory not set");
  if (cfg.precision_bits < 16) throw DomainError("run: precision_bits must be >= 16");
  fs::create_directories(cfg.out_dir);
  Outputs out(cfg.out_dir);
  json inputs;
  try {
    switch (cfg.id) {
      case Experiment::Fig2Top: inputs = run_fig2_top(cfg, out); break;
      case Experiment::Fig2Bottom: inputs = run_fig2_bottom(cfg, out); break;
      case Experiment::Fig7: inputs = run_fig7(cfg, out); break;
      default: inputs = run_posterior_experiment(cfg, out); break;
    }
  } catch (const std::exception& e) {
    throw std::runtime_error("experiment " + to_string(cfg.id) + " failed: " + e.what());
  }

  RunResult res;
  res.manifest = {{"library", "bnpmix"},
                  {"library_version", BNPMIX_VERSION},
                  {"experiment", to_string(cfg.id)},
                  {"config", cfg.to_json()},
                  {"seeds", {{"global", cfg.seed}}},
                  {"inputs", inputs},
                  {"files", out.listing()}};
  res.manifest_path = cfg.out_dir / "manifest.json";
  const std::string text = res.manifest.dump(2) + "\n";
  atomic_write(res.manifest_path, text);
  res.manifest_hash = hex64(fnv1a64(text));
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_json(cfg.out_dir / "run_info.json",
             {{"experiment", to_string(cfg.id)}, {"wall_seconds", res.wall_seconds}, {"manifest_fnv1a64", res.manifest_hash}});
  return res;
}

}  // namespace bnpmix
