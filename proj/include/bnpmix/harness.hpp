#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "bnpmix/csv.hpp"
#include "bnpmix/diagnostics.hpp"
#include "bnpmix/mtm.hpp"
#include "bnpmix/prior_clusters.hpp"
#include "bnpmix/sampler.hpp"

namespace bnpmix {

enum class Experiment { Fig2Top, Fig2Bottom, Table2, Fig3, Fig4, Fig5, Fig6, Fig7 };
enum class Scale { Desk, Full };

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& s);
std::string to_string(Scale s);
Scale scale_from_string(const std::string& s);
std::vector<Experiment> all_experiments();

/// Output root: $BNPMIX_OUTPUT_ROOT if set, else ./bnpmix-out.
std::filesystem::path default_output_root();

struct ExperimentConfig {
  Experiment id = Experiment::Table2;
  nlohmann::json overrides = nlohmann::json::object();
  std::filesystem::path out_dir;
  std::uint64_t seed = 2024;
  Scale scale = Scale::Desk;
  long precision_bits = 512;
  unsigned threads = 0;  // 0 = hardware concurrency; never affects results

  /// Keys: experiment, seed, scale, out, precision_bits, threads, overrides.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct RunResult {
  nlohmann::json manifest;
  std::filesystem::path manifest_path;
  std::string manifest_hash;  // fnv1a64 of manifest.json
  double wall_seconds = 0.0;  // also written to run_info.json, outside the manifest
};

/// Runs one experiment into cfg.out_dir and writes manifest.json listing the
/// resolved inputs, seeds, and every output file with its size and hash.
/// Identical configs produce byte-identical files.
RunResult run(const ExperimentConfig& cfg);

// Emitters shared by the harness, the CLI and the Python bindings.
nlohmann::json spec_to_json(const ProcessSpec& spec);
ProcessSpec spec_from_json(const nlohmann::json& j);
/// "alpha=19.2;K=200" style parameter list.
std::string spec_params(const ProcessSpec& spec);
/// {spec, n, method, draws, seed, pmf, mean}
nlohmann::json pmf_json(const PriorKnPmf& pmf);
/// Columns k, probability.
CsvTable pmf_table(const PriorKnPmf& pmf);
/// Columns family, params, k, n, c_n_k, method.
CsvTable cnk_table(const std::vector<CnkCurve>& curves);
/// Columns c, k_tilde, probability.
CsvTable path_table(const RegularizationPath& path);
/// [{c, mean, map}] plus the plateau.
nlohmann::json path_json(const RegularizationPath& path);

/// One (alpha_bar, n) cell of the simulation study.
struct PosteriorCell {
  std::string label;
  AlphaMode mode = AlphaMode::Fixed;
  double alpha_bar = 0.0;  // fixed or solved value; GammaPrior: starting value
  long n = 0;
  std::vector<Trace> traces;
  std::vector<double> prior_pmf;  // index k = 0..K
  double prior_mean = 0.0;
};

struct PosteriorGrid {
  std::vector<double> alpha_bars;  // ignored for SolveEkn / GammaPrior
  std::vector<long> ns;
  ModelConfig model;
  RunOptions run;
  std::uint64_t data_seed = 1;
  std::uint64_t seed = 1;
};

/// Simulated datasets are prefixes of one draw of size max(ns). Cells run
/// concurrently; every cell's chains use seeds derived from (seed, label).
std::vector<PosteriorCell> run_posterior_grid(const PosteriorGrid& grid, unsigned threads = 0);

/// Prior pmf of K_n (index 0..K) for the Dirichlet multinomial mixture under
/// the cell's alpha mode; the Gamma hyperprior case averages the exact pmf
/// over `draws` seeded draws of alpha_bar.
std::vector<double> dmp_prior_pmf(const ModelConfig& model, double alpha_bar, long n, std::uint64_t seed,
                                  long draws = 2000);

}  // namespace bnpmix
