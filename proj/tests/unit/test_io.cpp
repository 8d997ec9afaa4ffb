#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "bnpmix/cache.hpp"
#include "bnpmix/config.hpp"
#include "bnpmix/csv.hpp"
#include "bnpmix/errors.hpp"
#include "bnpmix/harness.hpp"
#include "bnpmix/rng.hpp"
#include "bnpmix/trace_io.hpp"

using namespace bnpmix;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bnpmix-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("number formatting round-trips") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 12345678.9, -2.5}) CHECK(std::stod(format_double(x)) == x);
  CHECK(format_double(3.0) == "3");
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a64("a")) == "af63dc4c8601ec8c");
}

TEST_CASE("CSV tables carry a header and a schema sidecar") {
  const auto dir = scratch("csv");
  CsvTable t("demo", {{"k", "integer", "count"}, {"p", "number", "probability"}, {"s", "string", "label"}});
  t.add_row({1L, 0.25, std::string("a,b")});
  t.add_row({2L, 0.75, std::string("plain")});
  CHECK_THROWS_AS(t.add_row({1L}), DomainError);
  t.write(dir / "t.csv");
  CHECK(read_file(dir / "t.csv") == "k,p,s\n1,0.25,\"a,b\"\n2,0.75,plain\n");
  const auto schema = json::parse(read_file(dir / "t.csv.schema.json"));
  CHECK(schema["file"] == "t.csv");
  CHECK(schema["columns"].size() == 3);
  CHECK(schema["columns"][1]["type"] == "number");
  for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().filename().string().find(".tmp") == std::string::npos);
}

TEST_CASE("TOML subset") {
  const auto j = parse_toml(R"(
# comment
seed = 7
scale = "desk"   # trailing comment
[overrides]
ns = [20, 200]
iters = 1_000
alpha_bars = [
  0.01,
  1.0,
]
flag = true
[priors.dp]
alpha = 19.2
)");
  CHECK(j["seed"] == 7);
  CHECK(j["scale"] == "desk");
  CHECK(j["overrides"]["ns"] == json::array({20, 200}));
  CHECK(j["overrides"]["iters"] == 1000);
  CHECK(j["overrides"]["alpha_bars"][1] == 1.0);
  CHECK(j["overrides"]["flag"] == true);
  CHECK(j["priors"]["dp"]["alpha"] == 19.2);
  CHECK_THROWS(parse_toml("x = [1, 2"));
  CHECK_THROWS(parse_toml("= 3"));
}

TEST_CASE("config files by extension or content") {
  const auto dir = scratch("cfg");
  std::ofstream(dir / "a.json") << R"({"seed": 3})";
  std::ofstream(dir / "b.toml") << "seed = 4\n";
  std::ofstream(dir / "c.cfg") << "seed = 5\n";
  CHECK(load_config_file(dir / "a.json")["seed"] == 3);
  CHECK(load_config_file(dir / "b.toml")["seed"] == 4);
  CHECK(load_config_file(dir / "c.cfg")["seed"] == 5);
  CHECK_THROWS(load_config_file(dir / "missing.toml"));
}

TEST_CASE("trace and dataset round-trips") {
  const auto dir = scratch("trace");
  const auto d = generate_data(GenSpec::three_component(8), 60);
  write_dataset(dir / "d.csv", d);
  const auto back = read_dataset(dir / "d.csv");
  CHECK(back.x == d.x);
  CHECK(back.label == d.label);

  ModelConfig m;
  RunOptions r;
  r.n_chains = 1;
  r.iters = 120;
  r.burnin = 20;
  r.snapshot_stride = 10;
  const auto t = run_chains(d, m, r).front();
  write_trace(dir / "t.ndjson", t);
  write_mixing_measures(dir / "t.mix.ndjson", t);
  auto u = read_trace(dir / "t.ndjson");
  REQUIRE(u.records.size() == t.records.size());
  CHECK(u.records[7].loglik == t.records[7].loglik);
  CHECK(u.records[7].w_sorted == t.records[7].w_sorted);
  read_mixing_measures(dir / "t.mix.ndjson", u);
  REQUIRE(u.snapshots.size() == t.snapshots.size());
  CHECK(u.snapshots[3].weights == t.snapshots[3].weights);
  CHECK(u.snapshots[3].locations == t.snapshots[3].locations);
}

TEST_CASE("table cache round-trips and rejects mismatches") {
  const auto dir = scratch("cache");
  TableCache cache(dir);
  const auto a = cache.gfc(0.25, 40);
  const auto b = cache.gfc(0.25, 40);
  CHECK(a.entries() == b.entries());
  CHECK(fs::exists(cache.path_for(gfc_cache_key(0.25, 40))));
  CHECK_FALSE(load_gfc(cache.path_for(gfc_cache_key(0.25, 40)), 0.3, 40).has_value());

  const auto spec = ProcessSpec::ngg(0.25, 2.0);
  const auto v1 = cache.vnk(spec, 30, 256);
  const auto v2 = cache.vnk(spec, 30, 256);
  CHECK(v1.log_values == v2.log_values);
  CHECK(v1.log_vnk(1, 1) == doctest::Approx(0.0L));

  // Truncated file is treated as a miss.
  const auto p = cache.path_for(vnk_cache_key(spec, 30, 256));
  const auto bytes = read_file(p);
  atomic_write(p, bytes.substr(0, bytes.size() / 2));
  CHECK_FALSE(load_vnk(p, spec, 30, 256).has_value());
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {}) != derive_seed(2, {}));
}

TEST_CASE("experiment ids and configs") {
  CHECK(experiment_from_string("fig6") == Experiment::Fig6);
  CHECK_THROWS_AS(experiment_from_string("fig9"), DomainError);
  CHECK(all_experiments().size() == 8);
  const auto cfg = ExperimentConfig::from_json({{"experiment", "table2"}, {"seed", 5}, {"scale", "full"},
                                                {"overrides", {{"iters", 10}}}});
  CHECK(cfg.id == Experiment::Table2);
  CHECK(cfg.scale == Scale::Full);
  CHECK(cfg.overrides["iters"] == 10);
  CHECK(ExperimentConfig::from_json(cfg.to_json()).to_json() == cfg.to_json());
  CHECK(spec_from_json(spec_to_json(ProcessSpec::nggm(0.25, 1.5, 7))) == ProcessSpec::nggm(0.25, 1.5, 7));
  CHECK(spec_params(ProcessSpec::dmp(22.5, 200)) == "K=200;alpha=22.5");
}

TEST_CASE("harness reruns are byte-identical") {
  ExperimentConfig cfg;
  cfg.id = Experiment::Table2;
  cfg.overrides = {{"ns", {20, 60}}, {"alpha_bars", {0.01, 1.0}}, {"iters", 200}, {"burnin", 50}, {"write_traces", true}};
  cfg.out_dir = scratch("run-a");
  const auto a = run(cfg);
  cfg.threads = 1;
  cfg.out_dir = scratch("run-b");
  const auto b = run(cfg);
  CHECK(a.manifest_hash == b.manifest_hash);
  CHECK(read_file(a.manifest_path) == read_file(b.manifest_path));
  const auto files = a.manifest["files"];
  CHECK(files.size() >= 2);
  bool has_table = false;
  for (const auto& f : files) {
    const std::string rel = f["path"];
    has_table = has_table || rel == "table2.csv";
    CHECK(read_file(cfg.out_dir / rel) == read_file(a.manifest_path.parent_path() / rel));
  }
  CHECK(has_table);
  CHECK(fs::exists(cfg.out_dir / "run_info.json"));
  CHECK_FALSE(a.manifest.dump().find("wall") != std::string::npos);

  cfg.seed = 99;
  cfg.out_dir = scratch("run-c");
  CHECK(run(cfg).manifest_hash != a.manifest_hash);
}

TEST_CASE("harness surfaces downstream errors with context") {
  ExperimentConfig cfg;
  cfg.id = Experiment::Fig2Bottom;
  cfg.overrides = {{"target", 80.0}};
  cfg.out_dir = scratch("run-err");
  try {
    run(cfg);
    FAIL("expected an error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("fig2_bottom") != std::string::npos);
  }
}
