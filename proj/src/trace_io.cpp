#include "bnpmix/trace_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bnpmix/csv.hpp"
#include "bnpmix/errors.hpp"

namespace bnpmix {

using nlohmann::json;

namespace {

json header(const Trace& t, const char* kind) {
  return {{"format", kind},       {"version", kTraceFormatVersion}, {"seed", t.seed},
          {"chain", t.chain},     {"iters", t.iters},               {"burnin", t.burnin},
          {"thin", t.thin},       {"snapshot_stride", t.snapshot_stride},
          {"alpha_acceptance", t.alpha_acceptance}, {"error", t.error}};
}

std::vector<json> read_lines(const std::filesystem::path& path, const char* kind) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(json::parse(line));
  }
  if (out.empty() || out.front().value("format", "") != kind)
    throw DomainError(path.string() + " is not a " + std::string(kind) + " file");
  if (out.front().value("version", 0) != kTraceFormatVersion)
    throw DomainError(path.string() + ": unsupported format version");
  return out;
}

}  // namespace

void write_trace(const std::filesystem::path& path, const Trace& trace) {
  std::string s = header(trace, "bnpmix-trace").dump() + "\n";
  for (const auto& r : trace.records) {
    s += json{{"iter", r.iter}, {"k_occupied", r.k_occupied}, {"w_sorted", r.w_sorted},
              {"alpha_bar", r.alpha_bar}, {"loglik", r.loglik}}.dump();
    s += '\n';
  }
  atomic_write(path, s);
}

void write_mixing_measures(const std::filesystem::path& path, const Trace& trace) {
  std::string s = header(trace, "bnpmix-mixing").dump() + "\n";
  for (const auto& snap : trace.snapshots) {
    s += json{{"iter", snap.iter}, {"weights", snap.weights}, {"locations", snap.locations}}.dump();
    s += '\n';
  }
  atomic_write(path, s);
}

Trace read_trace(const std::filesystem::path& path) {
  const auto lines = read_lines(path, "bnpmix-trace");
  const json& h = lines.front();
  Trace t;
  t.seed = h.at("seed").get<std::uint64_t>();
  t.chain = h.at("chain").get<long>();
  t.iters = h.at("iters").get<long>();
  t.burnin = h.at("burnin").get<long>();
  t.thin = h.at("thin").get<long>();
  t.snapshot_stride = h.at("snapshot_stride").get<long>();
  t.alpha_acceptance = h.value("alpha_acceptance", 0.0);
  t.error = h.value("error", "");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const json& j = lines[i];
    TraceRecord r;
    r.iter = j.at("iter").get<long>();
    r.k_occupied = j.at("k_occupied").get<long>();
    r.w_sorted = j.at("w_sorted").get<std::vector<double>>();
    r.alpha_bar = j.at("alpha_bar").get<double>();
    r.loglik = j.at("loglik").get<double>();
    t.records.push_back(std::move(r));
  }
  return t;
}

void read_mixing_measures(const std::filesystem::path& path, Trace& trace) {
  const auto lines = read_lines(path, "bnpmix-mixing");
  trace.snapshots.clear();
  for (std::size_t i = 1; i < lines.size(); ++i) {
    Snapshot s;
    s.iter = lines[i].at("iter").get<long>();
    s.weights = lines[i].at("weights").get<std::vector<double>>();
    s.locations = lines[i].at("locations").get<std::vector<std::vector<double>>>();
    trace.snapshots.push_back(std::move(s));
  }
}

void write_dataset(const std::filesystem::path& path, const Dataset& data) {
  std::vector<CsvColumn> cols;
  for (long t = 0; t < data.d; ++t) cols.push_back({"x" + std::to_string(t + 1), "number", "coordinate " + std::to_string(t + 1)});
  cols.push_back({"component", "integer", "generating component (0-based), -1 if unknown"});
  CsvTable table("simulated mixture observations", cols);
  for (long i = 0; i < data.n(); ++i) {
    std::vector<CsvTable::Cell> row;
    for (long t = 0; t < data.d; ++t) row.emplace_back(data.row(i)[t]);
    row.emplace_back(static_cast<long>(data.label.empty() ? -1 : data.label[static_cast<std::size_t>(i)]));
    table.add_row(std::move(row));
  }
  table.write(path);
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw DomainError(path.string() + ": empty dataset file");
  long cols = 1;
  for (char c : line) cols += c == ',';
  const bool has_label = line.size() >= 9 && line.substr(line.size() - 9) == "component";
  Dataset d;
  d.d = has_label ? cols - 1 : cols;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    for (long c = 0; c < cols; ++c) {
      if (!std::getline(row, cell, ',')) throw DomainError(path.string() + ": short row");
      if (c < d.d) d.x.push_back(std::stod(cell));
      else d.label.push_back(std::stoi(cell));
    }
    if (!has_label) d.label.push_back(-1);
  }
  return d;
}

}  // namespace bnpmix
