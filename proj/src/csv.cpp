#include "bnpmix/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>
#include <thread>

#include <unistd.h>

#include "bnpmix/errors.hpp"

namespace bnpmix {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xF];
  return s;
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ostringstream tag;
  tag << ::getpid() << ':' << std::this_thread::get_id();
  fs::path tmp = path;
  tmp += ".tmp." + hex64(fnv1a64(tag.str()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

CsvTable::CsvTable(std::string description, std::vector<CsvColumn> columns)
    : description_(std::move(description)), columns_(std::move(columns)) {
  if (columns_.empty()) throw DomainError("CsvTable: no columns");
}

void CsvTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) throw DomainError("CsvTable: row width does not match the header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out += ',';
    out += quote_if_needed(columns_[i].name);
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      const auto& cell = row[i];
      if (const auto* l = std::get_if<long>(&cell)) out += std::to_string(*l);
      else if (const auto* d = std::get_if<double>(&cell)) out += format_double(*d);
      else out += quote_if_needed(std::get<std::string>(cell));
    }
    out += '\n';
  }
  return out;
}

nlohmann::json CsvTable::schema(const std::string& file_name) const {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : columns_) cols.push_back({{"name", c.name}, {"type", c.type}, {"description", c.description}});
  return {{"schema_version", 1}, {"format", "csv"}, {"file", file_name}, {"description", description_},
          {"header", true}, {"rows", rows_.size()}, {"columns", cols}};
}

void CsvTable::write(const std::filesystem::path& path) const {
  atomic_write(path, to_csv());
  std::filesystem::path side = path;
  side += ".schema.json";
  write_json(side, schema(path.filename().string()));
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { atomic_write(path, j.dump(2) + "\n"); }

}  // namespace bnpmix
