#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace bnpmix {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

/// 64-bit FNV-1a, used as a content fingerprint in manifests and cache names.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// Write via a temporary file in the same directory, then rename over `path`.
void atomic_write(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

struct CsvColumn {
  std::string name;
  std::string type;  // "integer", "number" or "string"
  std::string description;
};

class CsvTable {
 public:
  using Cell = std::variant<long, double, std::string>;

  CsvTable(std::string description, std::vector<CsvColumn> columns);

  void add_row(std::vector<Cell> row);
  const std::vector<CsvColumn>& columns() const { return columns_; }
  std::size_t rows() const { return rows_.size(); }

  std::string to_csv() const;
  nlohmann::json schema(const std::string& file_name) const;

  /// Writes `path` and the schema sidecar `path` + ".schema.json", both atomically.
  void write(const std::filesystem::path& path) const;

 private:
  std::string description_;
  std::vector<CsvColumn> columns_;
  std::vector<std::vector<Cell>> rows_;
};

/// Writes pretty JSON (2-space indent, trailing newline) atomically.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace bnpmix
