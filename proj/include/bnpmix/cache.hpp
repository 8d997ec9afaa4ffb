#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "bnpmix/gfc.hpp"
#include "bnpmix/vnk.hpp"

namespace bnpmix {

inline constexpr unsigned kCacheFormatVersion = 1;

/// Canonical text key for a table: family, parameters (exact hex floats),
/// n_max and precision.
std::string gfc_cache_key(double sigma, long n_max);
std::string vnk_cache_key(const ProcessSpec& spec, long n_max, long precision_bits);

/// Versioned binary files: magic, format version, table kind, element size,
/// the key, then the log-values. Loading returns nullopt on any mismatch
/// (missing file, other version, other key, truncated payload).
void save_gfc(const std::filesystem::path& path, const GfcTable& table);
std::optional<GfcTable> load_gfc(const std::filesystem::path& path, double sigma, long n_max);
void save_vnk(const std::filesystem::path& path, const VnkTable& table);
std::optional<VnkTable> load_vnk(const std::filesystem::path& path, const ProcessSpec& spec, long n_max,
                                 long precision_bits);

/// Directory of cached tables named by the hash of their key.
class TableCache {
 public:
  explicit TableCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  GfcTable gfc(double sigma, long n_max) const;
  VnkTable vnk(const ProcessSpec& spec, long n_max, long precision_bits = kDefaultPrecisionBits) const;
  std::filesystem::path path_for(const std::string& key) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace bnpmix
