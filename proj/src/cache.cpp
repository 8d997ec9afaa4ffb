#include "bnpmix/cache.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>

#include "bnpmix/csv.hpp"

namespace bnpmix {

namespace {

constexpr char kMagic[8] = {'B', 'N', 'P', 'M', 'I', 'X', 'T', 'B'};
enum : std::uint32_t { kKindGfc = 1, kKindVnk = 2 };

std::string hexf(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

template <class T>
void put(std::string& out, const T& v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
bool get(const std::string& in, std::size_t& pos, T& v) {
  if (pos + sizeof v > in.size()) return false;
  std::memcpy(&v, in.data() + pos, sizeof v);
  pos += sizeof v;
  return true;
}

template <class T>
std::string encode(std::uint32_t kind, const std::string& key, const std::vector<T>& values) {
  std::string out(kMagic, sizeof kMagic);
  put(out, static_cast<std::uint32_t>(kCacheFormatVersion));
  put(out, kind);
  put(out, static_cast<std::uint32_t>(sizeof(T)));
  put(out, static_cast<std::uint32_t>(key.size()));
  out += key;
  put(out, static_cast<std::uint64_t>(values.size()));
  out.append(reinterpret_cast<const char*>(values.data()), values.size() * sizeof(T));
  return out;
}

template <class T>
std::optional<std::vector<T>> decode(const std::filesystem::path& path, std::uint32_t kind, const std::string& key) {
  std::string in;
  try {
    if (!std::filesystem::exists(path)) return std::nullopt;
    in = read_file(path);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (in.size() < sizeof kMagic || std::memcmp(in.data(), kMagic, sizeof kMagic) != 0) return std::nullopt;
  std::size_t pos = sizeof kMagic;
  std::uint32_t version, k, elem, key_len;
  if (!get(in, pos, version) || version != kCacheFormatVersion) return std::nullopt;
  if (!get(in, pos, k) || k != kind) return std::nullopt;
  if (!get(in, pos, elem) || elem != sizeof(T)) return std::nullopt;
  if (!get(in, pos, key_len) || pos + key_len > in.size()) return std::nullopt;
  if (in.compare(pos, key_len, key) != 0 || key_len != key.size()) return std::nullopt;
  pos += key_len;
  std::uint64_t count;
  if (!get(in, pos, count) || in.size() - pos != count * sizeof(T)) return std::nullopt;
  std::vector<T> values(count);
  std::memcpy(values.data(), in.data() + pos, count * sizeof(T));
  return values;
}

}  // namespace

std::string gfc_cache_key(double sigma, long n_max) {
  return "gfc;sigma=" + hexf(sigma) + ";n_max=" + std::to_string(n_max);
}

std::string vnk_cache_key(const ProcessSpec& spec, long n_max, long precision_bits) {
  return "vnk;family=" + to_string(spec.family) + ";alpha=" + hexf(spec.alpha) + ";sigma=" + hexf(spec.sigma) +
         ";beta=" + hexf(spec.beta) + ";K=" + std::to_string(spec.K) + ";n_max=" + std::to_string(n_max) +
         ";bits=" + std::to_string(precision_bits);
}

void save_gfc(const std::filesystem::path& path, const GfcTable& table) {
  atomic_write(path, encode(kKindGfc, gfc_cache_key(table.sigma(), table.n_max()), table.entries()));
}

std::optional<GfcTable> load_gfc(const std::filesystem::path& path, double sigma, long n_max) {
  auto v = decode<double>(path, kKindGfc, gfc_cache_key(sigma, n_max));
  if (!v || v->size() != static_cast<std::size_t>(n_max * (n_max + 1) / 2)) return std::nullopt;
  return GfcTable::from_entries(sigma, n_max, std::move(*v));
}

void save_vnk(const std::filesystem::path& path, const VnkTable& table) {
  atomic_write(path, encode(kKindVnk, vnk_cache_key(table.spec, table.n_max, table.precision_bits), table.log_values));
}

std::optional<VnkTable> load_vnk(const std::filesystem::path& path, const ProcessSpec& spec, long n_max,
                                 long precision_bits) {
  auto v = decode<long double>(path, kKindVnk, vnk_cache_key(spec, n_max, precision_bits));
  if (!v || v->size() != static_cast<std::size_t>(n_max * (n_max + 1) / 2)) return std::nullopt;
  VnkTable t;
  t.spec = spec;
  t.n_max = n_max;
  t.precision_bits = precision_bits;
  t.log_values = std::move(*v);
  return t;
}

std::filesystem::path TableCache::path_for(const std::string& key) const {
  return dir_ / (hex64(fnv1a64(key)) + ".bin");
}

GfcTable TableCache::gfc(double sigma, long n_max) const {
  const auto path = path_for(gfc_cache_key(sigma, n_max));
  if (auto t = load_gfc(path, sigma, n_max)) return std::move(*t);
  GfcTable t(sigma, n_max);
  save_gfc(path, t);
  return t;
}

VnkTable TableCache::vnk(const ProcessSpec& spec, long n_max, long precision_bits) const {
  const auto path = path_for(vnk_cache_key(spec, n_max, precision_bits));
  if (auto t = load_vnk(path, spec, n_max, precision_bits)) return std::move(*t);
  VnkTable t = VnkTable::build(spec, n_max, precision_bits);
  save_vnk(path, t);
  return t;
}

}  // namespace bnpmix
