#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace bnpmix {

/// Parses the TOML subset used by experiment configs: [table] and [a.b]
/// headers, dotted keys, basic strings, integers, floats, booleans and
/// (possibly nested, single- or multi-line) arrays. Comments start with '#'.
/// Throws DomainError with a line number on anything else.
nlohmann::json parse_toml(const std::string& text);

/// JSON for *.json, the TOML subset for *.toml; other extensions are sniffed
/// (a leading '{' means JSON).
nlohmann::json load_config_file(const std::filesystem::path& path);

}  // namespace bnpmix
