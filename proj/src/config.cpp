#include "bnpmix/config.hpp"

#include <cctype>
#include <limits>

#include "bnpmix/csv.hpp"
#include "bnpmix/errors.hpp"

namespace bnpmix {

using nlohmann::json;

namespace {

class TomlParser {
 public:
  explicit TomlParser(const std::string& text) : s_(text) {}

  json parse() {
    json root = json::object();
    json* table = &root;
    for (;;) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        if (peek() == '[') fail("arrays of tables are not supported");
        skip_ws();
        const auto path = parse_key_path();
        skip_ws();
        expect(']');
        table = &root;
        for (const auto& part : path) {
          json& next = (*table)[part];
          if (next.is_null()) next = json::object();
          if (!next.is_object()) fail("'" + part + "' is not a table");
          table = &next;
        }
      } else {
        const auto path = parse_key_path();
        skip_ws();
        expect('=');
        skip_ws();
        json value = parse_value();
        json* target = table;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
          json& next = (*target)[path[i]];
          if (next.is_null()) next = json::object();
          if (!next.is_object()) fail("'" + path[i] + "' is not a table");
          target = &next;
        }
        if (target->contains(path.back())) fail("duplicate key '" + path.back() + "'");
        (*target)[path.back()] = std::move(value);
      }
      end_of_line();
    }
    return root;
  }

 private:
  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    long line = 1;
    for (std::size_t i = 0; i < pos_ && i < s_.size(); ++i) line += s_[i] == '\n';
    throw DomainError("TOML line " + std::to_string(line) + ": " + msg);
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }

  void skip_blank_lines() {
    for (;;) {
      skip_ws();
      skip_comment();
      if (peek() == '\r') ++pos_;
      if (peek() == '\n') {
        ++pos_;
        continue;
      }
      return;
    }
  }

  // Whitespace, newlines and comments, as allowed inside arrays.
  void skip_array_space() {
    for (;;) {
      skip_ws();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        ++pos_;
        continue;
      }
      return;
    }
  }

  void end_of_line() {
    skip_ws();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (eof()) return;
    if (peek() != '\n') fail("unexpected text after value");
    ++pos_;
  }

  std::string parse_key() {
    if (peek() == '"') return parse_string();
    const std::size_t start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
    if (start == pos_) fail("expected a key");
    return s_.substr(start, pos_ - start);
  }

  std::vector<std::string> parse_key_path() {
    std::vector<std::string> path{parse_key()};
    for (;;) {
      skip_ws();
      if (peek() != '.') return path;
      ++pos_;
      skip_ws();
      path.push_back(parse_key());
    }
  }

  std::string parse_string() {
    expect('"');
    std::string out;
    for (;;) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = s_[pos_++];
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      const char e = s_[pos_++];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: fail(std::string("unsupported escape \\") + e);
      }
    }
  }

  json parse_value() {
    const char c = peek();
    if (c == '"') return parse_string();
    if (c == '[') {
      ++pos_;
      json arr = json::array();
      for (;;) {
        skip_array_space();
        if (peek() == ']') {
          ++pos_;
          return arr;
        }
        arr.push_back(parse_value());
        skip_array_space();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        if (peek() == ']') {
          ++pos_;
          return arr;
        }
        fail("expected ',' or ']' in array");
      }
    }
    const std::size_t start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '.' || peek() == '-' ||
                      peek() == '+' || peek() == '_'))
      ++pos_;
    std::string tok = s_.substr(start, pos_ - start);
    if (tok == "true") return true;
    if (tok == "false") return false;
    if (tok == "inf" || tok == "+inf") return std::numeric_limits<double>::infinity();
    if (tok.empty()) fail("expected a value");
    std::erase(tok, '_');
    const bool is_float = tok.find_first_of(".eE") != std::string::npos;
    try {
      std::size_t used = 0;
      if (is_float) {
        const double v = std::stod(tok, &used);
        if (used == tok.size()) return v;
      } else {
        const long long v = std::stoll(tok, &used);
        if (used == tok.size()) return v;
      }
    } catch (const std::exception&) {
    }
    fail("cannot parse value '" + tok + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

json parse_toml(const std::string& text) { return TomlParser(text).parse(); }

json load_config_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto ext = path.extension().string();
  if (ext == ".json") return json::parse(text);
  if (ext == ".toml") return parse_toml(text);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return json::parse(text);
  return parse_toml(text);
}

}  // namespace bnpmix
