#pragma once

#include "bfspec/errors.hpp"
#include "bfspec/exact/integer.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace bfspec::io {

using json = nlohmann::json;

namespace detail {

// Recursive-descent reader for the TOML subset used by experiment configs:
// tables [a.b], dotted and quoted keys, strings, integers, floats (inf, nan),
// booleans, arrays (multi-line, trailing comma) and inline tables.
class DocumentReader {
 public:
  explicit DocumentReader(const std::string& text) : s_(text) {}

  json parse_document() {
    json root = json::object();
    json* table = &root;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        if (peek() == '[') fail("arrays of tables are not supported");
        auto path = parse_key_path();
        skip_ws();
        expect(']');
        table = &descend(root, path);
        end_of_line();
        continue;
      }
      auto path = parse_key_path();
      skip_ws();
      expect('=');
      skip_ws();
      json value = parse_value();
      json& parent = descend(*table, {path.begin(), path.end() - 1});
      if (parent.contains(path.back())) fail("duplicate key '" + path.back() + "'");
      parent[path.back()] = std::move(value);
      end_of_line();
    }
    return root;
  }

  /// A single value (used for command-line overrides).
  json parse_single_value() {
    skip_ws();
    json v = parse_value();
    skip_ws();
    if (!eof()) fail("trailing characters after value");
    return v;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }

  std::size_t line() const {
    std::size_t n = 1;
    for (std::size_t i = 0; i < pos_ && i < s_.size(); ++i) n += s_[i] == '\n';
    return n;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config line " + std::to_string(line()) + ": " + what);
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

  // Whitespace, newlines and comments (inside arrays and between statements).
  void skip_blank_lines() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\n' || peek() == '\r')
        ++pos_;
      else
        break;
    }
  }

  void end_of_line() {
    skip_ws();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (!eof() && peek() != '\n') fail("unexpected text after value");
  }

  std::string parse_key() {
    skip_ws();
    if (peek() == '"' || peek() == '\'') return parse_string();
    std::string k;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) k += s_[pos_++];
    if (k.empty()) fail("expected a key");
    return k;
  }

  std::vector<std::string> parse_key_path() {
    std::vector<std::string> path{parse_key()};
    skip_ws();
    while (peek() == '.') {
      ++pos_;
      path.push_back(parse_key());
      skip_ws();
    }
    return path;
  }

  json& descend(json& from, const std::vector<std::string>& path) {
    json* cur = &from;
    for (const auto& k : path) {
      json& next = (*cur)[k];
      if (next.is_null()) next = json::object();
      if (!next.is_object()) fail("key '" + k + "' is not a table");
      cur = &next;
    }
    return *cur;
  }

  std::string parse_string() {
    const char quote = s_[pos_++];
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = s_[pos_++];
      if (c == quote) break;
      if (c == '\\' && quote == '"') {
        if (eof()) fail("unterminated escape");
        char e = s_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(std::string("unknown escape \\") + e);
        }
        continue;
      }
      out += c;
    }
    return out;
  }

  json parse_value() {
    char c = peek();
    if (c == '"' || c == '\'') return parse_string();
    if (c == '[') return parse_array();
    if (c == '{') return parse_inline_table();
    std::string tok;
    while (!eof() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != ',' && peek() != ']' && peek() != '}' &&
           peek() != '#')
      tok += s_[pos_++];
    if (tok.empty()) fail("expected a value");
    if (tok == "true") return true;
    if (tok == "false") return false;
    return parse_number(tok);
  }

  json parse_number(std::string tok) {
    std::string clean;
    for (char ch : tok)
      if (ch != '_') clean += ch;
    if (clean == "inf" || clean == "+inf") return std::numeric_limits<double>::infinity();
    if (clean == "-inf") return -std::numeric_limits<double>::infinity();
    if (clean == "nan") return std::numeric_limits<double>::quiet_NaN();
    bool is_float = clean.find_first_of(".eE") != std::string::npos;
    try {
      std::size_t used = 0;
      if (!is_float) {
        long long v = std::stoll(clean, &used);
        if (used == clean.size()) return v;
      } else {
        double v = std::stod(clean, &used);
        if (used == clean.size()) return v;
      }
    } catch (const std::exception&) {
    }
    fail("cannot read value '" + tok + "' (strings need quotes)");
  }

  json parse_array() {
    expect('[');
    json arr = json::array();
    while (true) {
      skip_blank_lines();
      if (peek() == ']') {
        ++pos_;
        return arr;
      }
      arr.push_back(parse_value());
      skip_blank_lines();
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

  json parse_inline_table() {
    expect('{');
    json t = json::object();
    skip_ws();
    if (peek() == '}') {
      ++pos_;
      return t;
    }
    while (true) {
      auto path = parse_key_path();
      skip_ws();
      expect('=');
      skip_ws();
      json& parent = descend(t, {path.begin(), path.end() - 1});
      parent[path.back()] = parse_value();
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect('}');
      return t;
    }
  }
};

}  // namespace detail

/// Parses a config document: JSON if it starts with '{', the TOML subset otherwise.
inline json parse_config(const std::string& text) {
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("invalid JSON config: ") + e.what());
    }
  }
  return detail::DocumentReader(text).parse_document();
}

inline json load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Applies "a.b.c=value"; the value is read like a document value, and taken
/// as a bare string when it does not parse as one.
inline void apply_override(json& cfg, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must read key=value, got '" + assignment + "'");
  std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  json value;
  try {
    value = detail::DocumentReader(text).parse_single_value();
  } catch (const ConfigError&) {
    value = text;
  }
  // Split on dots outside double quotes ("system.kappa_table.\"5:2:0\"").
  std::vector<std::string> parts(1);
  bool quoted = false, was_quoted = false;
  for (char ch : key) {
    if (ch == '"') {
      quoted = !quoted;
      was_quoted = true;
    } else if (ch == '.' && !quoted) {
      if (parts.back().empty() && !was_quoted) throw ConfigError("empty key segment in override '" + key + "'");
      parts.emplace_back();
      was_quoted = false;
    } else {
      parts.back() += ch;
    }
  }
  if (quoted) throw ConfigError("unterminated quote in override key '" + key + "'");
  if (parts.back().empty() && !was_quoted) throw ConfigError("empty key segment in override '" + key + "'");
  json* cur = &cfg;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!cur->is_object()) throw ConfigError("override '" + key + "' descends into a non-table");
    if (i + 1 == parts.size()) {
      (*cur)[parts[i]] = std::move(value);
      return;
    }
    cur = &(*cur)[parts[i]];
    if (cur->is_null()) *cur = json::object();
  }
}

/// FNV-1a 64 of the canonical (sorted-key, compact) JSON serialisation.
inline std::string config_hash(const json& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : cfg.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

// Typed access with the field path in every diagnostic.

inline const json* find_path(const json& cfg, const std::string& path) {
  const json* cur = &cfg;
  std::size_t start = 0;
  while (true) {
    auto dot = path.find('.', start);
    std::string part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!cur->is_object()) return nullptr;
    auto it = cur->find(part);
    if (it == cur->end()) return nullptr;
    cur = &*it;
    if (dot == std::string::npos) return cur;
    start = dot + 1;
  }
}

inline bool has(const json& cfg, const std::string& path) { return find_path(cfg, path) != nullptr; }

inline const json& require(const json& cfg, const std::string& path) {
  const json* v = find_path(cfg, path);
  if (!v) throw ConfigError(path + ": missing");
  return *v;
}

inline std::int64_t get_int(const json& cfg, const std::string& path, std::optional<std::int64_t> fallback = std::nullopt) {
  const json* v = find_path(cfg, path);
  if (!v) {
    if (fallback) return *fallback;
    throw ConfigError(path + ": missing");
  }
  if (!v->is_number_integer()) throw ConfigError(path + ": expected an integer");
  return v->get<std::int64_t>();
}

inline double get_double(const json& cfg, const std::string& path, std::optional<double> fallback = std::nullopt) {
  const json* v = find_path(cfg, path);
  if (!v) {
    if (fallback) return *fallback;
    throw ConfigError(path + ": missing");
  }
  if (!v->is_number()) throw ConfigError(path + ": expected a number");
  return v->get<double>();
}

inline std::string get_string(const json& cfg, const std::string& path, std::optional<std::string> fallback = std::nullopt) {
  const json* v = find_path(cfg, path);
  if (!v) {
    if (fallback) return *fallback;
    throw ConfigError(path + ": missing");
  }
  if (!v->is_string()) throw ConfigError(path + ": expected a string");
  return v->get<std::string>();
}

inline bool get_bool(const json& cfg, const std::string& path, bool fallback) {
  const json* v = find_path(cfg, path);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ConfigError(path + ": expected true or false");
  return v->get<bool>();
}

/// A number given as an integer, a "p/q" string or (when allowed) a float.
inline exact::Rational parse_rational(const json& v, const std::string& path) {
  if (v.is_number_integer()) return exact::Rational(v.get<long long>());
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return exact::Rational(exact::Integer(s));
      exact::Integer num(s.substr(0, slash)), den(s.substr(slash + 1));
      if (den == 0) throw ConfigError(path + ": zero denominator");
      return exact::Rational(num, den);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError(path + ": cannot read rational '" + s + "'");
    }
  }
  throw ConfigError(path + ": expected an integer or a \"p/q\" string");
}

}  // namespace bfspec::io
