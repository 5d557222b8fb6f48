#pragma once

// Minimal TOML subset reader: top-level and [section] tables, key = value
// lines, values being strings, booleans, integers, floats, or flat arrays of
// those. Enough for the experiment configuration files; it is not a general
// TOML implementation.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace lagdec::toml {

struct Value;
using Array = std::vector<Value>;

struct Value {
  std::variant<bool, std::int64_t, double, std::string, Array> data;

  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }

  const std::string& as_string() const {
    if (!is_string()) throw std::runtime_error("toml: expected string");
    return std::get<std::string>(data);
  }
  bool as_bool() const {
    if (!std::holds_alternative<bool>(data)) throw std::runtime_error("toml: expected boolean");
    return std::get<bool>(data);
  }
  std::int64_t as_int() const {
    if (std::holds_alternative<std::int64_t>(data)) return std::get<std::int64_t>(data);
    throw std::runtime_error("toml: expected integer");
  }
  double as_double() const {
    if (std::holds_alternative<double>(data)) return std::get<double>(data);
    if (std::holds_alternative<std::int64_t>(data))
      return static_cast<double>(std::get<std::int64_t>(data));
    throw std::runtime_error("toml: expected number");
  }
  const Array& as_array() const {
    if (!is_array()) throw std::runtime_error("toml: expected array");
    return std::get<Array>(data);
  }
};

class Table {
public:
  bool contains(const std::string& key) const { return values_.count(key) != 0; }

  const Value& at(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw std::runtime_error("toml: missing key '" + key + "'");
    return it->second;
  }

  double number_or(const std::string& key, double fallback) const {
    return contains(key) ? at(key).as_double() : fallback;
  }
  std::int64_t int_or(const std::string& key, std::int64_t fallback) const {
    return contains(key) ? at(key).as_int() : fallback;
  }
  std::string string_or(const std::string& key, const std::string& fallback) const {
    return contains(key) ? at(key).as_string() : fallback;
  }
  std::vector<double> number_list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& v : at(key).as_array()) out.push_back(v.as_double());
    return out;
  }
  std::vector<std::string> string_list(const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& v : at(key).as_array()) out.push_back(v.as_string());
    return out;
  }

  void set(const std::string& key, Value v) { values_[key] = std::move(v); }

private:
  std::map<std::string, Value> values_;
};

namespace detail {

inline void skip_ws(const std::string& s, size_t& i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

inline Value parse_value(const std::string& s, size_t& i, int line);

inline Value parse_scalar(const std::string& s, size_t& i, int line) {
  skip_ws(s, i);
  if (i >= s.size()) throw std::runtime_error("toml: missing value on line " + std::to_string(line));
  if (s[i] == '"') {
    std::string out;
    ++i;
    while (i < s.size() && s[i] != '"') {
      if (s[i] == '\\' && i + 1 < s.size()) ++i;
      out.push_back(s[i++]);
    }
    if (i >= s.size()) throw std::runtime_error("toml: unterminated string on line " + std::to_string(line));
    ++i;
    return Value{out};
  }
  size_t start = i;
  while (i < s.size() && s[i] != ',' && s[i] != ']' && s[i] != '#') ++i;
  std::string tok = s.substr(start, i - start);
  while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t')) tok.pop_back();
  if (tok == "true") return Value{true};
  if (tok == "false") return Value{false};
  if (tok.empty()) throw std::runtime_error("toml: empty value on line " + std::to_string(line));
  const bool looks_float = tok.find_first_of(".eE") != std::string::npos ||
                           tok == "inf" || tok == "-inf" || tok == "nan";
  try {
    size_t used = 0;
    if (!looks_float) {
      std::int64_t v = std::stoll(tok, &used);
      if (used == tok.size()) return Value{v};
    }
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::runtime_error("trailing characters");
    return Value{v};
  } catch (const std::exception&) {
    throw std::runtime_error("toml: cannot parse value '" + tok + "' on line " + std::to_string(line));
  }
}

inline Value parse_value(const std::string& s, size_t& i, int line) {
  skip_ws(s, i);
  if (i < s.size() && s[i] == '[') {
    ++i;
    Array arr;
    skip_ws(s, i);
    if (i < s.size() && s[i] == ']') {
      ++i;
      return Value{arr};
    }
    while (true) {
      arr.push_back(parse_value(s, i, line));
      skip_ws(s, i);
      if (i < s.size() && s[i] == ',') {
        ++i;
        continue;
      }
      if (i < s.size() && s[i] == ']') {
        ++i;
        return Value{arr};
      }
      throw std::runtime_error("toml: malformed array on line " + std::to_string(line));
    }
  }
  return parse_scalar(s, i, line);
}

} // namespace detail

/// Parses the supported subset. Section tables are flattened into the result
/// with keys "section.key".
inline Table parse(std::istream& in) {
  Table table;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t i = 0;
    detail::skip_ws(line, i);
    if (i >= line.size() || line[i] == '#') continue;
    if (line[i] == '[') {
      size_t close = line.find(']', i);
      if (close == std::string::npos)
        throw std::runtime_error("toml: malformed section header on line " + std::to_string(lineno));
      section = line.substr(i + 1, close - i - 1);
      continue;
    }
    size_t eq = line.find('=', i);
    if (eq == std::string::npos)
      throw std::runtime_error("toml: expected key = value on line " + std::to_string(lineno));
    std::string key = line.substr(i, eq - i);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    if (key.empty()) throw std::runtime_error("toml: empty key on line " + std::to_string(lineno));
    size_t j = eq + 1;
    Value v = detail::parse_value(line, j, lineno);
    detail::skip_ws(line, j);
    if (j < line.size() && line[j] != '#')
      throw std::runtime_error("toml: trailing characters on line " + std::to_string(lineno));
    table.set(section.empty() ? key : section + "." + key, std::move(v));
  }
  return table;
}

inline Table parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  return parse(in);
}

} // namespace lagdec::toml
