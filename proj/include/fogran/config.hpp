// config.hpp - flat key/value configuration files
//
//   # comment
//   mu = 0.5
//   r_f = 0.25
//   blocks_list = 1, 10, 100
//
// Values are decimal numerals (lists are comma separated). Unknown keys and
// repeated keys are parse errors so typos never silently fall back to a default.

#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fogran/model.hpp"

namespace fogran {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

inline const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = {
      // instance
      "mu", "r_f", "r_d", "n_files", "file_bits", "log_p", "blocks",
      // simulation options
      "blocks_list", "log_p_list", "degenerate_passthrough",
      // sweeps and grids
      "sweep_start", "sweep_stop", "sweep_steps", "grid_steps", "r_f_max", "r_d_max",
      "mu_values", "r_f_values", "r_d_values"};
  return keys;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s == "inf" || s == "+inf") return kInf;
  double value = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

}  // namespace detail

// Parsed configuration: raw values keyed by name, with the source line of each.
class Config {
 public:
  static Config parse(std::string_view text) {
    Config cfg;
    const auto& keys = known_config_keys();
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto nl = text.find('\n', pos);
      auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
      ++line_no;

      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = detail::trim(line);
      if (line.empty()) continue;

      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
      const std::string key(detail::trim(line.substr(0, eq)));
      const std::string value(detail::trim(line.substr(eq + 1)));
      if (key.empty()) throw ParseError(line_no, "missing key");
      if (std::find(keys.begin(), keys.end(), key) == keys.end())
        throw ParseError(line_no, "unknown key '" + key + "'");
      if (value.empty()) throw ParseError(line_no, "missing value for '" + key + "'");
      if (cfg.values_.count(key)) throw ParseError(line_no, "duplicate key '" + key + "'");

      // Validate numerals eagerly so the error carries the right line.
      std::stringstream items(value);
      std::string item;
      while (std::getline(items, item, ','))
        if (!detail::parse_number(item)) throw ParseError(line_no, "malformed number '" + item + "' for '" + key + "'");
      cfg.values_[key] = {value, line_no};
    }
    return cfg;
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::optional<double> number(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    const auto v = detail::parse_number(it->second.text);
    if (!v) throw ParseError(it->second.line, "expected a single number for '" + key + "'");
    return v;
  }

  double number_or(const std::string& key, double fallback) const { return number(key).value_or(fallback); }

  double require_number(const std::string& key) const {
    if (auto v = number(key)) return *v;
    throw ValidationError(key, "required key is missing from the config");
  }

  std::optional<std::int64_t> integer(const std::string& key) const {
    const auto v = number(key);
    if (!v) return std::nullopt;
    if (*v != std::floor(*v) || std::abs(*v) > 9.0e15)
      throw ParseError(values_.at(key).line, "expected an integer for '" + key + "'");
    return static_cast<std::int64_t>(*v);
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    const auto it = values_.find(key);
    if (it == values_.end()) return out;
    std::stringstream items(it->second.text);
    std::string item;
    while (std::getline(items, item, ',')) out.push_back(*detail::parse_number(item));
    return out;
  }

  int line_of(const std::string& key) const {
    const auto it = values_.find(key);
    return it == values_.end() ? 0 : it->second.line;
  }

 private:
  struct Entry {
    std::string text;
    int line = 0;
  };
  std::map<std::string, Entry> values_;
};

inline SystemParams params_from_config(const Config& cfg) {
  SystemParams p;
  p.mu = cfg.require_number("mu");
  p.r_f = cfg.require_number("r_f");
  p.r_d = cfg.require_number("r_d");
  p.n_files = static_cast<int>(cfg.integer("n_files").value_or(2));
  require_valid(p);
  return p;
}

inline SimScale scale_from_config(const Config& cfg) {
  SimScale s;
  s.file_bits = cfg.integer("file_bits").value_or(0);
  s.log_p = cfg.number_or("log_p", 0.0);
  s.blocks = cfg.integer("blocks").value_or(1);
  if (!cfg.has("file_bits")) throw ValidationError("file_bits", "required key is missing from the config");
  if (!cfg.has("log_p")) throw ValidationError("log_p", "required key is missing from the config");
  require_valid(s);
  return s;
}

namespace detail {

inline std::string exact_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// Writes the instance back in the same format; parse(to_config_text(p)) == p.
inline std::string to_config_text(const SystemParams& p, const std::optional<SimScale>& scale = std::nullopt) {
  std::string out;
  out += "mu = " + detail::exact_number(p.mu) + "\n";
  out += "r_f = " + detail::exact_number(p.r_f) + "\n";
  out += "r_d = " + detail::exact_number(p.r_d) + "\n";
  out += "n_files = " + std::to_string(p.n_files) + "\n";
  if (scale) {
    out += "file_bits = " + std::to_string(scale->file_bits) + "\n";
    out += "log_p = " + detail::exact_number(scale->log_p) + "\n";
    out += "blocks = " + std::to_string(scale->blocks) + "\n";
  }
  return out;
}

}  // namespace fogran
