#pragma once
// Flat `key = value` experiment configs with command-line overrides.
// Every key that a pipeline reads is recorded together with its resolved
// value (including defaults), so the emitted manifest is itself a complete,
// re-runnable config. Keys present in the file but never consumed are
// rejected after the pipeline has declared its reads.

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "echolab/common.hpp"

namespace echolab {

class Config {
 public:
  Config() = default;

  static Config from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    Config cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (trim(line).empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("config: line " + std::to_string(lineno) +
                                 " is not 'key = value'");
      cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
  }

  void set(const std::string& key, const std::string& value) {
    if (key.empty()) throw std::runtime_error("config: empty key");
    values_[key] = value;
  }

  // `key=value` as passed to --set
  void set_from_override(const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: override '" + kv + "' is not key=value");
    set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  }

  std::string get_string(const std::string& key, const std::string& def) {
    auto it = values_.find(key);
    const std::string v = (it == values_.end()) ? def : it->second;
    consume(key, v);
    return v;
  }

  std::string require_string(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) throw std::runtime_error("config: missing required key '" + key + "'");
    consume(key, it->second);
    return it->second;
  }

  double get_double(const std::string& key, double def) {
    auto it = values_.find(key);
    const double v = (it == values_.end()) ? def : parse_double(key, it->second);
    consume(key, format_value(v));
    return v;
  }

  std::int64_t get_int(const std::string& key, std::int64_t def) {
    auto it = values_.find(key);
    std::int64_t v = def;
    if (it != values_.end()) {
      try {
        std::size_t pos = 0;
        v = std::stoll(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("");
      } catch (...) {
        throw std::runtime_error("config: key '" + key + "' is not an integer: " + it->second);
      }
    }
    consume(key, std::to_string(v));
    return v;
  }

  bool get_bool(const std::string& key, bool def) {
    auto it = values_.find(key);
    bool v = def;
    if (it != values_.end()) {
      if (it->second == "true" || it->second == "1") v = true;
      else if (it->second == "false" || it->second == "0") v = false;
      else throw std::runtime_error("config: key '" + key + "' is not a boolean: " + it->second);
    }
    consume(key, v ? "true" : "false");
    return v;
  }

  // Throws if the file contained keys no pipeline ever read.
  void reject_unknown() const {
    std::string unknown;
    for (const auto& [k, v] : values_)
      if (!consumed_.count(k)) unknown += (unknown.empty() ? "" : ", ") + k;
    if (!unknown.empty()) throw std::runtime_error("config: unknown keys: " + unknown);
  }

  // Complete resolved config (every consumed key with its final value),
  // sorted; valid as a config file.
  std::string manifest() const {
    std::ostringstream out;
    for (const auto& [k, v] : resolved_) out << k << " = " << v << "\n";
    return out.str();
  }

 private:
  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
  }

  static double parse_double(const std::string& key, const std::string& s) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw std::runtime_error("config: key '" + key + "' is not a number: " + s);
    }
  }

  static std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  }

  void consume(const std::string& key, const std::string& resolved) {
    consumed_.insert(key);
    resolved_[key] = resolved;
  }

  std::map<std::string, std::string> values_;
  std::set<std::string> consumed_;
  std::map<std::string, std::string> resolved_;
};

}  // namespace echolab
