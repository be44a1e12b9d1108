#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gencs/bench.hpp"
#include "gencs/gemrem.hpp"
#include "gencs/pipeline.hpp"
#include "gencs/synth.hpp"

namespace gencs {

// Environment variable naming the default config file.
inline constexpr const char* kConfigEnvVar = "GENCS_CONFIG";

// Flat `key = value` settings. Blank lines and lines starting with '#' are
// ignored; later assignments win. Every key must be one of known_config_keys().
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig load(const std::string& path);
  // Loads `path` if given, else the file named by GENCS_CONFIG if set, else empty.
  static KeyValueConfig load_default(const std::optional<std::string>& path);

  // `key=value` override, as given on the command line.
  void set(std::string_view assignment);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::uint64_t> get_uints(const std::string& key, const std::vector<std::uint64_t>& fallback) const;

 private:
  std::map<std::string, std::string> values_;
};

const std::vector<std::string>& known_config_keys();

SyntheticEcgSpec synth_spec_from(const KeyValueConfig& kv);
CsConfig cs_config_from(const KeyValueConfig& kv);
GemremOptions gemrem_options_from(const KeyValueConfig& kv);
BenchConfig bench_config_from(const KeyValueConfig& kv);
double mac_budget_from(const KeyValueConfig& kv);

}  // namespace gencs
