#include "gencs/config.hpp"

#include <algorithm>
#include <cstdlib>

#include <fmt/format.h>

#include "gencs/error.hpp"
#include "text_util.hpp"

namespace gencs {

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys{
      // synthetic signal (synth)
      "duration_s", "fs", "mean_hr", "hr_jitter", "noise_std", "seed",
      // compressive sensing
      "frame", "cr", "filter_variant", "wavelet", "wavelet_levels", "wavelet_length", "gencs_wavelet",
      "gencs_wavelet_levels", "omp_tol", "max_support", "detector_threshold", "detector_refractory_s",
      "detector_window_s", "bits_per_sample", "measurement_bits",
      // gemrem
      "hr_tol", "morph_tol", "rr_update_bits", "param_bits", "opcode_bits",
      // bench
      "methods", "cr_grid", "seeds", "corpus_duration_s", "corpus_base_hr", "corpus_hr_step", "corpus_hr_jitter",
      "corpus_noise_std", "learn_s", "recording", "recording_truth", "peak_tol_s", "threads", "record_wall_time",
      "mac_budget"};
  return keys;
}

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
  KeyValueConfig kv;
  std::size_t lineno = 0;
  for (auto raw : detail::split(text, '\n')) {
    ++lineno;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(fmt::format("config line {}: expected key = value", lineno));
    }
    try {
      kv.set(std::string(detail::trim(line.substr(0, eq))), std::string(detail::trim(line.substr(eq + 1))));
    } catch (const ValidationError& e) {
      throw ParseError(fmt::format("config line {}: {}", lineno, e.what()));
    }
  }
  return kv;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) { return parse(read_text_file(path)); }

KeyValueConfig KeyValueConfig::load_default(const std::optional<std::string>& path) {
  if (path) return load(*path);
  if (const char* env = std::getenv(kConfigEnvVar); env != nullptr && *env != '\0') return load(env);
  return {};
}

void KeyValueConfig::set(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ValidationError(fmt::format("override '{}' is not key=value", assignment));
  }
  set(std::string(detail::trim(assignment.substr(0, eq))), std::string(detail::trim(assignment.substr(eq + 1))));
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  const auto& keys = known_config_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
    throw ValidationError(fmt::format("unknown config key '{}'", key));
  }
  values_[key] = value;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return detail::parse_double(it->second, key);
  } catch (const ParseError& e) {
    throw ValidationError(e.what());
  }
}

std::uint64_t KeyValueConfig::get_uint(const std::string& key, std::uint64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return detail::parse_uint(it->second, key);
  } catch (const ParseError& e) {
    throw ValidationError(e.what());
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const auto& v = it->second;
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ValidationError(fmt::format("{}: '{}' is not a boolean", key, v));
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  for (auto part : detail::split(it->second, ',')) {
    if (detail::trim(part).empty()) continue;
    try {
      out.push_back(detail::parse_double(part, key));
    } catch (const ParseError& e) {
      throw ValidationError(e.what());
    }
  }
  return out;
}

std::vector<std::uint64_t> KeyValueConfig::get_uints(const std::string& key,
                                                      const std::vector<std::uint64_t>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<std::uint64_t> out;
  for (auto part : detail::split(it->second, ',')) {
    if (detail::trim(part).empty()) continue;
    try {
      out.push_back(detail::parse_uint(part, key));
    } catch (const ParseError& e) {
      throw ValidationError(e.what());
    }
  }
  return out;
}

SyntheticEcgSpec synth_spec_from(const KeyValueConfig& kv) {
  SyntheticEcgSpec s;
  s.duration = kv.get_double("duration_s", s.duration);
  s.fs = kv.get_double("fs", s.fs);
  s.mean_hr = kv.get_double("mean_hr", s.mean_hr);
  s.hr_jitter = kv.get_double("hr_jitter", s.hr_jitter);
  s.noise_std = kv.get_double("noise_std", s.noise_std);
  s.seed = kv.get_uint("seed", s.seed);
  s.validate();
  return s;
}

CsConfig cs_config_from(const KeyValueConfig& kv) {
  CsConfig c;
  c.frame = kv.get_uint("frame", c.frame);
  c.cr = kv.get_double("cr", c.cr);
  c.seed = kv.get_uint("seed", c.seed);
  c.variant = parse_filter_variant(kv.get_string("filter_variant", std::string(to_string(c.variant))));
  const auto length = kv.get_uint("wavelet_length", c.basis.n);
  c.basis.family = parse_wavelet_family(kv.get_string("wavelet", std::string(to_string(c.basis.family))));
  c.basis.levels = kv.get_uint("wavelet_levels", c.basis.levels);
  c.basis.n = length;
  c.gencs_basis.family =
      parse_wavelet_family(kv.get_string("gencs_wavelet", std::string(to_string(c.gencs_basis.family))));
  c.gencs_basis.levels = kv.get_uint("gencs_wavelet_levels", c.gencs_basis.levels);
  c.gencs_basis.n = length;
  c.tol = kv.get_double("omp_tol", c.tol);
  c.max_support = kv.get_uint("max_support", c.max_support);
  c.detector.threshold_fraction = kv.get_double("detector_threshold", c.detector.threshold_fraction);
  c.detector.refractory_s = kv.get_double("detector_refractory_s", c.detector.refractory_s);
  c.detector.window_s = kv.get_double("detector_window_s", c.detector.window_s);
  c.bits_per_sample = kv.get_uint("bits_per_sample", c.bits_per_sample);
  c.measurement_bits = kv.get_uint("measurement_bits", c.measurement_bits);
  c.basis.validate();
  c.gencs_basis.validate();
  return c;
}

GemremOptions gemrem_options_from(const KeyValueConfig& kv) {
  GemremOptions o;
  const auto cs = cs_config_from(kv);
  o.variant = cs.variant;
  o.detector = cs.detector;
  o.hr_tol = kv.get_double("hr_tol", o.hr_tol);
  o.morph_tol = kv.get_double("morph_tol", o.morph_tol);
  o.bits.bits_per_sample = cs.bits_per_sample;
  o.bits.rr_update_bits = kv.get_uint("rr_update_bits", o.bits.rr_update_bits);
  o.bits.param_bits = kv.get_uint("param_bits", o.bits.param_bits);
  o.bits.opcode_bits = kv.get_uint("opcode_bits", o.bits.opcode_bits);
  return o;
}

BenchConfig bench_config_from(const KeyValueConfig& kv) {
  BenchConfig b;
  if (kv.has("methods")) {
    b.methods.clear();
    for (auto part : detail::split(kv.get_string("methods", ""), ',')) {
      const auto name = detail::trim(part);
      if (!name.empty()) b.methods.push_back(parse_method(name));
    }
  }
  b.cr_grid = kv.get_doubles("cr_grid", b.cr_grid);
  b.seeds = kv.get_uints("seeds", b.seeds);
  b.corpus.duration = kv.get_double("corpus_duration_s", b.corpus.duration);
  b.corpus.base_hr = kv.get_double("corpus_base_hr", b.corpus.base_hr);
  b.corpus.hr_step = kv.get_double("corpus_hr_step", b.corpus.hr_step);
  b.corpus.hr_jitter = kv.get_double("corpus_hr_jitter", b.corpus.hr_jitter);
  b.corpus.noise_std = kv.get_double("corpus_noise_std", b.corpus.noise_std);
  b.corpus.learn_seconds = kv.get_double("learn_s", b.corpus.learn_seconds);
  if (kv.has("recording")) b.recording = kv.get_string("recording", "");
  if (kv.has("recording_truth")) b.recording_truth = kv.get_string("recording_truth", "");
  b.cs = cs_config_from(kv);
  b.gemrem = gemrem_options_from(kv);
  b.peak_tol = kv.get_double("peak_tol_s", b.peak_tol);
  b.threads = kv.get_uint("threads", b.threads);
  b.record_wall_time = kv.get_bool("record_wall_time", b.record_wall_time);
  return b;
}

double mac_budget_from(const KeyValueConfig& kv) {
  const double budget = kv.get_double("mac_budget", 1e12);
  if (!(budget > 0.0)) throw ValidationError("mac_budget must be positive");
  return budget;
}

}  // namespace gencs
