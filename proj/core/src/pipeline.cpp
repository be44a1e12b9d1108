#include "gencs/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "gencs/error.hpp"
#include "gencs/omp.hpp"
#include "gencs/recovery.hpp"

namespace gencs {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kPlainCs: return "plain_cs";
    case Method::kGemrem: return "gemrem";
    case Method::kGenCs: return "gencs";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  if (s == "plain_cs") return Method::kPlainCs;
  if (s == "gemrem") return Method::kGemrem;
  if (s == "gencs") return Method::kGenCs;
  throw ValidationError(fmt::format("unknown method '{}' (expected plain_cs, gemrem or gencs)", s));
}

std::size_t CsConfig::measurements() const { return measurements_for_ratio(frame, cr); }

std::size_t CsConfig::support_cap(Method method, double reference_rr, double fs) const {
  if (max_support > 0) return max_support;
  if (method == Method::kGenCs) {
    if (!(reference_rr > 0.0)) throw ValidationError("reference_rr must be positive");
    const double beats = std::ceil(static_cast<double>(frame) / fs / reference_rr - 1e-9);
    return 4 * static_cast<std::size_t>(std::max(1.0, beats));
  }
  return std::max<std::size_t>(1, measurements() / 4);
}

void CsConfig::check(Method method, double reference_rr, double fs) const {
  if (method == Method::kGemrem) throw ValidationError("CsConfig: gemrem is not a frame-based CS method");
  if (frame <= kLongestTap) throw ValidationError(fmt::format("frame of {} samples is too short", frame));
  const auto& b = method == Method::kGenCs ? gencs_basis : basis;
  b.validate();
  if (b.n < frame) throw ValidationError(fmt::format("wavelet length {} shorter than frame {}", b.n, frame));
  if (!(tol >= 0.0)) throw ValidationError("tol must be >= 0");
  if (bits_per_sample == 0 || measurement_bits == 0) throw ValidationError("bit depths must be positive");
  const auto m = measurements();
  if (m < 1) throw ValidationError(fmt::format("CR {} leaves no measurements for a {}-sample frame", cr, frame));
  const auto cap = support_cap(method, reference_rr, fs);
  if (m < cap) {
    throw ValidationError(fmt::format("CR {} gives m = {} below the support cap {}", cr, m, cap));
  }
}

std::vector<std::vector<double>> split_frames(const SampledSignal& x, std::size_t frame) {
  if (frame == 0) throw ValidationError("frame length must be positive");
  std::vector<std::vector<double>> out;
  const auto& v = x.values();
  for (std::size_t start = 0; start < v.size(); start += frame) {
    std::vector<double> f(frame, 0.0);
    const auto len = std::min(frame, v.size() - start);
    std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(start), len, f.begin());
    out.push_back(std::move(f));
  }
  return out;
}

namespace {

std::size_t frame_measurements(const std::vector<MeasurementVector>& frames) {
  if (frames.empty()) throw ValidationError("no measurement frames");
  const auto m = frames.front().values.size();
  for (std::size_t k = 0; k < frames.size(); ++k) {
    if (frames[k].values.size() != m) {
      throw DimensionError(fmt::format("frame {} has {} measurements, expected {}", k, frames[k].values.size(), m));
    }
  }
  return m;
}

struct Solved {
  std::vector<double> samples;  // concatenated frame estimates, truncated to n
  std::vector<FrameStats> stats;
  std::uint64_t macs = 0;
};

Solved solve_frames(const std::vector<MeasurementVector>& frames, const Dictionary& dict, std::size_t n,
                    const OmpOptions& options, double fs) {
  const auto frame = static_cast<std::size_t>(dict.response.rows());
  if (frames.size() * frame < n) {
    throw DimensionError(fmt::format("{} frames of {} samples cannot cover {} samples", frames.size(), frame, n));
  }
  Solved out;
  out.samples.reserve(frames.size() * frame);
  for (const auto& y : frames) {
    const auto r = recover_frame(dict, y, options, fs);
    out.samples.insert(out.samples.end(), r.signal.values().begin(), r.signal.values().end());
    out.stats.push_back({y.frame_id, r.solution.residual_norm, r.solution.iterations, r.mac_count});
    out.macs += r.mac_count;
  }
  out.samples.resize(n);
  return out;
}

void check_measurements(std::size_t m, const CsConfig& config) {
  if (m != config.measurements()) {
    throw DimensionError(fmt::format("frames carry {} measurements but CR {} implies {}", m, config.cr,
                                     config.measurements()));
  }
}

}  // namespace

std::vector<MeasurementVector> compress(const SampledSignal& x, Method method, const CsConfig& config,
                                        double reference_rr) {
  config.check(method, reference_rr, x.fs());
  const auto phi = bernoulli_matrix(config.measurements(), config.frame, config.seed);
  if (method == Method::kGenCs) {
    if (x.fs() != kCanonicalFs) {
      throw RateError(fmt::format("GenCS sensing needs {} Hz input, got {} Hz", kCanonicalFs, x.fs()));
    }
    return measure_filtered_stream(phi, x, config.variant);
  }
  const auto parts = split_frames(x, config.frame);
  std::vector<MeasurementVector> out;
  out.reserve(parts.size());
  for (std::size_t k = 0; k < parts.size(); ++k) out.push_back(measure(phi, parts[k], k));
  return out;
}

PipelineResult recover_gencs(const std::vector<MeasurementVector>& frames, const BeatTemplate& tmpl, std::size_t n,
                             const CsConfig& config, double fs) {
  tmpl.validate();
  if (fs != kCanonicalFs) throw RateError(fmt::format("GenCS recovery runs at {} Hz, got {} Hz", kCanonicalFs, fs));
  config.check(Method::kGenCs, tmpl.reference_rr, fs);
  const auto m = frame_measurements(frames);
  check_measurements(m, config);
  if (n == 0) throw ValidationError("signal length must be positive");

  const auto phi = bernoulli_matrix(m, config.frame, config.seed);
  const auto f = filter_matrix(config.frame, config.variant, config.gencs_basis.n - config.frame);
  const auto dict = filtered_dictionary(phi, f, config.gencs_basis);
  const OmpOptions options{config.support_cap(Method::kGenCs, tmpl.reference_rr, fs), config.tol};
  auto solved = solve_frames(frames, dict, n, options, fs);

  SampledSignal z(std::move(solved.samples), fs);
  const auto detected = detect_r_peaks(z, config.detector);
  auto peaks = compensate_delay(detected, cascade_group_delay(config.variant));
  auto rec = reconstruct(tmpl, peaks, n, fs);

  PipelineResult r{std::move(rec.signal), std::move(z), std::move(peaks), std::move(solved.stats), 0, 0, m, 0};
  r.mac_count = solved.macs + rec.mac_count;
  r.sensing_macs = frames.size() * (sensing_macs(m, config.frame) + kCascadeMacsPerSample * config.frame);
  r.transmitted_bits = frames.size() * m * config.measurement_bits;
  return r;
}

PipelineResult recover_plain(const std::vector<MeasurementVector>& frames, std::size_t n, const CsConfig& config,
                             double fs) {
  config.check(Method::kPlainCs, 1.0, fs);
  const auto m = frame_measurements(frames);
  check_measurements(m, config);
  if (n == 0) throw ValidationError("signal length must be positive");

  const auto phi = bernoulli_matrix(m, config.frame, config.seed);
  const auto dict = plain_dictionary(phi, config.basis);
  const OmpOptions options{config.support_cap(Method::kPlainCs, 1.0, fs), config.tol};
  auto solved = solve_frames(frames, dict, n, options, fs);

  SampledSignal x(std::move(solved.samples), fs);
  GroundTruth peaks({}, fs);
  if (fs == kCanonicalFs && x.duration() >= config.detector.window_s) {
    peaks = locate_r_peaks(x, config.variant, config.detector);
  }
  PipelineResult r{x, x, std::move(peaks), std::move(solved.stats), solved.macs, 0, m, 0};
  r.sensing_macs = frames.size() * sensing_macs(m, config.frame);
  r.transmitted_bits = frames.size() * m * config.measurement_bits;
  return r;
}

PipelineResult gencs_pipeline(const SampledSignal& x, const BeatTemplate& tmpl, const CsConfig& config) {
  tmpl.validate();
  const auto frames = compress(x, Method::kGenCs, config, tmpl.reference_rr);
  return recover_gencs(frames, tmpl, x.size(), config, x.fs());
}

PipelineResult plain_cs_pipeline(const SampledSignal& x, const CsConfig& config) {
  const auto frames = compress(x, Method::kPlainCs, config);
  return recover_plain(frames, x.size(), config, x.fs());
}

}  // namespace gencs
