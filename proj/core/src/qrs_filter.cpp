#include "gencs/qrs_filter.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include <fmt/format.h>

#include "gencs/error.hpp"

namespace gencs {

namespace {

void require_canonical_rate(double fs, const char* op) {
  if (fs != kCanonicalFs) {
    throw RateError(fmt::format("{}: filter coefficients are designed for {} Hz, got {} Hz; resample first",
                                op, kCanonicalFs, fs));
  }
}

// x[i - k] with zero initial conditions.
inline double tap(std::span<const double> x, std::size_t i, std::size_t k) {
  return i >= k ? x[i - k] : 0.0;
}

}  // namespace

std::string_view to_string(FilterVariant v) {
  return v == FilterVariant::kVerbatim ? "verbatim" : "canonical";
}

FilterVariant parse_filter_variant(std::string_view s) {
  if (s == "verbatim") return FilterVariant::kVerbatim;
  if (s == "canonical") return FilterVariant::kCanonical;
  throw ValidationError("unknown filter variant '" + std::string(s) + "' (expected verbatim|canonical)");
}

std::vector<double> lowpass(std::span<const double> x) {
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double y1 = i >= 1 ? y[i - 1] : 0.0;
    const double y2 = i >= 2 ? y[i - 2] : 0.0;
    y[i] = 2.0 * y1 - y2 + x[i] - 2.0 * tap(x, i, 6) + tap(x, i, 12);
  }
  return y;
}

std::vector<double> highpass(std::span<const double> x, FilterVariant variant) {
  std::vector<double> z(x.size());
  if (variant == FilterVariant::kVerbatim) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double z1 = i >= 1 ? z[i - 1] : 0.0;
      z[i] = 32.0 * tap(x, i, 16) - z1 + x[i] - tap(x, i, 32);
    }
  } else {
    double running = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      running += x[i] - tap(x, i, 32);
      z[i] = 32.0 * tap(x, i, 16) - running;
    }
  }
  return z;
}

std::vector<double> bandstop_cascade(std::span<const double> x, FilterVariant variant) {
  const auto y = lowpass(x);
  return highpass(y, variant);
}

SampledSignal lowpass(const SampledSignal& x) {
  require_canonical_rate(x.fs(), "lowpass");
  return SampledSignal(lowpass(x.samples()), x.fs());
}

SampledSignal highpass(const SampledSignal& x, FilterVariant variant) {
  require_canonical_rate(x.fs(), "highpass");
  return SampledSignal(highpass(x.samples(), variant), x.fs());
}

SampledSignal bandstop_cascade(const SampledSignal& x, FilterVariant variant) {
  require_canonical_rate(x.fs(), "bandstop_cascade");
  return SampledSignal(bandstop_cascade(x.samples(), variant), x.fs());
}

std::vector<double> cascade_impulse_response(std::size_t n, FilterVariant variant) {
  std::vector<double> impulse(n, 0.0);
  if (n > 0) impulse[0] = 1.0;
  return bandstop_cascade(impulse, variant);
}

std::size_t cascade_group_delay(FilterVariant variant) {
  const auto h = cascade_impulse_response(4 * kLongestTap, variant);
  std::size_t best = 0;
  for (std::size_t i = 1; i < h.size(); ++i) {
    if (std::abs(h[i]) > std::abs(h[best])) best = i;
  }
  return best;
}

FilterMatrix filter_matrix(std::size_t n, FilterVariant variant, std::size_t history) {
  if (n < kLongestTap + 1) {
    throw ValidationError(fmt::format("filter_matrix: n = {} is shorter than the longest tap ({} + 1)",
                                      n, kLongestTap));
  }
  const auto h = cascade_impulse_response(n + history, variant);
  const auto rows = static_cast<Eigen::Index>(n);
  const auto cols = static_cast<Eigen::Index>(n + history);
  const auto shift = static_cast<Eigen::Index>(history);
  FilterMatrix f{Eigen::MatrixXd::Zero(rows, cols), variant, history};
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index i = std::max<Eigen::Index>(0, c - shift); i < rows; ++i) {
      f.entries(i, c) = h[static_cast<std::size_t>(i - (c - shift))];
    }
  }
  return f;
}

GroundTruth detect_r_peaks(const SampledSignal& z, const DetectorConfig& config) {
  if (z.duration() < config.window_s) {
    throw ValidationError(fmt::format("detect_r_peaks: signal lasts {} s, need at least {} s",
                                      z.duration(), config.window_s));
  }
  const auto n = z.size();
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = std::abs(z[i]);

  const auto window = static_cast<std::size_t>(std::llround(config.window_s * z.fs()));
  // round up so accepted peaks really are refractory_s apart
  const auto refractory = static_cast<std::size_t>(std::ceil(config.refractory_s * z.fs() - 1e-9));

  // Until a full window has gone by there is no trailing history to speak of;
  // the first window's max stands in (learning phase).
  const double first_max = *std::max_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(std::min(n, window + 1)));

  std::vector<std::size_t> peaks;
  std::deque<std::size_t> maxq;  // indices with decreasing a[], trailing window
  for (std::size_t i = 0; i < n; ++i) {
    while (!maxq.empty() && a[maxq.back()] <= a[i]) maxq.pop_back();
    maxq.push_back(i);
    while (maxq.front() + window < i) maxq.pop_front();

    if (i == 0 || i + 1 >= n) continue;
    if (!(a[i] > a[i - 1] && a[i] >= a[i + 1])) continue;
    const double ref = i < window ? first_max : a[maxq.front()];
    if (!(a[i] > 0.0) || a[i] < config.threshold_fraction * ref) continue;

    if (!peaks.empty() && i - peaks.back() < refractory) {
      if (a[i] > a[peaks.back()]) peaks.back() = i;
      continue;
    }
    peaks.push_back(i);
  }
  return GroundTruth(std::move(peaks), z.fs());
}

GroundTruth compensate_delay(const GroundTruth& peaks, std::size_t delay) {
  std::vector<std::size_t> out;
  out.reserve(peaks.size());
  for (auto p : peaks.r_peaks()) {
    if (p >= delay) out.push_back(p - delay);
  }
  return GroundTruth(std::move(out), peaks.fs());
}

GroundTruth refine_peaks(const SampledSignal& raw, const GroundTruth& peaks, std::size_t radius) {
  std::vector<std::size_t> out;
  out.reserve(peaks.size());
  for (auto p : peaks.r_peaks()) {
    if (p >= raw.size()) continue;
    const auto lo = p >= radius ? p - radius : 0;
    const auto hi = std::min(raw.size() - 1, p + radius);
    std::size_t best = p;
    for (auto i = lo; i <= hi; ++i) {
      if (raw[i] > raw[best]) best = i;
    }
    if (out.empty() || best > out.back()) out.push_back(best);
  }
  return GroundTruth(std::move(out), peaks.fs());
}

GroundTruth locate_r_peaks(const SampledSignal& x, FilterVariant variant, const DetectorConfig& config) {
  const auto z = bandstop_cascade(x, variant);
  const auto detected = detect_r_peaks(z, config);
  const auto aligned = compensate_delay(detected, cascade_group_delay(variant));
  const auto radius = static_cast<std::size_t>(std::llround(0.02 * x.fs()));
  return refine_peaks(x, aligned, radius);
}

}  // namespace gencs
