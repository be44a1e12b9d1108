#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gencs/signal.hpp"

namespace gencs {

// Two readings of the high-pass recurrence.
//   verbatim:  z[i] = 32 x[i-16] - z[i-1] + x[i] - x[i-32]
//   canonical: r[i] = r[i-1] + x[i] - x[i-32];  z[i] = 32 x[i-16] - r[i]
// The canonical form has zero DC gain and is the default.
enum class FilterVariant { kVerbatim, kCanonical };

std::string_view to_string(FilterVariant v);
FilterVariant parse_filter_variant(std::string_view s);

// Longest tap of the cascade; frames must be at least this long plus one.
inline constexpr std::size_t kLongestTap = 32;

// Multiply-accumulates per output sample of the streaming cascade
// (low-pass: 4, high-pass: 3, counting the integer scalings).
inline constexpr std::uint64_t kCascadeMacsPerSample = 7;

// Low-pass stage y[i] = 2y[i-1] - y[i-2] + x[i] - 2x[i-6] + x[i-12], zero
// initial conditions. Requires fs == kCanonicalFs.
SampledSignal lowpass(const SampledSignal& x);
SampledSignal highpass(const SampledSignal& x, FilterVariant variant = FilterVariant::kCanonical);
SampledSignal bandstop_cascade(const SampledSignal& x,
                               FilterVariant variant = FilterVariant::kCanonical);

// Span versions operating on raw sample buffers at the canonical rate.
std::vector<double> lowpass(std::span<const double> x);
std::vector<double> highpass(std::span<const double> x, FilterVariant variant);
std::vector<double> bandstop_cascade(std::span<const double> x, FilterVariant variant);

// First n samples of the cascade's response to a unit impulse at index 0.
std::vector<double> cascade_impulse_response(std::size_t n, FilterVariant variant);

// Constant delay of the cascade in samples: argmax |h|.
std::size_t cascade_group_delay(FilterVariant variant);

// Matrix form of the cascade producing n output samples. Column c holds the
// response to an input sample at time c - history relative to the first output,
// so with history = 0 it is the square zero-initial-condition form
// (F * x == bandstop_cascade(x)), and with history > 0 it also covers input
// that arrived before the frame, as in a filter that runs continuously.
struct FilterMatrix {
  Eigen::MatrixXd entries;  // n x (n + history)
  FilterVariant variant = FilterVariant::kCanonical;
  std::size_t history = 0;

  Eigen::Index size() const { return entries.rows(); }
};

FilterMatrix filter_matrix(std::size_t n, FilterVariant variant = FilterVariant::kCanonical,
                           std::size_t history = 0);

struct DetectorConfig {
  double threshold_fraction = 0.5;  // of the trailing running max of |z|
  double refractory_s = 0.2;
  double window_s = 2.0;            // trailing window of the running max
};

// Local maxima of |z| above threshold_fraction times the max of |z| over the
// trailing window, at least refractory_s apart; within a refractory period the
// larger candidate wins. Indices are in the filtered signal's time base.
GroundTruth detect_r_peaks(const SampledSignal& z, const DetectorConfig& config = {});

// Shifts filtered-domain peak indices back by the cascade delay and drops those
// that would fall before the start of the signal.
GroundTruth compensate_delay(const GroundTruth& peaks, std::size_t delay);

// Moves each peak to the largest raw-signal sample within +-radius samples.
GroundTruth refine_peaks(const SampledSignal& raw, const GroundTruth& peaks, std::size_t radius);

// Filter, detect and align: R-peak positions in the time base of raw signal x.
GroundTruth locate_r_peaks(const SampledSignal& x, FilterVariant variant = FilterVariant::kCanonical,
                           const DetectorConfig& config = {});

}  // namespace gencs
