#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "gencs/signal.hpp"

namespace gencs {

struct PeakMatch {
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::size_t matched = 0;
  // RMS error of RR intervals between consecutive matched truth peaks, seconds;
  // NaN when no such interval exists.
  double rr_rmse = 0.0;
};

// Greedy one-to-one matching of detected to true peaks within +-tol seconds,
// closest pairs first. Both lists empty gives f1 = 1; exactly one empty gives 0.
PeakMatch rpeak_f1(const GroundTruth& detected, const GroundTruth& truth, double tol);

// Percentage RMS difference 100 * ||ref - test|| / ||ref - mean(ref)||.
double prd(std::span<const double> reference, std::span<const double> test);
double prd(const SampledSignal& reference, const SampledSignal& test);

// Raw bits divided by transmitted bits.
double compression_ratio(std::uint64_t n_samples, std::uint64_t bits_per_sample, std::uint64_t transmitted_bits);

}  // namespace gencs
