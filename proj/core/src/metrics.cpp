#include "gencs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <vector>

#include <fmt/format.h>

#include "gencs/error.hpp"

namespace gencs {

PeakMatch rpeak_f1(const GroundTruth& detected, const GroundTruth& truth, double tol) {
  if (!(tol > 0.0)) throw ValidationError("rpeak_f1: tolerance must be positive");
  if (detected.fs() != truth.fs()) throw ValidationError("rpeak_f1: peak lists at different rates");
  PeakMatch out;
  out.rr_rmse = std::numeric_limits<double>::quiet_NaN();
  const auto& d = detected.r_peaks();
  const auto& t = truth.r_peaks();
  if (d.empty() && t.empty()) {
    out.f1 = out.precision = out.recall = 1.0;
    return out;
  }
  if (d.empty() || t.empty()) return out;

  const double tol_samples = tol * truth.fs();
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;  // distance, truth, detected
  std::size_t lo = 0;
  for (std::size_t ti = 0; ti < t.size(); ++ti) {
    const double tv = static_cast<double>(t[ti]);
    while (lo < d.size() && static_cast<double>(d[lo]) < tv - tol_samples) ++lo;
    for (std::size_t di = lo; di < d.size() && static_cast<double>(d[di]) <= tv + tol_samples; ++di) {
      pairs.emplace_back(std::abs(static_cast<double>(d[di]) - tv), ti, di);
    }
  }
  std::sort(pairs.begin(), pairs.end());

  std::vector<std::ptrdiff_t> match_of_truth(t.size(), -1);
  std::vector<char> detected_used(d.size(), 0);
  for (const auto& [dist, ti, di] : pairs) {
    if (match_of_truth[ti] >= 0 || detected_used[di]) continue;
    match_of_truth[ti] = static_cast<std::ptrdiff_t>(di);
    detected_used[di] = 1;
    ++out.matched;
  }

  out.precision = static_cast<double>(out.matched) / static_cast<double>(d.size());
  out.recall = static_cast<double>(out.matched) / static_cast<double>(t.size());
  out.f1 = out.matched == 0 ? 0.0 : 2.0 * out.precision * out.recall / (out.precision + out.recall);

  double sq = 0.0;
  std::size_t count = 0;
  for (std::size_t ti = 0; ti + 1 < t.size(); ++ti) {
    if (match_of_truth[ti] < 0 || match_of_truth[ti + 1] < 0) continue;
    const double det_rr = static_cast<double>(d[static_cast<std::size_t>(match_of_truth[ti + 1])]) -
                          static_cast<double>(d[static_cast<std::size_t>(match_of_truth[ti])]);
    const double true_rr = static_cast<double>(t[ti + 1]) - static_cast<double>(t[ti]);
    const double err = (det_rr - true_rr) / truth.fs();
    sq += err * err;
    ++count;
  }
  if (count > 0) out.rr_rmse = std::sqrt(sq / static_cast<double>(count));
  return out;
}

double prd(std::span<const double> reference, std::span<const double> test) {
  if (reference.size() != test.size()) {
    throw DimensionError(fmt::format("prd: lengths differ ({} vs {})", reference.size(), test.size()));
  }
  if (reference.empty()) throw ValidationError("prd: empty signals");
  double mean = 0.0;
  for (double v : reference) mean += v;
  mean /= static_cast<double>(reference.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double e = reference[i] - test[i];
    const double c = reference[i] - mean;
    num += e * e;
    den += c * c;
  }
  if (!(den > 0.0)) throw ValidationError("prd: constant reference makes the denominator zero");
  return 100.0 * std::sqrt(num / den);
}

double prd(const SampledSignal& reference, const SampledSignal& test) {
  return prd(reference.samples(), test.samples());
}

double compression_ratio(std::uint64_t n_samples, std::uint64_t bits_per_sample, std::uint64_t transmitted_bits) {
  if (transmitted_bits == 0) throw ValidationError("compression_ratio: zero transmitted bits");
  return static_cast<double>(n_samples) * static_cast<double>(bits_per_sample) /
         static_cast<double>(transmitted_bits);
}

}  // namespace gencs
