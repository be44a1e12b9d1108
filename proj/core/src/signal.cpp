#include "gencs/signal.hpp"

#include <cmath>
#include <string>

#include "gencs/error.hpp"

namespace gencs {

SampledSignal::SampledSignal(std::vector<double> samples, double fs)
    : samples_(std::move(samples)), fs_(fs) {
  if (!(fs_ > 0.0) || !std::isfinite(fs_)) {
    throw ValidationError("signal: sampling rate must be positive and finite, got " +
                          std::to_string(fs_));
  }
  if (samples_.empty()) {
    throw ValidationError("signal: empty signal");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw ValidationError("signal: non-finite sample at index " + std::to_string(i));
    }
  }
}

GroundTruth::GroundTruth(std::vector<std::size_t> r_peaks, double fs)
    : r_peaks_(std::move(r_peaks)), fs_(fs) {
  if (!(fs_ > 0.0)) {
    throw ValidationError("ground truth: sampling rate must be positive");
  }
  for (std::size_t i = 1; i < r_peaks_.size(); ++i) {
    if (r_peaks_[i] <= r_peaks_[i - 1]) {
      throw ValidationError("ground truth: r_peaks must be strictly increasing (index " +
                            std::to_string(i) + ")");
    }
  }
}

std::vector<double> GroundTruth::rr_intervals() const {
  std::vector<double> rr;
  if (r_peaks_.size() < 2) return rr;
  rr.reserve(r_peaks_.size() - 1);
  for (std::size_t i = 1; i < r_peaks_.size(); ++i) {
    rr.push_back(static_cast<double>(r_peaks_[i] - r_peaks_[i - 1]) / fs_);
  }
  return rr;
}

SampledSignal window(const SampledSignal& sig, std::size_t start, std::size_t length) {
  if (length == 0) {
    throw ValidationError("window: length must be positive");
  }
  if (start > sig.size() || length > sig.size() - start) {
    throw BoundsError("window: [" + std::to_string(start) + ", " +
                      std::to_string(start + length) + ") exceeds signal length " +
                      std::to_string(sig.size()));
  }
  auto first = sig.values().begin() + static_cast<std::ptrdiff_t>(start);
  return SampledSignal(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(length)),
                       sig.fs());
}

SampledSignal resample(const SampledSignal& sig, double target_fs) {
  if (!(target_fs > 0.0) || !std::isfinite(target_fs)) {
    throw ValidationError("resample: target rate must be positive, got " +
                          std::to_string(target_fs));
  }
  if (target_fs == sig.fs()) return sig;

  const auto n_in = sig.size();
  const auto n_out = static_cast<std::size_t>(
      std::llround(static_cast<double>(n_in) * target_fs / sig.fs()));
  if (n_out == 0) {
    throw ValidationError("resample: output would be empty");
  }
  const auto x = sig.samples();
  std::vector<double> out(n_out);
  for (std::size_t k = 0; k < n_out; ++k) {
    const double pos = static_cast<double>(k) * sig.fs() / target_fs;
    const auto i0 = static_cast<std::size_t>(std::floor(pos));
    if (i0 + 1 >= n_in) {
      out[k] = x[n_in - 1];
      continue;
    }
    const double frac = pos - static_cast<double>(i0);
    out[k] = x[i0] + frac * (x[i0 + 1] - x[i0]);
  }
  return SampledSignal(std::move(out), target_fs);
}

SampledSignal to_canonical_rate(const SampledSignal& sig) {
  return sig.fs() == kCanonicalFs ? sig : resample(sig, kCanonicalFs);
}

}  // namespace gencs
