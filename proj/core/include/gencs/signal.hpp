#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gencs {

// Canonical processing rate. The QRS filter's integer delays are designed for it.
inline constexpr double kCanonicalFs = 200.0;

// Uniformly sampled real-valued waveform in millivolts.
//
// Invariants enforced at construction: at least one sample, fs > 0 and every
// sample finite.
class SampledSignal {
 public:
  SampledSignal(std::vector<double> samples, double fs);

  std::span<const double> samples() const noexcept { return samples_; }
  const std::vector<double>& values() const noexcept { return samples_; }
  double fs() const noexcept { return fs_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double duration() const noexcept { return static_cast<double>(samples_.size()) / fs_; }
  double operator[](std::size_t i) const { return samples_[i]; }

  bool operator==(const SampledSignal&) const = default;

 private:
  std::vector<double> samples_;
  double fs_;
};

// R-peak sample indices of a recording plus the rate needed to express them in
// seconds. Indices are strictly increasing; an empty list is allowed.
class GroundTruth {
 public:
  GroundTruth() = default;
  GroundTruth(std::vector<std::size_t> r_peaks, double fs);

  const std::vector<std::size_t>& r_peaks() const noexcept { return r_peaks_; }
  double fs() const noexcept { return fs_; }
  std::size_t size() const noexcept { return r_peaks_.size(); }
  bool empty() const noexcept { return r_peaks_.empty(); }

  // rr[i] = (r_peaks[i+1] - r_peaks[i]) / fs, in seconds.
  std::vector<double> rr_intervals() const;

  bool operator==(const GroundTruth&) const = default;

 private:
  std::vector<std::size_t> r_peaks_;
  double fs_ = kCanonicalFs;
};

// Contiguous sub-signal [start, start + length) with the same rate.
SampledSignal window(const SampledSignal& sig, std::size_t start, std::size_t length);

// Linear-interpolation resampling. Output length is round(len * target_fs / fs);
// output sample k sits at time k / target_fs and holds the last input sample
// past the end of the input.
SampledSignal resample(const SampledSignal& sig, double target_fs);

// Resamples to kCanonicalFs when needed.
SampledSignal to_canonical_rate(const SampledSignal& sig);

// Signal CSV: header `time_s,mv`, one row per sample.
SampledSignal read_signal_csv(const std::string& path);
void write_signal_csv(const std::string& path, const SampledSignal& sig);
SampledSignal parse_signal_csv(const std::string& text);
std::string format_signal_csv(const SampledSignal& sig);

// Ground-truth CSV: header `r_peak_index`, one index per row. The rate is not
// stored and must be supplied by the caller.
GroundTruth read_truth_csv(const std::string& path, double fs);
void write_truth_csv(const std::string& path, const GroundTruth& truth);

// Whole-file helpers shared by the text formats.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace gencs
