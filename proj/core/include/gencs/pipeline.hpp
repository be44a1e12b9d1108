#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gencs/beat_model.hpp"
#include "gencs/qrs_filter.hpp"
#include "gencs/sensing.hpp"
#include "gencs/signal.hpp"
#include "gencs/wavelet.hpp"

namespace gencs {

enum class Method { kPlainCs, kGemrem, kGenCs };

std::string_view to_string(Method m);
Method parse_method(std::string_view s);

// Settings shared by the frame-based CS paths.
struct CsConfig {
  std::size_t frame = 400;  // samples per frame (2 s at 200 Hz)
  double cr = 8.0;          // nominal n / m
  std::uint64_t seed = 1;   // sensing matrix seed, one matrix for all frames
  FilterVariant variant = FilterVariant::kCanonical;
  // Plain CS: the frame is zero padded up to basis.n.
  WaveletBasis basis{};
  // GenCS: the input window ends at the frame's last sample and reaches back
  // gencs_basis.n - frame samples, the filter state carried in from before.
  WaveletBasis gencs_basis{WaveletFamily::kHaar, 0, 512};
  double tol = 0.01;
  std::size_t max_support = 0;  // 0: 4 per expected beat (GenCS) or m / 4 (plain CS)
  DetectorConfig detector{};
  std::uint64_t bits_per_sample = 12;
  std::uint64_t measurement_bits = 24;

  std::size_t measurements() const;
  // Support cap actually used; reference_rr only matters for GenCS.
  std::size_t support_cap(Method method, double reference_rr, double fs = kCanonicalFs) const;
  // Throws ValidationError when the grid point cannot run (m < 1, m < support cap,
  // basis shorter than the frame).
  void check(Method method, double reference_rr, double fs = kCanonicalFs) const;
};

struct FrameStats {
  std::size_t frame_id = 0;
  double residual_norm = 0.0;
  std::size_t iterations = 0;
  std::uint64_t mac_count = 0;
};

struct PipelineResult {
  SampledSignal signal;             // full-length reconstruction
  SampledSignal component;          // GenCS: recovered cascade output; plain CS: same as signal
  GroundTruth peaks;                // R peaks located on the recovered data
  std::vector<FrameStats> frames;
  std::uint64_t mac_count = 0;      // recovery path only
  std::uint64_t sensing_macs = 0;   // sensor side, reported separately
  std::size_t m = 0;
  std::uint64_t transmitted_bits = 0;
};

// Frames of `frame` samples, the last one zero padded.
std::vector<std::vector<double>> split_frames(const SampledSignal& x, std::size_t frame);

// Sensor side. GenCS measures blocks of the continuously running cascade
// output, plain CS measures raw frames.
std::vector<MeasurementVector> compress(const SampledSignal& x, Method method, const CsConfig& config,
                                        double reference_rr = 1.0);

// Receiver side; n is the length of the original signal.
PipelineResult recover_gencs(const std::vector<MeasurementVector>& frames, const BeatTemplate& tmpl, std::size_t n,
                             const CsConfig& config, double fs = kCanonicalFs);
PipelineResult recover_plain(const std::vector<MeasurementVector>& frames, std::size_t n, const CsConfig& config,
                             double fs = kCanonicalFs);

// compress followed by recovery; x must be at 200 Hz.
PipelineResult gencs_pipeline(const SampledSignal& x, const BeatTemplate& tmpl, const CsConfig& config);
PipelineResult plain_cs_pipeline(const SampledSignal& x, const CsConfig& config);

}  // namespace gencs
