#pragma once

#include <cstdint>

#include "gencs/beat_model.hpp"
#include "gencs/signal.hpp"

namespace gencs {

struct SyntheticEcgSpec {
  double duration = 10.0;   // s
  double fs = kCanonicalFs;  // Hz
  double mean_hr = 60.0;    // bpm, 30..220
  double hr_jitter = 0.0;   // fractional std-dev of RR
  double noise_std = 0.0;   // mV
  BeatTemplate beat = default_template();
  std::uint64_t seed = 1;

  // Throws ValidationError naming the offending field.
  void validate() const;
};

struct SyntheticEcg {
  SampledSignal signal;
  GroundTruth truth;
};

// Deterministic synthetic ECG. The first R peak sits half a mean RR into the
// record; later intervals are drawn from Normal(60/hr, jitter*60/hr) clipped to
// [kMinRr, kMaxRr] and rounded to whole samples. The waveform is the beat model
// rendered at those peaks plus white Gaussian noise.
SyntheticEcg synthesize_ecg(const SyntheticEcgSpec& spec);

// The raw RR draws (seconds, before rounding) synthesize_ecg uses for a spec.
std::vector<double> draw_rr_intervals(const SyntheticEcgSpec& spec, std::size_t count);

}  // namespace gencs
