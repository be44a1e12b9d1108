#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gencs/signal.hpp"

namespace gencs {

// Shortest and longest beat durations the model renders, in seconds.
inline constexpr double kMinRr = 0.3;
inline constexpr double kMaxRr = 2.0;

// Linear crossfade length at the join between adjacent beats, in seconds.
inline constexpr double kCrossfadeSeconds = 0.010;

// Waves whose center lies within this phase distance of the R wave form the QRS
// complex. They keep their absolute timing when the heart rate changes; the
// remaining waves (P, T) stretch with the beat.
inline constexpr double kQrsHalfSpan = 0.7853981633974483;  // pi / 4

// Multiply-accumulates charged for one Gaussian evaluation at one sample.
inline constexpr std::uint64_t kMacsPerGaussianEval = 4;

// One Gaussian wave of the beat model. Center and width are in beat-phase
// radians measured at the template's reference RR; phase 0 is the R peak.
struct GaussianWave {
  double amplitude = 0.0;  // mV
  double center = 0.0;     // rad, in [-pi, pi)
  double width = 0.0;      // rad, > 0

  bool operator==(const GaussianWave&) const = default;
};

// Sum-of-Gaussians description of one heartbeat.
struct BeatTemplate {
  std::vector<GaussianWave> waves;
  double reference_rr = 1.0;  // s
  double fit_residual = 0.0;  // RMS mV of the fit that produced the template
  bool converged = true;      // false when learning stopped at the iteration cap

  // Index of the R wave: largest |amplitude|, ties broken by center nearest 0.
  std::size_t r_index() const;
  bool is_qrs(std::size_t k) const;

  // Throws ValidationError naming the first violated invariant.
  void validate() const;

  // Model value at time t (s) relative to the beat's R phase origin for a beat
  // lasting rr seconds. Defined for every t; P/T phases wrap around +-pi.
  double evaluate(double t, double rr) const;

  bool operator==(const BeatTemplate& o) const {
    return waves == o.waves && reference_rr == o.reference_rr && fit_residual == o.fit_residual;
  }
};

// Five-wave P, Q, R, S, T morphology used by the synthetic generator. Widths are
// the physical widths at 60 bpm (reference RR 1 s).
BeatTemplate default_template();

// One beat of duration rr sampled at fs: round(rr * fs) samples with the R phase
// origin at sample round(rr * fs / 2).
SampledSignal render_beat(const BeatTemplate& tmpl, double rr, double fs);

// Where each beat sits inside a reconstructed signal. Boundaries are in
// fractional samples; interior joins are the midpoints between adjacent peaks.
struct BeatSpan {
  std::size_t peak = 0;
  double rr = 0.0;  // s, the RR used to render the beat
  double begin = 0.0;
  double end = 0.0;
};

// Local RR of beat i is the interval to the next peak; the last beat reuses the
// preceding interval and a lone beat uses the template's reference RR. RR values
// are clamped to [kMinRr, kMaxRr] for rendering.
std::vector<BeatSpan> beat_layout(const GroundTruth& temporal, double reference_rr);

struct Reconstruction {
  SampledSignal signal;
  bool isoelectric = false;  // no peaks supplied; output is all zeros
  std::uint64_t mac_count = 0;
};

// Renders the template at every peak, scaled to the local RR, and joins
// neighbouring beats with a kCrossfadeSeconds linear crossfade. Samples outside
// every beat are isoelectric (0 mV).
Reconstruction reconstruct(const BeatTemplate& tmpl, const GroundTruth& temporal, std::size_t n,
                           double fs);

// Template file: `key=value` lines with keys g<k>.amp, g<k>.center, g<k>.width,
// reference_rr and fit_residual. Values carry 17 significant digits.
std::string format_template(const BeatTemplate& tmpl);
BeatTemplate parse_template(const std::string& text);
BeatTemplate read_template(const std::string& path);
void write_template(const std::string& path, const BeatTemplate& tmpl);

struct LearnOptions {
  std::size_t min_beats = 5;
  int max_iterations = 200;
  double step_tolerance = 1e-10;
};

// Fits a sum of Gaussians to the phase-normalised average of the beats in the
// snippet. The snippet must be at kCanonicalFs. On hitting the iteration cap the
// best iterate is returned with converged = false.
BeatTemplate learn_template(const SampledSignal& snippet, const GroundTruth& peaks,
                            const LearnOptions& options = {});

// Phase-normalised pointwise average of all complete beats, resampled to
// round(mean_rr * fs) points; exposed for diagnostics and tests.
struct AveragedBeat {
  std::vector<double> phase;  // rad
  std::vector<double> value;  // mV
  double mean_rr = 0.0;       // s
  std::size_t beats = 0;
};
AveragedBeat average_beats(const SampledSignal& snippet, const GroundTruth& peaks);

}  // namespace gencs
