#include "gencs/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "gencs/error.hpp"

namespace gencs {

namespace {

constexpr std::uint64_t kNoiseStreamSalt = 0x9E3779B97F4A7C15ULL;

class RrSource {
 public:
  explicit RrSource(const SyntheticEcgSpec& spec)
      : engine_(spec.seed),
        dist_(60.0 / spec.mean_hr, spec.hr_jitter * 60.0 / spec.mean_hr),
        jitter_(spec.hr_jitter > 0.0) {}

  double next() {
    const double rr = jitter_ ? dist_(engine_) : dist_.mean();
    return std::clamp(rr, kMinRr, kMaxRr);
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> dist_;
  bool jitter_;
};

}  // namespace

void SyntheticEcgSpec::validate() const {
  if (!(fs > 0.0) || !std::isfinite(fs)) throw ValidationError("synth: fs must be positive");
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ValidationError("synth: duration must be positive");
  if (!(mean_hr >= 30.0 && mean_hr <= 220.0)) {
    throw ValidationError(fmt::format("synth: mean_hr {} outside [30, 220] bpm", mean_hr));
  }
  if (!(hr_jitter >= 0.0) || !std::isfinite(hr_jitter)) throw ValidationError("synth: hr_jitter must be >= 0");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) throw ValidationError("synth: noise_std must be >= 0");
  const double beat_samples = std::round(60.0 / mean_hr * fs);
  if (std::round(duration * fs) < beat_samples) {
    throw ValidationError("synth: duration shorter than one beat");
  }
  beat.validate();
}

std::vector<double> draw_rr_intervals(const SyntheticEcgSpec& spec, std::size_t count) {
  RrSource source(spec);
  std::vector<double> out(count);
  for (auto& rr : out) rr = source.next();
  return out;
}

SyntheticEcg synthesize_ecg(const SyntheticEcgSpec& spec) {
  spec.validate();
  const auto n = static_cast<std::size_t>(std::llround(spec.duration * spec.fs));
  const double mean_rr = 60.0 / spec.mean_hr;

  std::vector<std::size_t> peaks;
  RrSource rr_source(spec);
  auto position = static_cast<std::size_t>(std::llround(mean_rr * spec.fs / 2.0));
  while (position < n) {
    peaks.push_back(position);
    const auto step = std::max<long long>(1, std::llround(rr_source.next() * spec.fs));
    position += static_cast<std::size_t>(step);
  }

  GroundTruth truth(std::move(peaks), spec.fs);
  auto clean = reconstruct(spec.beat, truth, n, spec.fs);
  std::vector<double> samples = clean.signal.values();
  if (spec.noise_std > 0.0) {
    std::mt19937_64 noise_engine(spec.seed ^ kNoiseStreamSalt);
    std::normal_distribution<double> noise(0.0, spec.noise_std);
    for (auto& s : samples) s += noise(noise_engine);
  }
  return {SampledSignal(std::move(samples), spec.fs), std::move(truth)};
}

}  // namespace gencs
