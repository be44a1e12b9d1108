#include "gencs/beat_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "gencs/error.hpp"
#include "text_util.hpp"

namespace gencs {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_phase(double phi) {
  phi = std::fmod(phi + kPi, kTwoPi);
  if (phi < 0.0) phi += kTwoPi;
  return phi - kPi;
}

double deg(double d) { return d * kPi / 180.0; }

}  // namespace

std::size_t BeatTemplate::r_index() const {
  if (waves.empty()) throw ValidationError("template: no waves");
  std::size_t best = 0;
  for (std::size_t k = 1; k < waves.size(); ++k) {
    const double a = std::abs(waves[k].amplitude);
    const double b = std::abs(waves[best].amplitude);
    if (a > b || (a == b && std::abs(waves[k].center) < std::abs(waves[best].center))) best = k;
  }
  return best;
}

bool BeatTemplate::is_qrs(std::size_t k) const {
  const auto r = r_index();
  return std::abs(wrap_phase(waves[k].center - waves[r].center)) <= kQrsHalfSpan;
}

void BeatTemplate::validate() const {
  if (waves.empty()) throw ValidationError("template: no waves");
  for (std::size_t k = 0; k < waves.size(); ++k) {
    const auto& w = waves[k];
    if (!std::isfinite(w.amplitude) || !std::isfinite(w.center) || !std::isfinite(w.width)) {
      throw ValidationError(fmt::format("template: g{} has a non-finite parameter", k));
    }
    if (!(w.width > 0.0)) throw ValidationError(fmt::format("template: g{}.width must be > 0", k));
  }
  if (!(reference_rr >= kMinRr && reference_rr <= kMaxRr)) {
    throw ValidationError(fmt::format("template: reference_rr {} outside [{}, {}] s", reference_rr,
                                      kMinRr, kMaxRr));
  }
  if (!(fit_residual >= 0.0)) throw ValidationError("template: fit_residual must be >= 0");
  if (waves[r_index()].amplitude == 0.0) throw ValidationError("template: R wave has zero amplitude");
}

double BeatTemplate::evaluate(double t, double rr) const {
  const auto r = r_index();
  double value = 0.0;
  for (std::size_t k = 0; k < waves.size(); ++k) {
    const auto& w = waves[k];
    double d;
    if (std::abs(wrap_phase(w.center - waves[r].center)) <= kQrsHalfSpan) {
      // QRS waves keep their absolute timing; measure distance at the reference rate.
      d = kTwoPi * t / reference_rr - w.center;
    } else {
      d = wrap_phase(kTwoPi * t / rr - w.center);
    }
    value += w.amplitude * std::exp(-0.5 * d * d / (w.width * w.width));
  }
  return value;
}

BeatTemplate default_template() {
  // Physical widths at 60 bpm; with a 1 s reference RR, seconds map to phase by 2*pi.
  BeatTemplate t;
  t.reference_rr = 1.0;
  t.fit_residual = 0.0;
  const double s = kTwoPi / t.reference_rr;
  t.waves = {
      {0.12, deg(-70.0), 0.045 * s},   // P
      {-0.10, deg(-15.0), 0.010 * s},  // Q
      {1.00, deg(0.0), 0.010 * s},     // R
      {-0.25, deg(15.0), 0.010 * s},   // S
      {0.30, deg(100.0), 0.080 * s},   // T
  };
  return t;
}

SampledSignal render_beat(const BeatTemplate& tmpl, double rr, double fs) {
  tmpl.validate();
  if (!(rr >= kMinRr && rr <= kMaxRr)) {
    throw ValidationError(fmt::format("render_beat: rr {} s outside [{}, {}]", rr, kMinRr, kMaxRr));
  }
  if (!(fs > 0.0)) throw ValidationError("render_beat: fs must be positive");
  const auto length = static_cast<std::size_t>(std::llround(rr * fs));
  const auto origin = static_cast<double>(std::llround(rr * fs / 2.0));
  if (length == 0) throw ValidationError("render_beat: beat shorter than one sample");
  std::vector<double> out(length);
  for (std::size_t j = 0; j < length; ++j) {
    out[j] = tmpl.evaluate((static_cast<double>(j) - origin) / fs, rr);
  }
  return SampledSignal(std::move(out), fs);
}

std::vector<BeatSpan> beat_layout(const GroundTruth& temporal, double reference_rr) {
  const auto& p = temporal.r_peaks();
  const double fs = temporal.fs();
  std::vector<BeatSpan> spans(p.size());
  if (p.empty()) return spans;

  const auto clamp_rr = [](double rr) { return std::clamp(rr, kMinRr, kMaxRr); };
  for (std::size_t i = 0; i < p.size(); ++i) {
    double rr;
    if (p.size() == 1) {
      rr = reference_rr;
    } else if (i + 1 < p.size()) {
      rr = static_cast<double>(p[i + 1] - p[i]) / fs;
    } else {
      rr = static_cast<double>(p[i] - p[i - 1]) / fs;
    }
    spans[i].peak = p[i];
    spans[i].rr = clamp_rr(rr);
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double peak = static_cast<double>(p[i]);
    spans[i].begin = i == 0 ? peak - spans[i].rr * fs / 2.0
                            : 0.5 * (static_cast<double>(p[i - 1]) + peak);
    spans[i].end = i + 1 == p.size() ? peak + spans[i].rr * fs / 2.0
                                     : 0.5 * (peak + static_cast<double>(p[i + 1]));
  }
  return spans;
}

Reconstruction reconstruct(const BeatTemplate& tmpl, const GroundTruth& temporal, std::size_t n,
                           double fs) {
  tmpl.validate();
  if (n == 0) throw ValidationError("reconstruct: n must be positive");
  if (temporal.fs() != fs) {
    throw ValidationError(
        fmt::format("reconstruct: peaks at {} Hz but output requested at {} Hz", temporal.fs(), fs));
  }
  if (!temporal.empty() && temporal.r_peaks().back() >= n) {
    throw BoundsError("reconstruct: peak index beyond signal length");
  }

  std::vector<double> out(n, 0.0);
  if (temporal.empty()) return {SampledSignal(std::move(out), fs), true, 0};

  const auto spans = beat_layout(temporal, tmpl.reference_rr);
  const double half_fade = 0.5 * kCrossfadeSeconds * fs;
  const auto last = static_cast<double>(n - 1);
  std::uint64_t evaluations = 0;

  for (std::size_t i = 0; i < spans.size(); ++i) {
    const auto& s = spans[i];
    const bool fade_in = i > 0;
    const bool fade_out = i + 1 < spans.size();
    const double lo = fade_in ? s.begin - half_fade : s.begin;
    const double hi = fade_out ? s.end + half_fade : s.end;
    const double j0 = std::max(0.0, std::ceil(lo));
    const double j1 = std::min(last, std::ceil(hi) - 1.0);
    for (double jd = j0; jd <= j1; jd += 1.0) {
      double weight = 1.0;
      if (fade_in && half_fade > 0.0) {
        weight = std::min(weight, std::clamp((jd - lo) / (2.0 * half_fade), 0.0, 1.0));
      } else if (jd < s.begin) {
        continue;
      }
      if (fade_out && half_fade > 0.0) {
        weight = std::min(weight, std::clamp((hi - jd) / (2.0 * half_fade), 0.0, 1.0));
      } else if (jd >= s.end) {
        continue;
      }
      if (weight <= 0.0) continue;
      const auto j = static_cast<std::size_t>(jd);
      const double t = (jd - static_cast<double>(s.peak)) / fs;
      out[j] += weight * tmpl.evaluate(t, s.rr);
      ++evaluations;
    }
  }
  return {SampledSignal(std::move(out), fs), false,
          evaluations * tmpl.waves.size() * kMacsPerGaussianEval};
}

std::string format_template(const BeatTemplate& tmpl) {
  tmpl.validate();
  fmt::memory_buffer buf;
  auto it = std::back_inserter(buf);
  for (std::size_t k = 0; k < tmpl.waves.size(); ++k) {
    const auto& w = tmpl.waves[k];
    fmt::format_to(it, "g{}.amp={:.17g}\n", k, w.amplitude);
    fmt::format_to(it, "g{}.center={:.17g}\n", k, w.center);
    fmt::format_to(it, "g{}.width={:.17g}\n", k, w.width);
  }
  fmt::format_to(it, "reference_rr={:.17g}\n", tmpl.reference_rr);
  fmt::format_to(it, "fit_residual={:.17g}\n", tmpl.fit_residual);
  return fmt::to_string(buf);
}

BeatTemplate parse_template(const std::string& text) {
  BeatTemplate t;
  t.waves.clear();
  bool have_rr = false;
  bool have_residual = false;
  struct Slot {
    bool amp = false, center = false, width = false;
  };
  std::vector<Slot> seen;

  for (auto line : detail::lines(text, true)) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("template: expected key=value, got '" + std::string(line) + "'");
    }
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::parse_double(line.substr(eq + 1), "template " + std::string(key));
    if (key == "reference_rr") {
      t.reference_rr = value;
      have_rr = true;
    } else if (key == "fit_residual") {
      t.fit_residual = value;
      have_residual = true;
    } else if (key.size() > 1 && key.front() == 'g') {
      const auto dot = key.find('.');
      if (dot == std::string_view::npos) throw ParseError("template: bad key '" + std::string(key) + "'");
      const auto k = static_cast<std::size_t>(detail::parse_uint(key.substr(1, dot - 1), "template index"));
      if (k >= 64) throw ParseError("template: wave index too large");
      if (k >= t.waves.size()) {
        t.waves.resize(k + 1);
        seen.resize(k + 1);
      }
      const auto field = key.substr(dot + 1);
      if (field == "amp") {
        t.waves[k].amplitude = value;
        seen[k].amp = true;
      } else if (field == "center") {
        t.waves[k].center = value;
        seen[k].center = true;
      } else if (field == "width") {
        t.waves[k].width = value;
        seen[k].width = true;
      } else {
        throw ParseError("template: unknown field '" + std::string(field) + "'");
      }
    } else {
      throw ParseError("template: unknown key '" + std::string(key) + "'");
    }
  }
  if (!have_rr || !have_residual) throw ParseError("template: missing reference_rr or fit_residual");
  for (std::size_t k = 0; k < seen.size(); ++k) {
    if (!seen[k].amp || !seen[k].center || !seen[k].width) {
      throw ParseError(fmt::format("template: wave g{} incomplete", k));
    }
  }
  try {
    t.validate();
  } catch (const ValidationError& e) {
    throw ParseError(e.what());
  }
  return t;
}

BeatTemplate read_template(const std::string& path) { return parse_template(read_text_file(path)); }

void write_template(const std::string& path, const BeatTemplate& tmpl) {
  write_text_file(path, format_template(tmpl));
}

}  // namespace gencs
