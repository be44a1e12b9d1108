#include "gencs/gemrem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "gencs/error.hpp"
#include "gencs/metrics.hpp"
#include "text_util.hpp"

namespace gencs {

namespace {

// RR updates travel as integers in 1/16-sample units.
constexpr double kRrQuantum = 16.0;

void check_options(const GemremOptions& o) {
  if (!(o.hr_tol >= 0.0 && o.hr_tol < 1.0)) throw ValidationError("gemrem: hr_tol must be in [0, 1)");
  if (!(o.morph_tol >= 0.0)) throw ValidationError("gemrem: morph_tol must be >= 0");
}

double quantize_rr_samples(double v) { return std::round(v * kRrQuantum) / kRrQuantum; }

// Fractional decoder positions for every beat; shared by encoder and decoder so
// both sides agree on the layout.
std::vector<double> decoder_positions(const GemremStream& s) {
  std::vector<double> pos(s.beats);
  if (s.beats == 0) return pos;
  double pred = s.header.reference_rr * s.fs;
  pos[0] = static_cast<double>(s.first_peak);
  auto u = s.updates.begin();
  for (std::size_t i = 1; i < s.beats; ++i) {
    if (u != s.updates.end() && u->beat == i) {
      pred = u->rr * s.fs;
      ++u;
    }
    pos[i] = pos[i - 1] + pred;
  }
  return pos;
}

GroundTruth rounded_peaks(const std::vector<double>& pos, std::size_t n, double fs) {
  std::vector<std::size_t> out;
  out.reserve(pos.size());
  for (double p : pos) {
    const auto r = std::llround(p);
    if (r < 0 || static_cast<std::size_t>(r) >= n) continue;
    const auto idx = static_cast<std::size_t>(r);
    if (!out.empty() && idx <= out.back()) continue;
    out.push_back(idx);
  }
  return GroundTruth(std::move(out), fs);
}

// Integer sample range [lo, hi) owned by each beat of a layout.
std::pair<std::size_t, std::size_t> span_range(const BeatSpan& s, std::size_t n) {
  const double lo = std::clamp(std::ceil(s.begin), 0.0, static_cast<double>(n));
  const double hi = std::clamp(std::ceil(s.end), 0.0, static_cast<double>(n));
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(std::max(lo, hi))};
}

// Maps decoded peak positions back to beat numbers (beats past the end drop out).
std::vector<std::size_t> beat_numbers(const std::vector<double>& pos, std::size_t n) {
  std::vector<std::size_t> out;
  long long last = -1;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    const auto r = std::llround(pos[i]);
    if (r < 0 || static_cast<std::size_t>(r) >= n || r <= last) continue;
    last = r;
    out.push_back(i);
  }
  return out;
}

}  // namespace

GemremStream gemrem_encode(const SampledSignal& sig, const BeatTemplate& tmpl, const GemremOptions& options) {
  tmpl.validate();
  check_options(options);
  const auto peaks = locate_r_peaks(sig, options.variant, options.detector);
  return gemrem_encode(sig, tmpl, peaks, options);
}

GemremStream gemrem_encode(const SampledSignal& sig, const BeatTemplate& tmpl, const GroundTruth& peaks,
                           const GemremOptions& options) {
  tmpl.validate();
  check_options(options);
  if (peaks.fs() != sig.fs()) throw ValidationError("gemrem_encode: peaks and signal at different rates");
  const auto& p = peaks.r_peaks();
  const std::size_t n = sig.size();
  if (!p.empty() && p.back() >= n) throw BoundsError("gemrem_encode: peak index beyond signal length");

  GemremStream s;
  s.header = tmpl;
  s.fs = sig.fs();
  s.beats = p.size();
  if (p.empty()) return s;
  s.first_peak = p[0];

  const double tol = options.hr_tol;
  const auto rr_at = [&](std::size_t i) { return static_cast<double>(p[i] - p[i - 1]); };
  const auto fits = [&](double rr, double v) { return std::abs(rr - v) <= tol * v; };

  // Beats still covered by the header's reference RR.
  const double v0 = tmpl.reference_rr * s.fs;
  std::size_t i = 1;
  while (i < p.size() && fits(rr_at(i), v0)) ++i;

  // Remaining beats in maximal runs with a common admissible RR: v must satisfy
  // rr / (1 + tol) <= v <= rr / (1 - tol) for every rr in the run.
  double decoded = static_cast<double>(p[0]) + static_cast<double>(i - 1) * v0;
  while (i < p.size()) {
    double lo = rr_at(i) / (1.0 + tol);
    double hi = rr_at(i) / (1.0 - tol);
    std::size_t e = i;
    while (e + 1 < p.size()) {
      const double r = rr_at(e + 1);
      const double nlo = std::max(lo, r / (1.0 + tol));
      const double nhi = std::min(hi, r / (1.0 - tol));
      if (nlo > nhi) break;
      lo = nlo;
      hi = nhi;
      ++e;
    }
    // Aim the run at its last true peak so timing error does not accumulate.
    const double count = static_cast<double>(e - i + 1);
    double v = (static_cast<double>(p[e]) - decoded) / count;
    v = quantize_rr_samples(std::clamp(v, lo, hi));
    s.updates.push_back({i, v / s.fs});
    decoded += count * v;
    i = e + 1;
  }

  // Morphology check against the template rendered at the true timing.
  const auto model = reconstruct(tmpl, peaks, n, s.fs).signal;
  const auto true_spans = beat_layout(peaks, tmpl.reference_rr);
  const auto pos = decoder_positions(s);
  const auto decoded_layout = beat_layout(rounded_peaks(pos, n, s.fs), tmpl.reference_rr);
  const auto numbers = beat_numbers(pos, n);

  for (std::size_t b = 0; b < p.size(); ++b) {
    const auto [lo, hi] = span_range(true_spans[b], n);
    if (hi <= lo) continue;
    double sq = 0.0;
    for (std::size_t j = lo; j < hi; ++j) {
      const double d = sig[j] - model[j];
      sq += d * d;
    }
    const double rms = std::sqrt(sq / static_cast<double>(hi - lo));
    if (rms <= options.morph_tol) continue;
    // Raw samples go out over the span the decoder will assign to this beat.
    const auto it = std::lower_bound(numbers.begin(), numbers.end(), b);
    if (it == numbers.end() || *it != b) continue;  // beat falls outside the decoded signal
    const auto [dlo, dhi] = span_range(decoded_layout[static_cast<std::size_t>(it - numbers.begin())], n);
    s.escapes.push_back({b, std::vector<double>(sig.values().begin() + static_cast<std::ptrdiff_t>(dlo),
                                                sig.values().begin() + static_cast<std::ptrdiff_t>(dhi))});
  }
  return s;
}

GroundTruth gemrem_decoded_peaks(const GemremStream& stream, std::size_t n) {
  return rounded_peaks(decoder_positions(stream), n, stream.fs);
}

GemremDecoded gemrem_decode_full(const GemremStream& stream, std::size_t n, double fs) {
  if (n == 0) throw ValidationError("gemrem_decode: n must be positive");
  if (fs != stream.fs) {
    throw ValidationError(fmt::format("gemrem_decode: stream at {} Hz, output requested at {} Hz", stream.fs, fs));
  }
  stream.header.validate();
  const auto pos = decoder_positions(stream);
  auto peaks = rounded_peaks(pos, n, fs);
  auto rec = reconstruct(stream.header, peaks, n, fs);
  if (stream.escapes.empty()) return {std::move(rec.signal), std::move(peaks), rec.mac_count};

  auto out = rec.signal.values();
  const auto layout = beat_layout(peaks, stream.header.reference_rr);
  const auto numbers = beat_numbers(pos, n);
  for (const auto& e : stream.escapes) {
    const auto it = std::lower_bound(numbers.begin(), numbers.end(), e.beat);
    if (it == numbers.end() || *it != e.beat) {
      throw ParseError(fmt::format("gemrem stream: escape for beat {} outside the decoded signal", e.beat));
    }
    const auto [lo, hi] = span_range(layout[static_cast<std::size_t>(it - numbers.begin())], n);
    if (hi - lo != e.samples.size()) {
      throw ParseError(fmt::format("gemrem stream: escape for beat {} has {} samples, span needs {}", e.beat,
                                   e.samples.size(), hi - lo));
    }
    std::copy(e.samples.begin(), e.samples.end(), out.begin() + static_cast<std::ptrdiff_t>(lo));
  }
  return {SampledSignal(std::move(out), fs), std::move(peaks), rec.mac_count};
}

SampledSignal gemrem_decode(const GemremStream& stream, std::size_t n, double fs) {
  return gemrem_decode_full(stream, n, fs).signal;
}

std::uint64_t gemrem_header_bits(const GemremStream& stream, const GemremBits& bits) {
  // Template parameters plus reference_rr and fit_residual, then fs, first_peak, beats.
  const std::uint64_t params = 3 * stream.header.waves.size() + 2;
  return bits.param_bits * (params + 3);
}

std::uint64_t gemrem_payload_bits(const GemremStream& stream, const GemremBits& bits) {
  std::uint64_t total = bits.opcode_bits * stream.beats + bits.rr_update_bits * stream.updates.size();
  for (const auto& e : stream.escapes) total += bits.bits_per_sample * e.samples.size();
  return total;
}

GemremRatio gemrem_compression_ratio(const GemremStream& stream, std::size_t n, const GemremBits& bits) {
  const auto payload = gemrem_payload_bits(stream, bits);
  GemremRatio r;
  r.with_header = compression_ratio(n, bits.bits_per_sample, payload + gemrem_header_bits(stream, bits));
  r.without_header = payload == 0 ? std::numeric_limits<double>::infinity()
                                  : compression_ratio(n, bits.bits_per_sample, payload);
  return r;
}

std::string format_gemrem(const GemremStream& s) {
  s.header.validate();
  fmt::memory_buffer buf;
  auto it = std::back_inserter(buf);
  fmt::format_to(it, "H {:.17g} {} {} {:.17g} {:.17g} {}", s.fs, s.first_peak, s.beats, s.header.reference_rr,
                 s.header.fit_residual, s.header.waves.size());
  for (const auto& w : s.header.waves) {
    fmt::format_to(it, " {:.17g} {:.17g} {:.17g}", w.amplitude, w.center, w.width);
  }
  fmt::format_to(it, "\n");
  for (const auto& u : s.updates) fmt::format_to(it, "U {} {:.17g}\n", u.beat, u.rr);
  for (const auto& e : s.escapes) {
    fmt::format_to(it, "E {}", e.beat);
    for (double v : e.samples) fmt::format_to(it, " {:.17g}", v);
    fmt::format_to(it, "\n");
  }
  return fmt::to_string(buf);
}

GemremStream parse_gemrem(const std::string& text) {
  using detail::parse_double;
  using detail::parse_uint;
  const auto ls = detail::lines(text, true);
  if (ls.empty()) throw ParseError("gemrem stream: empty");

  GemremStream s;
  const auto h = detail::tokens(ls[0]);
  if (h.size() < 7 || h[0] != "H") throw ParseError("gemrem stream: first record must be a header");
  s.fs = parse_double(h[1], "gemrem header fs");
  s.first_peak = parse_uint(h[2], "gemrem header first_peak");
  s.beats = parse_uint(h[3], "gemrem header beats");
  s.header.reference_rr = parse_double(h[4], "gemrem header reference_rr");
  s.header.fit_residual = parse_double(h[5], "gemrem header fit_residual");
  const auto g = parse_uint(h[6], "gemrem header wave count");
  if (h.size() != 7 + 3 * g) {
    throw ParseError(fmt::format("gemrem stream: header declares {} waves but has {} fields", g, h.size()));
  }
  for (std::size_t k = 0; k < g; ++k) {
    s.header.waves.push_back({parse_double(h[7 + 3 * k], "gemrem wave"), parse_double(h[8 + 3 * k], "gemrem wave"),
                              parse_double(h[9 + 3 * k], "gemrem wave")});
  }
  if (!(s.fs > 0.0) || !std::isfinite(s.fs)) throw ParseError("gemrem stream: fs must be positive");
  try {
    s.header.validate();
  } catch (const ValidationError& e) {
    throw ParseError(std::string("gemrem stream: ") + e.what());
  }

  for (std::size_t l = 1; l < ls.size(); ++l) {
    const auto t = detail::tokens(ls[l]);
    if (t.empty()) continue;
    if (t[0] == "H") throw ParseError("gemrem stream: more than one header");
    if (t[0] == "U") {
      if (t.size() != 3) throw ParseError(fmt::format("gemrem stream line {}: U needs beat and rr", l + 1));
      GemremUpdate u{parse_uint(t[1], "gemrem update beat"), parse_double(t[2], "gemrem update rr")};
      if (u.beat == 0 || u.beat >= s.beats) {
        throw ParseError(fmt::format("gemrem stream line {}: update beat {} out of range", l + 1, u.beat));
      }
      if (!(u.rr > 0.0) || !std::isfinite(u.rr)) {
        throw ParseError(fmt::format("gemrem stream line {}: rr must be positive", l + 1));
      }
      if (!s.updates.empty() && u.beat <= s.updates.back().beat) {
        throw ParseError(fmt::format("gemrem stream line {}: updates not sorted by beat", l + 1));
      }
      s.updates.push_back(u);
    } else if (t[0] == "E") {
      if (t.size() < 3) throw ParseError(fmt::format("gemrem stream line {}: E needs beat and samples", l + 1));
      GemremEscape e{parse_uint(t[1], "gemrem escape beat"), {}};
      if (e.beat >= s.beats) {
        throw ParseError(fmt::format("gemrem stream line {}: escape beat {} out of range", l + 1, e.beat));
      }
      if (!s.escapes.empty() && e.beat <= s.escapes.back().beat) {
        throw ParseError(fmt::format("gemrem stream line {}: escapes not sorted by beat", l + 1));
      }
      for (std::size_t k = 2; k < t.size(); ++k) {
        const double v = parse_double(t[k], "gemrem escape sample");
        if (!std::isfinite(v)) throw ParseError("gemrem stream: non-finite escape sample");
        e.samples.push_back(v);
      }
      s.escapes.push_back(std::move(e));
    } else {
      throw ParseError(fmt::format("gemrem stream line {}: unknown record '{}'", l + 1, t[0]));
    }
  }
  return s;
}

void write_gemrem(const std::string& path, const GemremStream& stream) {
  write_text_file(path, format_gemrem(stream));
}

GemremStream read_gemrem(const std::string& path) { return parse_gemrem(read_text_file(path)); }

}  // namespace gencs
