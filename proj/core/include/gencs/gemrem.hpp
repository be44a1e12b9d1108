#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gencs/beat_model.hpp"
#include "gencs/qrs_filter.hpp"
#include "gencs/signal.hpp"

namespace gencs {

// Bit accounting for the GeMREM stream.
struct GemremBits {
  std::uint64_t bits_per_sample = 12;  // raw samples and escaped samples
  std::uint64_t param_bits = 32;       // each header field and template parameter
  std::uint64_t rr_update_bits = 16;   // RR in 1/16-sample units
  std::uint64_t opcode_bits = 2;       // per beat: keep / update / escape
};

struct GemremOptions {
  double hr_tol = 0.02;     // fraction of the predicted RR
  double morph_tol = 0.05;  // mV RMS over one beat
  FilterVariant variant = FilterVariant::kCanonical;
  DetectorConfig detector{};
  GemremBits bits{};
};

struct GemremUpdate {
  std::size_t beat = 0;
  double rr = 0.0;  // s; the predicted RR from this beat onwards

  bool operator==(const GemremUpdate&) const = default;
};

struct GemremEscape {
  std::size_t beat = 0;
  std::vector<double> samples;  // raw samples covering the beat's decoded span

  bool operator==(const GemremEscape&) const = default;
};

struct GemremStream {
  BeatTemplate header;
  double fs = kCanonicalFs;
  std::size_t first_peak = 0;
  std::size_t beats = 0;
  std::vector<GemremUpdate> updates;  // sorted by beat
  std::vector<GemremEscape> escapes;  // sorted by beat

  bool operator==(const GemremStream&) const = default;
};

// Per-beat transmission decisions.
//
// Timing: the decoder predicts each RR from the last update (initially the
// template's reference RR). Beats are grouped greedily into the longest runs
// whose true RRs all lie within hr_tol of one common value; each run after the
// first opens with one update whose value re-anchors the decoder on the run's
// last true peak. The grouping depends only on the true RRs, so a looser hr_tol
// never needs more updates.
//
// Morphology: a beat is escaped when its RMS difference from the template
// rendered at its true timing exceeds morph_tol.
GemremStream gemrem_encode(const SampledSignal& sig, const BeatTemplate& tmpl, const GemremOptions& options = {});

// Same, with the beat positions supplied instead of detected.
GemremStream gemrem_encode(const SampledSignal& sig, const BeatTemplate& tmpl, const GroundTruth& peaks,
                           const GemremOptions& options = {});

// Peak positions the decoder derives from the stream, clipped to [0, n).
GroundTruth gemrem_decoded_peaks(const GemremStream& stream, std::size_t n);

struct GemremDecoded {
  SampledSignal signal;
  GroundTruth peaks;
  std::uint64_t mac_count = 0;
};

GemremDecoded gemrem_decode_full(const GemremStream& stream, std::size_t n, double fs);
SampledSignal gemrem_decode(const GemremStream& stream, std::size_t n, double fs);

std::uint64_t gemrem_header_bits(const GemremStream& stream, const GemremBits& bits = {});
std::uint64_t gemrem_payload_bits(const GemremStream& stream, const GemremBits& bits = {});

struct GemremRatio {
  double with_header = 0.0;
  double without_header = 0.0;
};
GemremRatio gemrem_compression_ratio(const GemremStream& stream, std::size_t n, const GemremBits& bits = {});

// Line-oriented stream file: `H fs first_peak beats reference_rr fit_residual
// waves a0 c0 w0 ...`, then `U beat rr_s` and `E beat s0 s1 ...` records.
std::string format_gemrem(const GemremStream& stream);
GemremStream parse_gemrem(const std::string& text);
void write_gemrem(const std::string& path, const GemremStream& stream);
GemremStream read_gemrem(const std::string& path);

}  // namespace gencs
