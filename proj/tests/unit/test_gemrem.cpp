#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "gencs/error.hpp"
#include "gencs/gemrem.hpp"
#include "gencs/metrics.hpp"
#include "gencs/synth.hpp"

using gencs::GemremOptions;

namespace {

gencs::SyntheticEcg model_exact(double seconds, double hr, double jitter, std::uint64_t seed = 1) {
  gencs::SyntheticEcgSpec spec;
  spec.duration = seconds;
  spec.mean_hr = hr;
  spec.hr_jitter = jitter;
  spec.seed = seed;
  return gencs::synthesize_ecg(spec);
}

// Peaks for an HR ramp 60 -> 90 bpm over the record.
gencs::GroundTruth ramp_peaks(double seconds) {
  std::vector<std::size_t> p{100};
  while (true) {
    const double t = static_cast<double>(p.back()) / 200.0;
    const double hr = 60.0 + 30.0 * std::min(1.0, t / seconds);
    const auto next = p.back() + static_cast<std::size_t>(std::llround(60.0 / hr * 200.0));
    if (next >= static_cast<std::size_t>(seconds * 200.0)) break;
    p.push_back(next);
  }
  return gencs::GroundTruth(p, 200.0);
}

// Simple predictor: update whenever the RR leaves the tolerance band around
// the last transmitted value.
std::size_t simple_predictor_updates(const gencs::GroundTruth& peaks, double ref_rr, double tol) {
  double pred = ref_rr;
  std::size_t updates = 0;
  for (double rr : peaks.rr_intervals()) {
    if (std::abs(rr - pred) > tol * pred) {
      pred = rr;
      ++updates;
    }
  }
  return updates;
}

}  // namespace

TEST(Gemrem, ConstantHrIsHeaderOnly) {
  const auto ecg = model_exact(60, 60, 0.0);
  const auto s = gencs::gemrem_encode(ecg.signal, gencs::default_template());
  EXPECT_EQ(s.beats, ecg.truth.size());
  EXPECT_TRUE(s.updates.empty());
  EXPECT_TRUE(s.escapes.empty());
  const auto cr = gencs::gemrem_compression_ratio(s, ecg.signal.size());
  EXPECT_GE(cr.with_header, 30.0);
  EXPECT_GT(cr.without_header, cr.with_header);
}

TEST(Gemrem, HrRampUpdatesBounded) {
  const auto peaks = ramp_peaks(60.0);
  const auto tmpl = gencs::default_template();
  const auto sig = gencs::reconstruct(tmpl, peaks, 12000, 200.0).signal;
  const auto s = gencs::gemrem_encode(sig, tmpl, GemremOptions{});
  EXPECT_LE(s.updates.size(), s.beats);
  EXPECT_LE(s.updates.size(), simple_predictor_updates(peaks, 1.0, 0.02));
  EXPECT_EQ(s.escapes.size(), 0U);
  EXPECT_EQ(s.beats, peaks.size());
}

TEST(Gemrem, SquareArtifactEscapesOneBeat) {
  auto ecg = model_exact(30, 60, 0.02, 4);
  auto v = ecg.signal.values();
  const auto p = ecg.truth.r_peaks()[12];
  // 0.5 mV for 100 ms on the T wave of beat 12, well inside its span
  for (std::size_t j = p + 30; j < p + 50; ++j) v[j] += 0.5;
  const gencs::SampledSignal corrupted(v, 200.0);
  const auto s = gencs::gemrem_encode(corrupted, gencs::default_template());
  ASSERT_EQ(s.escapes.size(), 1U);
  EXPECT_EQ(s.escapes[0].beat, 12U);
}

TEST(Gemrem, RoundTripConstantHrWithinOneSample) {
  for (double hr : {48.0, 72.0, 110.0}) {
    const auto ecg = model_exact(60, hr, 0.0);
    const auto s = gencs::gemrem_encode(ecg.signal, gencs::default_template());
    const auto d = gencs::gemrem_decode_full(s, ecg.signal.size(), 200.0);
    ASSERT_EQ(d.peaks.size(), ecg.truth.size()) << hr;
    for (std::size_t k = 0; k < d.peaks.size(); ++k) {
      EXPECT_LE(std::abs(static_cast<long>(d.peaks.r_peaks()[k]) - static_cast<long>(ecg.truth.r_peaks()[k])), 1);
    }
  }
}

// Jitter inside hr_tol is accepted without an update, so decoded peaks drift
// within a run. Detection holds; each accepted RR is off by at most hr_tol of
// the prediction, which bounds the RR error.
TEST(Gemrem, RoundTripJitteredMeetsFidelity) {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto ecg = model_exact(60, 72, 0.02, seed);
    const auto s = gencs::gemrem_encode(ecg.signal, gencs::default_template());
    const auto d = gencs::gemrem_decode_full(s, ecg.signal.size(), 200.0);
    const auto m = gencs::rpeak_f1(d.peaks, ecg.truth, 0.05);
    EXPECT_GE(m.f1, 0.95) << seed;
    EXPECT_LE(m.rr_rmse, 0.02 * 60.0 / 72.0) << seed;
  }
}

TEST(Gemrem, HeaderOnlyDecodesAtReferenceRr) {
  gencs::GemremStream s;
  s.header = gencs::default_template();
  s.header.reference_rr = 0.8;
  s.first_peak = 50;
  s.beats = 12;
  const auto d = gencs::gemrem_decode_full(s, 2000, 200.0);
  ASSERT_EQ(d.peaks.size(), 12U);
  for (std::size_t k = 0; k < 12; ++k) EXPECT_EQ(d.peaks.r_peaks()[k], 50 + 160 * k);
}

TEST(Gemrem, EscapeSamplesSplicedVerbatim) {
  auto ecg = model_exact(20, 60, 0.0);
  auto v = ecg.signal.values();
  const auto p = ecg.truth.r_peaks()[5];
  for (std::size_t j = p - 60; j < p - 30; ++j) v[j] -= 0.4;
  const gencs::SampledSignal corrupted(v, 200.0);
  const auto s = gencs::gemrem_encode(corrupted, gencs::default_template(), ecg.truth);
  ASSERT_EQ(s.escapes.size(), 1U);
  const auto out = gencs::gemrem_decode(s, v.size(), 200.0);
  // beat 5 owns the samples between the midpoints to its neighbours
  const std::size_t lo = p - 100, hi = p + 100;
  ASSERT_EQ(s.escapes[0].samples.size(), hi - lo);
  for (std::size_t j = lo; j < hi; ++j) EXPECT_EQ(out[j], s.escapes[0].samples[j - lo]);
  for (std::size_t j = lo; j < hi; ++j) EXPECT_EQ(out[j], v[j]);
}

TEST(Gemrem, StreamFileRoundTrip) {
  auto ecg = model_exact(30, 66, 0.05, 9);
  auto v = ecg.signal.values();
  for (std::size_t j = 2000; j < 2030; ++j) v[j] += 0.6;
  const auto s = gencs::gemrem_encode(gencs::SampledSignal(v, 200.0), gencs::default_template());
  const auto text = gencs::format_gemrem(s);
  EXPECT_EQ(text.substr(0, 2), "H ");
  EXPECT_EQ(gencs::parse_gemrem(text), s);
  const auto path = (std::filesystem::temp_directory_path() / "gencs_test_stream.txt").string();
  gencs::write_gemrem(path, s);
  EXPECT_EQ(gencs::read_gemrem(path), s);
  std::filesystem::remove(path);
}

TEST(Gemrem, MalformedStreams) {
  EXPECT_THROW(gencs::parse_gemrem(""), gencs::ParseError);
  EXPECT_THROW(gencs::parse_gemrem("U 1 0.8\n"), gencs::ParseError);
  const std::string h = "H 200 100 10 1 0 1 1 0 0.06\n";
  EXPECT_NO_THROW(gencs::parse_gemrem(h));
  EXPECT_THROW(gencs::parse_gemrem(h + "U 3 0.8\nU 2 0.9\n"), gencs::ParseError);
  EXPECT_THROW(gencs::parse_gemrem(h + "U 30 0.8\n"), gencs::ParseError);
  EXPECT_THROW(gencs::parse_gemrem(h + "X 1\n"), gencs::ParseError);
  EXPECT_THROW(gencs::parse_gemrem("H 200 100 10 1 0 2 1 0 0.06\n"), gencs::ParseError);
  // escape of the wrong length is caught at decode time
  auto s = gencs::parse_gemrem(h + "E 2 0.1 0.2\n");
  EXPECT_THROW(gencs::gemrem_decode(s, 3000, 200.0), gencs::ParseError);
}

TEST(Gemrem, InvalidTemplateOrOptions) {
  const auto ecg = model_exact(10, 60, 0.0);
  gencs::BeatTemplate empty;
  EXPECT_THROW(gencs::gemrem_encode(ecg.signal, empty), gencs::ValidationError);
  GemremOptions o;
  o.hr_tol = -0.1;
  EXPECT_THROW(gencs::gemrem_encode(ecg.signal, gencs::default_template(), o), gencs::ValidationError);
}

TEST(Gemrem, BitAccounting) {
  gencs::GemremStream s;
  s.header = gencs::default_template();
  s.beats = 10;
  s.updates = {{3, 0.9}, {7, 1.1}};
  s.escapes = {{5, std::vector<double>(150, 0.0)}};
  EXPECT_EQ(gencs::gemrem_header_bits(s), 32U * (15 + 2 + 3));
  EXPECT_EQ(gencs::gemrem_payload_bits(s), 2U * 10 + 16U * 2 + 12U * 150);
  const auto r = gencs::gemrem_compression_ratio(s, 2000);
  EXPECT_DOUBLE_EQ(r.with_header, 24000.0 / (640.0 + 1852.0));
  EXPECT_DOUBLE_EQ(r.without_header, 24000.0 / 1852.0);
}
