#include <gtest/gtest.h>

#include "gencs/error.hpp"
#include "gencs/metrics.hpp"
#include "gencs/pipeline.hpp"
#include "gencs/synth.hpp"

using gencs::CsConfig;
using gencs::Method;

namespace {

gencs::SyntheticEcg clean(double seconds, std::uint64_t seed = 1, double jitter = 0.05) {
  gencs::SyntheticEcgSpec spec;
  spec.duration = seconds;
  spec.hr_jitter = jitter;
  spec.seed = seed;
  return gencs::synthesize_ecg(spec);
}

}  // namespace

TEST(CsConfig, SupportCaps) {
  CsConfig c;
  EXPECT_EQ(c.measurements(), 50U);
  EXPECT_EQ(c.support_cap(Method::kGenCs, 1.0), 8U);
  EXPECT_EQ(c.support_cap(Method::kGenCs, 0.7), 12U);
  EXPECT_EQ(c.support_cap(Method::kPlainCs, 1.0), 12U);
  c.max_support = 5;
  EXPECT_EQ(c.support_cap(Method::kGenCs, 1.0), 5U);
}

TEST(CsConfig, InfeasiblePointsRejectedBeforeWork) {
  CsConfig c;
  c.cr = 60;  // m = 7 < 8
  EXPECT_THROW(c.check(Method::kGenCs, 1.0), gencs::ValidationError);
  c.cr = 1000;
  EXPECT_THROW(c.check(Method::kPlainCs, 1.0), gencs::ValidationError);
  c.cr = 0.5;
  EXPECT_THROW(c.check(Method::kPlainCs, 1.0), gencs::ValidationError);
  const auto ecg = clean(10);
  c.cr = 60;
  EXPECT_THROW(gencs::gencs_pipeline(ecg.signal, gencs::default_template(), c), gencs::ValidationError);
}

TEST(SplitFrames, PadsLastFrame) {
  const gencs::SampledSignal x(std::vector<double>(1000, 1.0), 200.0);
  const auto f = gencs::split_frames(x, 400);
  ASSERT_EQ(f.size(), 3U);
  EXPECT_EQ(f[2][199], 1.0);
  EXPECT_EQ(f[2][200], 0.0);
}

TEST(Gencs, Cr8Clean) {
  const auto ecg = clean(30, 3);
  const auto r = gencs::gencs_pipeline(ecg.signal, gencs::default_template(), CsConfig{});
  const auto m = gencs::rpeak_f1(r.peaks, ecg.truth, 0.05);
  EXPECT_GE(m.f1, 0.95);
  EXPECT_LE(m.rr_rmse, 0.010);
  EXPECT_EQ(r.m, 50U);
  EXPECT_EQ(r.frames.size(), 15U);
  EXPECT_EQ(r.transmitted_bits, 15U * 50U * 24U);
  EXPECT_EQ(r.signal.size(), ecg.signal.size());
}

TEST(Gencs, FullInformation) {
  const auto ecg = clean(30, 4);
  CsConfig c;
  c.cr = 1.0;
  const auto r = gencs::gencs_pipeline(ecg.signal, gencs::default_template(), c);
  EXPECT_GE(gencs::rpeak_f1(r.peaks, ecg.truth, 0.05).f1, 0.99);
}

TEST(Gencs, CompressThenRecoverMatchesPipeline) {
  const auto ecg = clean(12, 5);
  const auto tmpl = gencs::default_template();
  const CsConfig c;
  const auto frames = gencs::compress(ecg.signal, Method::kGenCs, c, tmpl.reference_rr);
  const auto split = gencs::recover_gencs(frames, tmpl, ecg.signal.size(), c);
  const auto whole = gencs::gencs_pipeline(ecg.signal, tmpl, c);
  EXPECT_EQ(split.signal, whole.signal);
  EXPECT_EQ(split.mac_count, whole.mac_count);
}

TEST(Gencs, RecoveryMacsAreRecoverySideOnly) {
  const auto ecg = clean(10, 6);
  const auto r = gencs::gencs_pipeline(ecg.signal, gencs::default_template(), CsConfig{});
  std::uint64_t frame_macs = 0;
  for (const auto& f : r.frames) frame_macs += f.mac_count;
  EXPECT_GT(r.mac_count, frame_macs);  // plus template rendering
  EXPECT_GT(r.sensing_macs, 0U);
}

TEST(PlainCs, Cr2Prd) {
  const auto ecg = clean(10, 7);
  CsConfig c;
  c.cr = 2.0;
  const auto r = gencs::plain_cs_pipeline(ecg.signal, c);
  EXPECT_LE(gencs::prd(ecg.signal, r.signal), 30.0);
  EXPECT_EQ(r.component, r.signal);
}

TEST(PlainCs, RejectsDimensionMismatch) {
  std::vector<gencs::MeasurementVector> frames{{std::vector<double>(50, 0.0), 0}, {std::vector<double>(49, 0.0), 1}};
  EXPECT_THROW(gencs::recover_plain(frames, 800, CsConfig{}), gencs::DimensionError);
}

TEST(Method, Names) {
  for (auto m : {Method::kPlainCs, Method::kGemrem, Method::kGenCs}) EXPECT_EQ(gencs::parse_method(gencs::to_string(m)), m);
  EXPECT_THROW(gencs::parse_method("cs"), gencs::ValidationError);
}
