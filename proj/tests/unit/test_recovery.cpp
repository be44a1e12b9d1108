#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gencs/error.hpp"
#include "gencs/metrics.hpp"
#include "gencs/qrs_filter.hpp"
#include "gencs/recovery.hpp"
#include "gencs/sensing.hpp"
#include "gencs/synth.hpp"
#include "oracles.hpp"

using gencs::WaveletBasis;
using gencs::WaveletFamily;

namespace {

const WaveletBasis kTimeAtoms{WaveletFamily::kHaar, 0, 512};
const WaveletBasis kDb4{WaveletFamily::kDaubechies4, 5, 512};

}  // namespace

TEST(TruncatedSynthesis, DropsPaddingOnlyAtoms) {
  const auto w = gencs::truncated_synthesis(kTimeAtoms, 400);
  EXPECT_EQ(w.rows(), 400);
  EXPECT_EQ(w.cols(), 400);
  const auto d = gencs::truncated_synthesis(kDb4, 400);
  EXPECT_EQ(d.rows(), 400);
  EXPECT_LT(d.cols(), 512);
  for (Eigen::Index j = 0; j < d.cols(); ++j) EXPECT_GT(d.col(j).norm(), 1e-9);
}

TEST(RecoverFiltered, ZeroInZeroOut) {
  const auto phi = gencs::bernoulli_matrix(50, 400, 1);
  const auto f = gencs::filter_matrix(400, gencs::FilterVariant::kCanonical, 112);
  const auto r = gencs::recover_filtered({std::vector<double>(50, 0.0), 0}, phi, f, kTimeAtoms, 8, 0.01);
  for (double v : r.signal.values()) EXPECT_EQ(v, 0.0);
}

// One 2 s frame of a continuously filtered clean recording at CR 8.
TEST(RecoverFiltered, CleanFramePeaksWithinTwoSamples) {
  gencs::SyntheticEcgSpec spec;
  spec.duration = 20.0;
  spec.hr_jitter = 0.05;
  spec.seed = 21;
  const auto ecg = gencs::synthesize_ecg(spec);
  const auto phi = gencs::bernoulli_matrix(50, 400, 1);
  const auto blocks = gencs::measure_filtered_stream(phi, ecg.signal);
  const auto f = gencs::filter_matrix(400, gencs::FilterVariant::kCanonical, 112);
  const std::size_t delay = gencs::cascade_group_delay(gencs::FilterVariant::kCanonical);

  for (std::size_t k : {2UL, 5UL, 7UL}) {
    const auto r = gencs::recover_filtered(blocks[k], phi, f, kTimeAtoms, 8, 0.01);
    const auto found = gencs::detect_r_peaks(r.signal);
    std::vector<long> expected;
    for (auto p : ecg.truth.r_peaks()) {
      const auto q = p + delay;
      if (q >= k * 400 && q < (k + 1) * 400) expected.push_back(static_cast<long>(q - k * 400));
    }
    ASSERT_EQ(found.size(), expected.size()) << "frame " << k;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      EXPECT_LE(std::abs(static_cast<long>(found.r_peaks()[i]) - expected[i]), 2) << "frame " << k;
    }
  }
}

TEST(RecoverFiltered, Deterministic) {
  gencs::SyntheticEcgSpec spec;
  spec.noise_std = 0.01;
  const auto ecg = gencs::synthesize_ecg(spec);
  const auto phi = gencs::bernoulli_matrix(50, 400, 9);
  const auto blocks = gencs::measure_filtered_stream(phi, ecg.signal);
  const auto f = gencs::filter_matrix(400, gencs::FilterVariant::kCanonical, 112);
  const auto a = gencs::recover_filtered(blocks[1], phi, f, kTimeAtoms, 8, 0.01);
  const auto b = gencs::recover_filtered(blocks[1], phi, f, kTimeAtoms, 8, 0.01);
  EXPECT_EQ(a.signal, b.signal);
  EXPECT_EQ(a.mac_count, b.mac_count);
}

TEST(RecoverFiltered, DimensionChecks) {
  const auto phi = gencs::bernoulli_matrix(50, 400, 1);
  const auto f = gencs::filter_matrix(400);
  EXPECT_THROW(gencs::recover_filtered({std::vector<double>(49, 0.0), 0}, phi, f, kTimeAtoms, 8, 0.01),
               gencs::DimensionError);
  EXPECT_THROW(gencs::recover_filtered({std::vector<double>(50, 0.0), 0}, phi, gencs::filter_matrix(300), kTimeAtoms,
                                       8, 0.01),
               gencs::DimensionError);
}

TEST(RecoverPlain, ExactlySparseSignal) {
  const auto w = gencs::truncated_synthesis(kDb4, 400);
  std::mt19937_64 rng(4);
  const std::size_t k = 8;
  std::vector<double> s(static_cast<std::size_t>(w.cols()), 0.0);
  for (std::size_t i = 0; i < k; ++i) s[rng() % s.size()] = 1.0 + static_cast<double>(i % 3);
  const auto x = oracle::matvec(w, s);
  const std::size_t m = 2 * k + 40;
  const auto phi = gencs::bernoulli_matrix(m, 400, 4);
  const auto y = gencs::measure(phi, x);
  const auto r = gencs::recover_plain_cs(y, phi, kDb4, m / 2, 1e-12);
  EXPECT_LT(oracle::max_abs_diff(r.signal.values(), x), 1e-6);
}

TEST(RecoverPlain, EcgFrameAtCr2) {
  gencs::SyntheticEcgSpec spec;
  spec.duration = 4.0;
  spec.seed = 2;
  const auto ecg = gencs::synthesize_ecg(spec);
  const auto frame = gencs::window(ecg.signal, 0, 400);
  const auto phi = gencs::bernoulli_matrix(200, 400, 1);
  const auto r = gencs::recover_plain_cs(gencs::measure(phi, frame), phi, kDb4, 50, 0.01);
  EXPECT_LE(gencs::prd(frame, r.signal), 30.0);
}

TEST(RecoverPlain, ZeroMeasurementsZeroSignal) {
  const auto phi = gencs::bernoulli_matrix(100, 400, 1);
  const auto r = gencs::recover_plain_cs({std::vector<double>(100, 0.0), 0}, phi, kDb4, 25, 0.01);
  for (double v : r.signal.values()) EXPECT_EQ(v, 0.0);
}
