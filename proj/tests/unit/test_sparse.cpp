#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gencs/error.hpp"
#include "gencs/omp.hpp"
#include "gencs/sensing.hpp"
#include "gencs/wavelet.hpp"
#include "oracles.hpp"

using gencs::WaveletBasis;
using gencs::WaveletFamily;

TEST(Wavelet, HaarTwoPoint) {
  const auto w = gencs::dwt_matrix({WaveletFamily::kHaar, 1, 2});
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(w(0, 0), r, 1e-15);
  EXPECT_NEAR(w(1, 0), r, 1e-15);
  EXPECT_NEAR(w(0, 1), r, 1e-15);
  EXPECT_NEAR(w(1, 1), -r, 1e-15);
}

TEST(Wavelet, Validation) {
  EXPECT_THROW((WaveletBasis{WaveletFamily::kHaar, 1, 400}.validate()), gencs::ValidationError);
  EXPECT_THROW((WaveletBasis{WaveletFamily::kDaubechies4, 10, 512}.validate()), gencs::ValidationError);
  EXPECT_NO_THROW((WaveletBasis{WaveletFamily::kDaubechies4, 9, 512}.validate()));
  EXPECT_THROW(gencs::parse_wavelet_family("sym8"), gencs::ValidationError);
  EXPECT_EQ(gencs::next_power_of_two(400), 512U);
  EXPECT_EQ(gencs::next_power_of_two(512), 512U);
}

TEST(Wavelet, OrthonormalSynthesis) {
  for (auto basis : {WaveletBasis{WaveletFamily::kDaubechies4, 5, 512}, WaveletBasis{WaveletFamily::kHaar, 9, 512},
                     WaveletBasis{WaveletFamily::kDaubechies4, 3, 64}, WaveletBasis{WaveletFamily::kHaar, 0, 16}}) {
    const auto w = gencs::dwt_matrix(basis);
    const Eigen::MatrixXd g = w.transpose() * w;
    EXPECT_LT((g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Wavelet, TransformMatchesMatrix) {
  const WaveletBasis basis{WaveletFamily::kDaubechies4, 4, 128};
  std::mt19937_64 rng(3);
  const auto x = oracle::random_vector(rng, 128);
  const auto c = gencs::dwt(basis, x);
  const auto w = gencs::dwt_matrix(basis);
  EXPECT_LT(oracle::max_abs_diff(c, oracle::matvec(w.transpose(), x)), 1e-10);
  EXPECT_LT(oracle::max_abs_diff(gencs::idwt(basis, c), x), 1e-10);
}

TEST(Omp, ZeroMeasurements) {
  const auto phi = gencs::bernoulli_matrix(32, 64, 1);
  const auto sol = gencs::omp(phi.entries, std::vector<double>(32, 0.0), {8, 0.01});
  EXPECT_TRUE(sol.support.empty());
  EXPECT_EQ(sol.iterations, 0U);
  for (double c : sol.coefficients) EXPECT_EQ(c, 0.0);
}

TEST(Omp, ThreeSparseSeed3) {
  const auto phi = gencs::bernoulli_matrix(32, 64, 3);
  std::vector<double> s(64, 0.0);
  s[5] = 1.0;
  s[20] = -2.0;
  s[47] = 0.5;
  const auto y = oracle::matvec(phi.entries, s);
  const auto sol = gencs::omp(phi.entries, y, {16, 1e-12});
  auto support = sol.support;
  std::sort(support.begin(), support.end());
  EXPECT_EQ(support, (std::vector<std::size_t>{5, 20, 47}));
  const auto ls = oracle::support_least_squares(phi.entries, y, {5, 20, 47});
  EXPECT_LT(oracle::max_abs_diff(sol.coefficients, ls), 1e-8);
  EXPECT_LT(oracle::max_abs_diff(sol.coefficients, s), 1e-8);
}

TEST(Omp, UnderMeasuredDegradesGracefully) {
  const auto phi = gencs::bernoulli_matrix(20, 64, 12);
  std::mt19937_64 rng(12);
  std::vector<double> s(64, 0.0);
  for (int k = 0; k < 10; ++k) s[rng() % 64] = 1.0 + static_cast<double>(k);
  const auto y = oracle::matvec(phi.entries, s);
  gencs::SparseSolution sol;
  ASSERT_NO_THROW(sol = gencs::omp(phi.entries, y, {20, 0.0}));
  // Whatever was recovered, the reported residual is the true one.
  const auto fit = oracle::matvec(phi.entries, sol.coefficients);
  double r = 0;
  for (std::size_t i = 0; i < y.size(); ++i) r += (y[i] - fit[i]) * (y[i] - fit[i]);
  EXPECT_NEAR(sol.residual_norm, std::sqrt(r), 1e-9);
}

TEST(Omp, StopsAtTolerance) {
  const auto phi = gencs::bernoulli_matrix(40, 80, 2);
  std::vector<double> s(80, 0.0);
  s[3] = 10.0;
  s[50] = 0.01;  // below 1% of ||y||
  const auto y = oracle::matvec(phi.entries, s);
  const auto sol = gencs::omp(phi.entries, y, {10, 0.01});
  EXPECT_EQ(sol.support.size(), 1U);
  EXPECT_EQ(sol.support[0], 3U);
}

TEST(Omp, Errors) {
  const auto phi = gencs::bernoulli_matrix(8, 16, 1);
  Eigen::MatrixXd a = phi.entries;
  a.col(4).setZero();
  EXPECT_THROW(gencs::omp(a, std::vector<double>(8, 1.0), {4, 0.01}), gencs::ValidationError);
  EXPECT_THROW(gencs::omp(phi.entries, std::vector<double>(7, 1.0), {4, 0.01}), gencs::DimensionError);
  EXPECT_THROW(gencs::omp(phi.entries, std::vector<double>(8, 1.0), {9, 0.01}), gencs::ValidationError);
  EXPECT_THROW(gencs::omp(phi.entries, std::vector<double>(8, 1.0), {4, -1.0}), gencs::ValidationError);
}

TEST(Omp, DuplicateColumnFlagsRankDeficiency) {
  Eigen::MatrixXd a = gencs::bernoulli_matrix(12, 24, 6).entries;
  a.col(7) = a.col(2);
  std::vector<double> s(24, 0.0);
  s[2] = 1.0;
  s[9] = 1.0;
  const auto y = oracle::matvec(a, s);
  const auto sol = gencs::omp(a, y, {12, 0.0});
  EXPECT_TRUE(std::isfinite(sol.residual_norm));
  for (double c : sol.coefficients) EXPECT_TRUE(std::isfinite(c));
}

TEST(Omp, MacCountGrowsWithSupport) {
  const auto phi = gencs::bernoulli_matrix(32, 64, 3);
  std::mt19937_64 rng(1);
  const auto y = oracle::random_vector(rng, 32);
  const auto a = gencs::omp(phi.entries, y, {2, 0.0});
  const auto b = gencs::omp(phi.entries, y, {6, 0.0});
  EXPECT_GT(a.mac_count, 0U);
  EXPECT_GT(b.mac_count, a.mac_count);
  EXPECT_EQ(b.residual_history.size(), b.iterations);
}
