#include <cmath>

#include <gtest/gtest.h>

#include "gencs/bench.hpp"
#include "gencs/error.hpp"
#include "gencs/metrics.hpp"
#include "oracles.hpp"

using gencs::BenchConfig;
using gencs::GroundTruth;
using gencs::Method;

TEST(RpeakF1, IdenticalAndEmpty) {
  const GroundTruth a({100, 300, 500}, 200.0);
  EXPECT_DOUBLE_EQ(gencs::rpeak_f1(a, a, 0.05).f1, 1.0);
  EXPECT_DOUBLE_EQ(gencs::rpeak_f1(GroundTruth({}, 200.0), a, 0.05).f1, 0.0);
  EXPECT_DOUBLE_EQ(gencs::rpeak_f1(a, GroundTruth({}, 200.0), 0.05).f1, 0.0);
  EXPECT_DOUBLE_EQ(gencs::rpeak_f1(GroundTruth({}, 200.0), GroundTruth({}, 200.0), 0.05).f1, 1.0);
}

TEST(RpeakF1, TwoOfThree) {
  const GroundTruth truth({100, 300, 500}, 200.0);
  const GroundTruth det({101, 305, 700}, 200.0);
  const auto m = gencs::rpeak_f1(det, truth, 10.0 / 200.0);
  EXPECT_EQ(oracle::best_matching({101, 305, 700}, {100, 300, 500}, 10), 2U);
  EXPECT_NEAR(m.precision, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(m.recall, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(m.f1, 2.0 / 3.0, 1e-12);
}

TEST(RpeakF1, BadTolerance) {
  const GroundTruth a({1}, 200.0);
  EXPECT_THROW(gencs::rpeak_f1(a, a, 0.0), gencs::ValidationError);
}

TEST(Prd, ClosedForms) {
  std::vector<double> ref{1, -1, 2, -2, 0.5, -0.5};
  EXPECT_DOUBLE_EQ(gencs::prd(ref, ref), 0.0);
  EXPECT_NEAR(gencs::prd(ref, std::vector<double>(6, 0.0)), 100.0, 1e-12);
  double norm = 0;
  for (double v : ref) norm += v * v;
  std::vector<double> off = ref;
  for (auto& v : off) v += 0.3;
  EXPECT_NEAR(gencs::prd(ref, off), 100 * 0.3 * std::sqrt(6.0) / std::sqrt(norm), 1e-12);
  EXPECT_THROW(gencs::prd(std::vector<double>(4, 2.0), std::vector<double>(4, 1.0)), gencs::ValidationError);
  EXPECT_THROW(gencs::prd(ref, std::vector<double>(5, 0.0)), gencs::DimensionError);
}

TEST(CompressionRatio, Arithmetic) {
  EXPECT_DOUBLE_EQ(gencs::compression_ratio(400, 12, 50 * 24), 4.0);
  EXPECT_DOUBLE_EQ(gencs::compression_ratio(400, 12, 400 * 12), 1.0);
  EXPECT_THROW(gencs::compression_ratio(400, 12, 0), gencs::ValidationError);
}

namespace {

BenchConfig tiny(std::vector<Method> methods, std::vector<double> crs, std::vector<std::uint64_t> seeds) {
  BenchConfig c;
  c.methods = std::move(methods);
  c.cr_grid = std::move(crs);
  c.seeds = std::move(seeds);
  c.corpus.duration = 12.0;
  c.corpus.learn_seconds = 10.0;
  c.threads = 2;
  return c;
}

}  // namespace

TEST(Bench, OneRecord) {
  const auto r = gencs::run_bench(tiny({Method::kGenCs}, {8}, {1}));
  ASSERT_EQ(r.size(), 1U);
  EXPECT_EQ(r[0].method, Method::kGenCs);
  EXPECT_EQ(r[0].seed, 1U);
  EXPECT_DOUBLE_EQ(r[0].wall_time, 0.0);
}

TEST(Bench, CsvHeaderAndDeterminism) {
  const auto c = tiny({Method::kGenCs, Method::kPlainCs, Method::kGemrem}, {2, 8}, {1, 2});
  const auto a = gencs::format_bench_csv(gencs::run_bench(c));
  const auto b = gencs::format_bench_csv(gencs::run_bench(c));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.substr(0, a.find('\n')), "method,cr,seed,rpeak_f1,rr_rmse_s,prd_pct,mac_count,transmitted_bits,wall_time_s");
}

TEST(Bench, SortedAndSkipped) {
  const auto r = gencs::run_bench(tiny({Method::kPlainCs, Method::kGenCs}, {8, 2, 1000}, {2, 1}));
  ASSERT_EQ(r.size(), 12U);
  for (std::size_t i = 1; i < r.size(); ++i) {
    const auto ka = std::make_tuple(std::string(gencs::to_string(r[i - 1].method)), r[i - 1].cr, r[i - 1].seed);
    const auto kb = std::make_tuple(std::string(gencs::to_string(r[i].method)), r[i].cr, r[i].seed);
    EXPECT_LT(ka, kb);
  }
  for (const auto& rec : r) {
    if (rec.cr == 1000) {
      EXPECT_TRUE(rec.skipped);
      EXPECT_TRUE(std::isnan(rec.prd));
    } else {
      EXPECT_FALSE(rec.skipped);
    }
  }
}

// For each seed the best GenCS CR at F1 >= 0.95 beats the best plain CS CR at PRD <= 30%.
TEST(Bench, GencsOutreachesPlainPerSeed) {
  const auto c = tiny({Method::kGenCs, Method::kPlainCs}, {2, 4, 8, 12}, {1, 2, 3, 4, 5});
  auto cfg = c;
  cfg.corpus.duration = 30.0;
  const auto r = gencs::run_bench(cfg);
  ASSERT_EQ(r.size(), 40U);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    double best_g = 0, best_p = 0;
    for (const auto& rec : r) {
      if (rec.seed != seed || rec.skipped) continue;
      if (rec.method == Method::kGenCs && rec.rpeak_f1 >= 0.95) best_g = std::max(best_g, rec.cr);
      if (rec.method == Method::kPlainCs && rec.prd <= 30.0) best_p = std::max(best_p, rec.cr);
    }
    EXPECT_GT(best_g, best_p) << "seed " << seed;
  }
}

TEST(Bench, Errors) {
  auto c = tiny({}, {8}, {1});
  EXPECT_THROW(gencs::run_bench(c), gencs::ValidationError);
  c = tiny({Method::kGenCs}, {0.5}, {1});
  EXPECT_THROW(gencs::run_bench(c), gencs::ValidationError);
  c = tiny({Method::kGenCs}, {8}, {});
  EXPECT_THROW(gencs::run_bench(c), gencs::ValidationError);
}

TEST(Lifetime, HalfTheMacsTwiceTheFrames) {
  gencs::BenchRecord g, p;
  g.method = Method::kGenCs;
  p.method = Method::kPlainCs;
  g.cr = p.cr = 4;
  g.frames = p.frames = 10;
  g.mac_count = 1000;
  p.mac_count = 2000;
  g.rpeak_f1 = 1.0;
  p.prd = 10.0;
  const auto rows = gencs::lifetime_proxy({g, p}, 1e6);
  ASSERT_EQ(rows.size(), 2U);
  const auto& rg = rows[0].method == Method::kGenCs ? rows[0] : rows[1];
  const auto& rp = rows[0].method == Method::kGenCs ? rows[1] : rows[0];
  EXPECT_DOUBLE_EQ(rg.frames_per_budget, 2 * rp.frames_per_budget);
  EXPECT_DOUBLE_EQ(rp.fidelity, 0.9);
}

TEST(Lifetime, Errors) {
  EXPECT_THROW(gencs::lifetime_proxy({}, 1e6), gencs::ValidationError);
  gencs::BenchRecord r;
  r.frames = 1;
  r.mac_count = 0;
  EXPECT_THROW(gencs::lifetime_proxy({r}, 1e6), gencs::ValidationError);
}

TEST(Lifetime, PlainCsMonotoneInCr) {
  const auto r = gencs::run_bench(tiny({Method::kPlainCs}, {2, 3, 4, 6, 8}, {1, 2}));
  const auto rows = gencs::lifetime_proxy(r, 1e9);
  ASSERT_EQ(rows.size(), 5U);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_GT(rows[i].cr, rows[i - 1].cr);
    EXPECT_GE(rows[i].frames_per_budget, rows[i - 1].frames_per_budget);
    EXPECT_LE(rows[i].mac_per_frame, rows[i - 1].mac_per_frame);
  }
  const auto csv = gencs::format_lifetime_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "method,cr,frames_per_budget,fidelity");
}
