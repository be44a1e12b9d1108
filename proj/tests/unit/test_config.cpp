#include <cstdlib>
#include <filesystem>

#include <gtest/gtest.h>

#include "gencs/config.hpp"
#include "gencs/error.hpp"
#include "gencs/signal.hpp"

using gencs::KeyValueConfig;

TEST(Config, ParseCommentsAndOverrides) {
  auto kv = KeyValueConfig::parse("# comment\n\ncr = 4\nseed=9\ncr=5\n");
  EXPECT_DOUBLE_EQ(kv.get_double("cr", 0), 5.0);
  EXPECT_EQ(kv.get_uint("seed", 0), 9U);
  kv.set("cr=6");
  EXPECT_DOUBLE_EQ(kv.get_double("cr", 0), 6.0);
  EXPECT_EQ(kv.get_string("wavelet", "x"), "x");
}

TEST(Config, UnknownKeysAndBadValues) {
  EXPECT_THROW(KeyValueConfig::parse("nope = 1\n"), gencs::ParseError);
  EXPECT_THROW(KeyValueConfig::parse("cr 4\n"), gencs::ParseError);
  KeyValueConfig kv;
  EXPECT_THROW(kv.set("nope=1"), gencs::ValidationError);
  EXPECT_THROW(kv.set("cr"), gencs::ValidationError);
  kv.set("cr=abc");
  EXPECT_THROW(kv.get_double("cr", 0), gencs::ValidationError);
  kv.set("record_wall_time=maybe");
  EXPECT_THROW(kv.get_bool("record_wall_time", false), gencs::ValidationError);
}

TEST(Config, TypedConversions) {
  auto kv = KeyValueConfig::parse(
      "methods = gencs, plain_cs\ncr_grid = 2, 4.5\nseeds = 3,4\nwavelet = haar\nwavelet_levels = 3\n"
      "filter_variant = verbatim\nhr_tol = 0.05\nrecord_wall_time = yes\nmac_budget = 5e9\n");
  const auto b = gencs::bench_config_from(kv);
  ASSERT_EQ(b.methods.size(), 2U);
  EXPECT_EQ(b.methods[0], gencs::Method::kGenCs);
  EXPECT_EQ(b.cr_grid, (std::vector<double>{2, 4.5}));
  EXPECT_EQ(b.seeds, (std::vector<std::uint64_t>{3, 4}));
  EXPECT_EQ(b.cs.basis.family, gencs::WaveletFamily::kHaar);
  EXPECT_EQ(b.cs.basis.levels, 3U);
  EXPECT_EQ(b.cs.variant, gencs::FilterVariant::kVerbatim);
  EXPECT_EQ(b.gemrem.variant, gencs::FilterVariant::kVerbatim);
  EXPECT_DOUBLE_EQ(b.gemrem.hr_tol, 0.05);
  EXPECT_TRUE(b.record_wall_time);
  EXPECT_DOUBLE_EQ(gencs::mac_budget_from(kv), 5e9);
}

TEST(Config, DefaultsMatchStructs) {
  const KeyValueConfig kv;
  const auto cs = gencs::cs_config_from(kv);
  EXPECT_EQ(cs.frame, 400U);
  EXPECT_DOUBLE_EQ(cs.cr, 8.0);
  EXPECT_EQ(cs.bits_per_sample, 12U);
  EXPECT_EQ(cs.measurement_bits, 24U);
  const auto g = gencs::gemrem_options_from(kv);
  EXPECT_DOUBLE_EQ(g.hr_tol, 0.02);
  EXPECT_DOUBLE_EQ(g.morph_tol, 0.05);
  EXPECT_EQ(g.bits.param_bits, 32U);
  EXPECT_EQ(g.bits.rr_update_bits, 16U);
  const auto s = gencs::synth_spec_from(kv);
  EXPECT_DOUBLE_EQ(s.mean_hr, 60.0);
}

TEST(Config, InvalidValuesCaughtByValidation) {
  auto kv = KeyValueConfig::parse("wavelet_length = 400\n");
  EXPECT_THROW(gencs::cs_config_from(kv), gencs::ValidationError);
  kv = KeyValueConfig::parse("mean_hr = 10\n");
  EXPECT_THROW(gencs::synth_spec_from(kv), gencs::ValidationError);
  kv = KeyValueConfig::parse("methods = gencs, foo\n");
  EXPECT_THROW(gencs::bench_config_from(kv), gencs::ValidationError);
}

TEST(Config, EnvironmentVariableNamesDefaultFile) {
  const auto path = (std::filesystem::temp_directory_path() / "gencs_test_env.cfg").string();
  gencs::write_text_file(path, "cr = 3\n");
  ::setenv(gencs::kConfigEnvVar, path.c_str(), 1);
  EXPECT_DOUBLE_EQ(KeyValueConfig::load_default(std::nullopt).get_double("cr", 0), 3.0);
  // An explicit path wins.
  const auto other = (std::filesystem::temp_directory_path() / "gencs_test_env2.cfg").string();
  gencs::write_text_file(other, "cr = 7\n");
  EXPECT_DOUBLE_EQ(KeyValueConfig::load_default(other).get_double("cr", 0), 7.0);
  ::unsetenv(gencs::kConfigEnvVar);
  EXPECT_FALSE(KeyValueConfig::load_default(std::nullopt).has("cr"));
  std::filesystem::remove(path);
  std::filesystem::remove(other);
  EXPECT_THROW(KeyValueConfig::load("/nonexistent/x.cfg"), gencs::IoError);
}
