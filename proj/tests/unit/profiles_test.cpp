// SPDX-License-Identifier: Apache-2.0
#include "offsim/profiles.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "offsim/errors.hpp"
#include "support/test_support.hpp"

namespace offsim {
namespace {

TEST(DefaultProfile, TableValues) {
  const SystemProfile& p = default_profile();
  EXPECT_DOUBLE_EQ(p.splits.at(0).d_ul_kb, 1749.8);
  EXPECT_DOUBLE_EQ(p.splits.at(1).segment_demand_gflop, 0.226);
  EXPECT_DOUBLE_EQ(p.compute.c_mec_gflops, 365.94);
  EXPECT_DOUBLE_EQ(p.network.b_ul_mbps, 12.36);
  EXPECT_DOUBLE_EQ(p.network.d_ul_ms, 22.81);
  EXPECT_FALSE(p.splits.at(5).compression_ratio.has_value());
  EXPECT_NO_THROW(p.validate());
}

TEST(DefaultProfile, SegmentIndexingReadsPreviousRow) {
  const SystemProfile& p = default_profile();
  const double expected[] = {0.145, 0.226, 0.358, 0.311, 0.080};
  for (int i = 1; i <= 5; ++i) EXPECT_DOUBLE_EQ(p.splits.segment_flop(i), expected[i - 1] * 1e9) << i;
}

TEST(DefaultProfile, AccuracyAndProvenance) {
  const SystemProfile& p = default_profile();
  for (int s = 0; s <= 5; ++s) {
    EXPECT_EQ(p.accuracy.at(1, s), 0.32);
    EXPECT_EQ(p.accuracy.at(5, s), 0.93);
    EXPECT_EQ(p.accuracy.provenance(1, s), Provenance::kMeasured);
    EXPECT_EQ(p.accuracy.provenance(5, s), Provenance::kMeasured);
    EXPECT_EQ(p.accuracy.provenance(3, s), Provenance::kApproximate);
    EXPECT_EQ(p.accuracy.provenance(2, s), Provenance::kInterpolated);
    EXPECT_EQ(p.accuracy.provenance(4, s), Provenance::kInterpolated);
  }
}

TEST(DefaultProfile, ShippedFileMatchesBuiltIn) {
  EXPECT_EQ(load_profile(std::filesystem::path(OFFSIM_DEFAULT_PROFILE)), default_profile());
}

TEST(CompressionRatio, Examples) {
  EXPECT_NEAR(compression_ratio(56.25, 7.03), 8.00, 0.01);
  EXPECT_EQ(compression_ratio(10.10, 10.10), 1.0);
  EXPECT_EQ(compression_ratio(10.0, 2.5), 4.0);
  EXPECT_THROW(compression_ratio(1.0, 0.0), DomainError);
}

TEST(CompressionRatio, StoredRatiosMatchVolumes) {
  const SystemProfile& p = default_profile();
  for (int s : {1, 2, 4}) {
    const auto& e = p.splits.at(s);
    ASSERT_TRUE(e.compressor);
    EXPECT_NEAR(compression_ratio(e.d_orig_kb, e.d_comp_kb) / *e.compression_ratio, 1.0, 0.005) << s;
  }
  // Split 3: the two-decimal volumes give 8.05, 0.66% off the stored 8. The
  // stored ratio lies inside what the rounded volumes admit.
  const auto& e = p.splits.at(3);
  const double lo = (e.d_orig_kb - 0.005) / (e.d_comp_kb + 0.005);
  const double hi = (e.d_orig_kb + 0.005) / (e.d_comp_kb - 0.005);
  EXPECT_GE(*e.compression_ratio, lo);
  EXPECT_LE(*e.compression_ratio, hi);
}

TEST(LoadProfile, OverrideChangesOnlyThatField) {
  SystemProfile p = load_profile(std::nullopt, {{"network.b_ul", "25.0"}});
  EXPECT_EQ(p.network.b_ul_mbps, 25.0);
  p.network.b_ul_mbps = default_profile().network.b_ul_mbps;
  EXPECT_EQ(p, default_profile());
}

TEST(LoadProfile, SplitAndEnumOverrides) {
  const SystemProfile p = load_profile(std::nullopt, {{"splits.2.d_ul", "600"}, {"compute.prep_model", "multiply"}});
  EXPECT_EQ(p.splits.at(2).d_ul_kb, 600.0);
  EXPECT_EQ(p.compute.prep_model, PrepModel::kMultiply);
}

TEST(LoadProfile, ZeroBitrateNamesField) {
  try {
    parse_profile("[network]\nb_ul = 0\n");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "network.b_ul");
  }
}

TEST(LoadProfile, UnknownKeysRejected) {
  EXPECT_THROW(parse_profile("[network]\nbandwidth = 3\n"), UnknownKeyError);
  EXPECT_THROW(parse_profile("[radio]\nx = 1\n"), UnknownKeyError);
  EXPECT_THROW(load_profile(std::nullopt, {{"network.nope", "1"}}), UnknownKeyError);
}

TEST(LoadProfile, ParseErrorAndMissingFile) {
  EXPECT_THROW(parse_profile("[network\n"), ParseError);
  EXPECT_THROW(load_profile(std::filesystem::path("/nonexistent/offsim.toml")), Error);
  EXPECT_THROW(parse_override("no-equals"), ValidationError);
}

TEST(LoadProfile, PartialFileFallsBack) {
  const SystemProfile p = parse_profile("[power]\np_idle = 1.0\n");
  EXPECT_EQ(p.power.p_idle_w, 1.0);
  EXPECT_EQ(p.network, default_profile().network);
  EXPECT_EQ(p.splits, default_profile().splits);
}

TEST(LoadProfile, AccuracyRowOverrideDropsDefaultFlag) {
  const SystemProfile p = parse_profile("[accuracy]\nexit_2 = 0.7\n");
  EXPECT_EQ(p.accuracy.at(2, 3), 0.7);
  EXPECT_EQ(p.accuracy.provenance(2, 3), Provenance::kMeasured);
}

TEST(LoadProfile, InvariantsEnforced) {
  EXPECT_THROW(parse_profile("[accuracy]\nexit_1 = 1.5\n"), ValidationError);
  EXPECT_THROW(load_profile(std::nullopt, {{"splits.5.d_ul", "3"}}), ValidationError);
  EXPECT_THROW(load_profile(std::nullopt, {{"splits.0.d_comp", "3"}}), ValidationError);
  EXPECT_THROW(load_profile(std::nullopt, {{"compute.c_dev", "-1"}}), ValidationError);
  EXPECT_THROW(load_profile(std::nullopt, {{"topology.num_exits", "4"}}), ValidationError);
}

TEST(LoadProfile, InfiniteKPrepAccepted) {
  const SystemProfile p = load_profile(std::nullopt, {{"compute.k_prep", "inf"}});
  EXPECT_TRUE(std::isinf(p.compute.k_prep));
}

TEST(RoundTrip, DefaultProfile) {
  EXPECT_EQ(parse_profile(serialize_profile(default_profile())), default_profile());
}

TEST(RoundTrip, RandomProfiles) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SystemProfile p = testing::random_profile(seed);
    p.accuracy.set(3, 2, 0.123456789, Provenance::kInterpolated);
    p.compute.prep_volume = seed % 2 ? PrepVolume::kUplink : PrepVolume::kCompressed;
    p.compute.c_gpu_gflops.reset();
    EXPECT_EQ(parse_profile(serialize_profile(p)), p) << "seed " << seed;
  }
}

TEST(ExecutionPlan, OffloadActiveIffSplitBeforeExit) {
  EXPECT_TRUE((ExecutionPlan{5, 0}.offload_active()));
  EXPECT_FALSE((ExecutionPlan{3, 3}.offload_active()));
  EXPECT_FALSE((ExecutionPlan{2, 5}.offload_active()));
}

TEST(ExecutionPlan, RangeMessages) {
  const SystemProfile& p = default_profile();
  try {
    p.validate_plan({6, 0});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("exit out of range 1..5"), std::string::npos);
  }
  EXPECT_THROW(p.validate_plan({1, 6}), ValidationError);
  EXPECT_THROW(p.validate_plan({1, -1}), ValidationError);
}

}  // namespace
}  // namespace offsim
