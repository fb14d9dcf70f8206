// SPDX-License-Identifier: Apache-2.0
#include "offsim/phy_bitrate.hpp"

#include <random>

#include <gtest/gtest.h>

#include "offsim/errors.hpp"
#include "offsim/profiles.hpp"

namespace offsim {
namespace {

TEST(LinkBitrate, Examples) {
  EXPECT_NEAR(link_bitrate({106, 12, 6, 28000, 0.754}), 161126784.0, 1e-3);
  EXPECT_EQ(link_bitrate({0, 12, 6, 28000, 0.754}), 0.0);
  EXPECT_EQ(link_bitrate({1, 1, 1, 1, 1.0}), 1.0);
}

TEST(LinkBitrate, RejectsBadInputs) {
  EXPECT_THROW(link_bitrate({-1, 12, 6, 28000, 0.5}), ValidationError);
  EXPECT_THROW(link_bitrate({1, 12, 6, -3, 0.5}), ValidationError);
  EXPECT_THROW(link_bitrate({1, 12, 6, 1, 0.0}), ValidationError);
  EXPECT_THROW(link_bitrate({1, 12, 6, 1, 1.5}), ValidationError);
}

TEST(LinkBitrate, LinearInEachParameter) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 100.0);
  std::uniform_real_distribution<double> rate(0.05, 0.5);
  for (int i = 0; i < 200; ++i) {
    const PhyConfig base{u(rng), u(rng), u(rng), u(rng), rate(rng)};
    const double k = 1.0 + u(rng) / 100.0;  // keeps code_rate*k within (0, 1]
    const double b = link_bitrate(base);
    for (int field = 0; field < 5; ++field) {
      PhyConfig c = base;
      double* f[] = {&c.n_rb, &c.n_sub, &c.n_bits, &c.n_sym, &c.code_rate};
      *f[field] *= k;
      EXPECT_NEAR(link_bitrate(c) / b, k, 1e-12 * k) << field;
    }
  }
}

TEST(CheckAgainstPeak, WarnsOnlyAbovePeak) {
  const auto& net = default_profile().network;
  EXPECT_TRUE(check_against_peak(net, 161126784.0).empty());
  const auto warnings = check_against_peak(net, 10e6);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("b_ul"), std::string::npos);
  EXPECT_EQ(check_against_peak(net, 1e6).size(), 2u);
}

}  // namespace
}  // namespace offsim
