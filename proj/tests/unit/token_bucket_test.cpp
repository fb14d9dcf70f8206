// SPDX-License-Identifier: Apache-2.0
#include "offsim/token_bucket.hpp"

#include <random>

#include <gtest/gtest.h>

#include "offsim/errors.hpp"

namespace offsim {
namespace {

using std::chrono::nanoseconds;

TEST(TokenBucket, StartsFullThenPaces) {
  TokenBucket b(8000.0, 100);  // 1000 bytes/s
  EXPECT_EQ(b.reserve(100, nanoseconds(0)), nanoseconds(0));
  EXPECT_EQ(b.reserve(100, nanoseconds(0)), std::chrono::milliseconds(100));
  EXPECT_EQ(b.reserve(50, std::chrono::milliseconds(100)), std::chrono::milliseconds(150));
}

TEST(TokenBucket, RefillIsCappedAtBurst) {
  TokenBucket b(8000.0, 100);
  b.reserve(100, nanoseconds(0));
  EXPECT_EQ(b.reserve(100, std::chrono::seconds(10)), std::chrono::seconds(10));
  EXPECT_EQ(b.reserve(100, std::chrono::seconds(10)), std::chrono::seconds(10) + std::chrono::milliseconds(100));
}

TEST(TokenBucket, RejectsOversizedReservation) {
  TokenBucket b(8000.0, 100);
  EXPECT_THROW(b.reserve(101, nanoseconds(0)), DomainError);
}

// Over any prefix of a randomized send schedule, bytes released by time t
// stay within burst + rate * t.
TEST(TokenBucket, NeverExceedsRatePlusBurst) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const double rate_bps = std::uniform_real_distribution<double>(1e4, 1e8)(rng);
    const std::size_t burst = std::uniform_int_distribution<std::size_t>(64, 4096)(rng);
    TokenBucket b(rate_bps, burst);
    nanoseconds now{0};
    double released = 0.0;
    for (int i = 0; i < 500; ++i) {
      now += nanoseconds(std::uniform_int_distribution<long>(0, 200000)(rng));
      const std::size_t bytes = std::uniform_int_distribution<std::size_t>(1, burst)(rng);
      const nanoseconds at = b.reserve(bytes, now);
      ASSERT_GE(at, now);
      released += static_cast<double>(bytes);
      const double t = std::chrono::duration<double>(at).count();
      ASSERT_LE(released, static_cast<double>(burst) + rate_bps * t / 8.0 + 1e-6) << trial << "/" << i;
      now = at;
    }
  }
}

}  // namespace
}  // namespace offsim
