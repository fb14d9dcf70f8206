// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstddef>

namespace offsim {

/// Token bucket over an abstract timeline (durations since an arbitrary
/// origin). Holds at most `burst_bytes` of credit and refills at
/// `rate_bps` bits per second; starts full.
///
/// Bytes released by time t never exceed burst_bytes + rate * t / 8.
class TokenBucket {
 public:
  using Duration = std::chrono::nanoseconds;

  TokenBucket(double rate_bps, std::size_t burst_bytes, Duration start = Duration::zero());

  /// Reserves `bytes` (at most burst_bytes) requested at `now` and returns
  /// the earliest time they may be sent. Reservations are served in order.
  Duration reserve(std::size_t bytes, Duration now);

  double rate_bps() const { return rate_bps_; }
  std::size_t burst_bytes() const { return burst_bytes_; }

 private:
  double rate_bps_;
  std::size_t burst_bytes_;
  double tokens_;  // bytes of credit at `last_`
  Duration last_;
};

}  // namespace offsim
