// SPDX-License-Identifier: Apache-2.0
#include "offsim/token_bucket.hpp"

#include <algorithm>
#include <cmath>

#include "offsim/errors.hpp"

namespace offsim {

TokenBucket::TokenBucket(double rate_bps, std::size_t burst_bytes, Duration start)
    : rate_bps_(rate_bps), burst_bytes_(burst_bytes), tokens_(static_cast<double>(burst_bytes)), last_(start) {
  if (!(rate_bps > 0.0) || !std::isfinite(rate_bps)) throw DomainError("token bucket rate must be positive");
  if (burst_bytes == 0) throw DomainError("token bucket burst must be at least one byte");
}

TokenBucket::Duration TokenBucket::reserve(std::size_t bytes, Duration now) {
  if (bytes > burst_bytes_) throw DomainError("reservation larger than the bucket");
  const double bytes_per_ns = rate_bps_ / 8.0 / 1e9;

  // Earlier reservations may have pushed `last_` into the future.
  const Duration at = std::max(now, last_);
  tokens_ = std::min(static_cast<double>(burst_bytes_),
                     tokens_ + static_cast<double>((at - last_).count()) * bytes_per_ns);
  last_ = at;

  const double need = static_cast<double>(bytes);
  if (tokens_ >= need) {
    tokens_ -= need;
    return at;
  }
  // Round the wait up so the bound holds at the returned instant.
  const auto wait = Duration(static_cast<Duration::rep>(std::ceil((need - tokens_) / bytes_per_ns)));
  last_ = at + wait;
  tokens_ = 0.0;
  return last_;
}

}  // namespace offsim
