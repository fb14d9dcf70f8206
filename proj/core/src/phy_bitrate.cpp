// SPDX-License-Identifier: Apache-2.0
#include "offsim/phy_bitrate.hpp"

#include <cmath>

#include <fmt/format.h>

#include "offsim/errors.hpp"

namespace offsim {

void PhyConfig::validate() const {
  auto count = [](double v, const char* field) {
    if (!std::isfinite(v) || v < 0.0) throw ValidationError(field, fmt::format("must be >= 0 (got {})", v));
  };
  count(n_rb, "n_rb");
  count(n_sub, "n_sub");
  count(n_bits, "n_bits");
  count(n_sym, "n_sym");
  if (!(code_rate > 0.0 && code_rate <= 1.0)) {
    throw ValidationError("code_rate", fmt::format("must lie in (0, 1] (got {})", code_rate));
  }
}

double link_bitrate(const PhyConfig& cfg) {
  cfg.validate();
  return cfg.n_rb * cfg.n_sub * cfg.n_bits * cfg.n_sym * cfg.code_rate;
}

std::vector<std::string> check_against_peak(const NetworkProfile& network, double peak_bps) {
  std::vector<std::string> warnings;
  auto check = [&](double bps, const char* name) {
    if (bps > peak_bps) {
      warnings.push_back(fmt::format("configured {} of {:.3f} Mbps exceeds the PHY peak of {:.3f} Mbps", name,
                                     bps / 1e6, peak_bps / 1e6));
    }
  };
  check(network.b_ul_bps(), "b_ul");
  check(network.b_dl_bps(), "b_dl");
  return warnings;
}

}  // namespace offsim
