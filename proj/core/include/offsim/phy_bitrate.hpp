// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "offsim/profiles.hpp"

namespace offsim {

/// Physical-layer parameters of one link direction.
struct PhyConfig {
  double n_rb = 0.0;       // resource blocks in use
  double n_sub = 12.0;     // subcarriers per resource block
  double n_bits = 0.0;     // bits per modulation symbol (6 for 64QAM)
  /// Modulation symbols per subcarrier per second, e.g. 14 symbols/slot times
  /// 2000 slots/s for 30 kHz subcarrier spacing.
  double n_sym = 0.0;
  double code_rate = 1.0;  // (0, 1]

  /// Throws ValidationError on negative counts or a code rate outside (0, 1].
  void validate() const;
};

/// Peak link bitrate in bit/s: n_rb * n_sub * n_bits * n_sym * code_rate.
double link_bitrate(const PhyConfig& cfg);

/// Warnings for configured bitrates above the PHY peak (they cannot be
/// reached on that link).
std::vector<std::string> check_against_peak(const NetworkProfile& network, double peak_bps);

}  // namespace offsim
