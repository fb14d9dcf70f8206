// SPDX-License-Identifier: Apache-2.0
#pragma once

// Configuration values are written in the units used by the measurement
// tables (kb, ms, Mbps, GFLOP, GFLOPS, W). Arithmetic happens in SI.
namespace offsim::units {

inline constexpr double kBitsPerKilobit = 1e3;
inline constexpr double kBitsPerSecondPerMbps = 1e6;
inline constexpr double kMsPerSecond = 1e3;
inline constexpr double kFlopPerGflop = 1e9;

constexpr double kilobits_to_bits(double kb) { return kb * kBitsPerKilobit; }
constexpr double mbps_to_bps(double mbps) { return mbps * kBitsPerSecondPerMbps; }
constexpr double ms_to_s(double ms) { return ms / kMsPerSecond; }
constexpr double s_to_ms(double s) { return s * kMsPerSecond; }
constexpr double gflop_to_flop(double g) { return g * kFlopPerGflop; }

}  // namespace offsim::units
