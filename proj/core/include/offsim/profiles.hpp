// SPDX-License-Identifier: Apache-2.0
#pragma once

// Domain types describing one device/MEC deployment of a CNN with early exits
// and split points. Fields are stored in configuration units (kb, ms, Mbps,
// GFLOP, GFLOPS, W); the `*_bits()`, `*_s()`, `*_flop()` accessors return SI.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "offsim/units.hpp"

namespace offsim {

struct CnnTopology {
  int num_blocks = 5;
  int num_exits = 5;
  /// Largest split index; split indices run 0..num_splits.
  int num_splits = 5;
  /// Exits normally sit on split points (num_exits == num_splits). When set,
  /// fewer exits than splits are accepted.
  bool allow_unequal_exits = false;

  void validate() const;
  friend bool operator==(const CnnTopology&, const CnnTopology&) = default;
};

struct SplitPointEntry {
  int split_index = 0;
  double d_orig_kb = 0.0;
  double d_comp_kb = 0.0;
  /// Uplink volume including transport overhead.
  double d_ul_kb = 0.0;
  /// Downlink volume including transport overhead.
  double d_dl_kb = 0.0;
  /// Demand of the segment that starts at this split (layers between split
  /// `split_index` and `split_index + 1`).
  double segment_demand_gflop = 0.0;
  /// An autoencoder compresses features at this split.
  bool compressor = false;
  /// Tabulated compression ratio; absent where it is undefined.
  std::optional<double> compression_ratio;

  double comp_bits() const { return units::kilobits_to_bits(d_comp_kb); }
  double ul_bits() const { return units::kilobits_to_bits(d_ul_kb); }
  double dl_bits() const { return units::kilobits_to_bits(d_dl_kb); }

  friend bool operator==(const SplitPointEntry&, const SplitPointEntry&) = default;
};

struct SplitProfile {
  std::vector<SplitPointEntry> entries;

  const SplitPointEntry& at(int split) const;
  int max_split() const { return static_cast<int>(entries.size()) - 1; }

  /// Demand of segment `i` (1-based, the layers ending at split `i`), in FLOP.
  /// Read from the row of split `i - 1`.
  double segment_flop(int i) const;

  friend bool operator==(const SplitProfile&, const SplitProfile&) = default;
};

struct NetworkProfile {
  double b_ul_mbps = 0.0;
  double b_dl_mbps = 0.0;
  double d_ul_ms = 0.0;
  double d_dl_ms = 0.0;

  double b_ul_bps() const { return units::mbps_to_bps(b_ul_mbps); }
  double b_dl_bps() const { return units::mbps_to_bps(b_dl_mbps); }
  double d_ul_s() const { return units::ms_to_s(d_ul_ms); }
  double d_dl_s() const { return units::ms_to_s(d_dl_ms); }

  friend bool operator==(const NetworkProfile&, const NetworkProfile&) = default;
};

/// How the preprocessing coefficient scales with volume.
enum class PrepModel {
  kDivide,    // t = d_prep + D / k_prep, k_prep in kb/ms
  kMultiply,  // t = d_prep + k_prep * D, k_prep in ms/kb
};

/// Which split volume drives preprocessing.
enum class PrepVolume {
  kCompressed,  // D_comp
  kUplink,      // D_ul
};

struct ComputeProfile {
  double c_dev_gflops = 0.0;
  double c_mec_gflops = 0.0;
  double d_dev_ms = 0.0;
  double d_mec_ms = 0.0;
  double d_prep_ms = 0.0;
  double k_prep = 0.0;
  /// Hardware ratings, informational only. The fitted c_mec is not their sum.
  std::optional<double> c_cpu_gflops;
  std::optional<double> c_gpu_gflops;
  PrepModel prep_model = PrepModel::kDivide;
  PrepVolume prep_volume = PrepVolume::kCompressed;

  double c_dev_flops() const { return units::gflop_to_flop(c_dev_gflops); }
  double c_mec_flops() const { return units::gflop_to_flop(c_mec_gflops); }
  double d_dev_s() const { return units::ms_to_s(d_dev_ms); }
  double d_mec_s() const { return units::ms_to_s(d_mec_ms); }
  double d_prep_s() const { return units::ms_to_s(d_prep_ms); }

  friend bool operator==(const ComputeProfile&, const ComputeProfile&) = default;
};

struct PowerProfile {
  double p_idle_w = 0.0;
  double p_prep_w = 0.0;
  double p_proc_w = 0.0;
  double p_comm_w = 0.0;

  friend bool operator==(const PowerProfile&, const PowerProfile&) = default;
};

enum class Provenance {
  kMeasured,
  kApproximate,   // read off a figure or a bound in the source material
  kInterpolated,  // placeholder, not ground truth
};

std::string_view to_string(Provenance p);
std::optional<Provenance> provenance_from_string(std::string_view s);

/// Accuracy for every (exit 1..num_exits, split 0..num_splits) cell.
class AccuracyProfile {
 public:
  AccuracyProfile() = default;
  AccuracyProfile(int num_exits, int num_splits, double fill = 0.0,
                  Provenance provenance = Provenance::kMeasured);

  int num_exits() const { return num_exits_; }
  int num_splits() const { return num_splits_; }

  double at(int exit, int split) const { return values_[index(exit, split)]; }
  Provenance provenance(int exit, int split) const { return provenance_[index(exit, split)]; }
  void set(int exit, int split, double value, Provenance p);
  void set_row(int exit, double value, Provenance p);

  friend bool operator==(const AccuracyProfile&, const AccuracyProfile&) = default;

 private:
  std::size_t index(int exit, int split) const;

  int num_exits_ = 0;
  int num_splits_ = 0;
  std::vector<double> values_;
  std::vector<Provenance> provenance_;
};

struct ExecutionPlan {
  int exit = 1;
  int split = 0;

  /// Some layers run on the MEC server.
  bool offload_active() const { return split < exit; }

  friend bool operator==(const ExecutionPlan&, const ExecutionPlan&) = default;
  friend auto operator<=>(const ExecutionPlan&, const ExecutionPlan&) = default;
};

struct SystemProfile {
  CnnTopology topology;
  SplitProfile splits;
  NetworkProfile network;
  ComputeProfile compute;
  PowerProfile power;
  AccuracyProfile accuracy;

  /// Throws ValidationError naming the first violated field.
  void validate() const;
  /// Throws ValidationError ("plan.exit"/"plan.split") when out of range.
  void validate_plan(const ExecutionPlan& plan) const;

  friend bool operator==(const SystemProfile&, const SystemProfile&) = default;
};

/// Dotted-key overrides such as {"network.b_ul", "25.0"} or
/// {"splits.1.d_ul", "1200"}; applied after the file is read.
using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Parses "key=value"; throws ValidationError on a missing '='.
std::pair<std::string, std::string> parse_override(std::string_view text);

/// Built-in profile holding the measured split table and fitted parameters.
const SystemProfile& default_profile();

/// Reads a profile from configuration text. Sections or keys not given fall
/// back to the built-in profile.
SystemProfile parse_profile(std::string_view text, const Overrides& overrides = {});

/// As parse_profile; with no path, starts from the built-in profile.
SystemProfile load_profile(const std::optional<std::filesystem::path>& path,
                           const Overrides& overrides = {});

/// Writes every field in the configuration format; parse_profile reads it back
/// to an identical profile.
std::string serialize_profile(const SystemProfile& profile);

/// D_orig / D_comp. Throws DomainError when d_comp_kb is zero.
double compression_ratio(double d_orig_kb, double d_comp_kb);

}  // namespace offsim
