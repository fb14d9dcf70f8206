// SPDX-License-Identifier: Apache-2.0
#pragma once

// Replays one offloading round stage by stage. Event mode runs on a virtual
// clock; socket mode performs real waits and moves real bytes through a
// shaped loopback TCP connection to an OffloadServer.

#include <chrono>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "offsim/profiles.hpp"

namespace offsim {

/// Which constant delays a jitter spec perturbs.
enum JitterTarget : unsigned {
  kJitterUplink = 1u << 0,    // d_ul
  kJitterDownlink = 1u << 1,  // d_dl
  kJitterDevice = 1u << 2,    // d_dev, once per local segment
  kJitterMec = 1u << 3,       // d_mec, once per MEC segment
  kJitterAll = 0xFu,
};

/// Additive noise on the constant per-stage delays. Volumes and compute
/// demands are never perturbed.
struct JitterSpec {
  enum class Kind { kNone, kGaussian, kLognormal };

  Kind kind = Kind::kNone;
  /// Gaussian: standard deviation. Lognormal: the median of the added delay.
  double scale_s = 0.0;
  /// Lognormal shape (sigma of the underlying normal); unused otherwise.
  double shape = 0.0;
  unsigned targets = kJitterAll;

  /// "none" | "gaussian:<sigma_ms>[@targets]" |
  /// "lognormal:<median_ms>:<shape>[@targets]", where targets is a
  /// comma-separated subset of ul, dl, dev, mec. Throws ValidationError.
  static JitterSpec parse(std::string_view text);
  std::string str() const;
  bool enabled() const { return kind != Kind::kNone; }
};

/// Draws perturbed constant delays. Gaussian results are clamped at zero.
class JitterSampler {
 public:
  JitterSampler(JitterSpec spec, std::uint64_t seed) : spec_(spec), rng_(seed) {}
  double apply(double base_s, JitterTarget target);

 private:
  JitterSpec spec_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

enum class EmulationMode { kEvent, kSocket };

struct EmulationConfig {
  EmulationMode mode = EmulationMode::kEvent;
  JitterSpec jitter;
  std::uint64_t seed = 0;
  /// Token-bucket rates in bit/s; 0 means "use the profile's bitrate".
  double shaping_rate_ul = 0.0;
  double shaping_rate_dl = 0.0;
  std::size_t burst_bytes = 1500;
  std::string endpoint = "127.0.0.1:7878";
  std::chrono::milliseconds stage_timeout{30000};
};

enum class Stage {
  kPrepStart,
  kPrepEnd,
  kUlStart,
  kUlEnd,
  kSegStart,
  kSegEnd,
  kMecStart,
  kMecEnd,
  kDlStart,
  kDlEnd,
  kDone,
};

std::string_view to_string(Stage stage);

struct TraceEvent {
  std::int64_t time_ps = 0;
  Stage stage = Stage::kDone;
  /// Segment number for kSegStart/kSegEnd, 0 otherwise.
  int segment = 0;

  double seconds() const { return static_cast<double>(time_ps) / 1e12; }
  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct EmulationTrace {
  ExecutionPlan plan;
  std::vector<TraceEvent> events;
  double measured_total = 0.0;  // seconds, equal to the last timestamp

  /// One "<time_ps> <stage>[ <segment>]" line per event.
  std::string to_text() const;
  friend bool operator==(const EmulationTrace&, const EmulationTrace&) = default;
};

/// Virtual-clock replay with picosecond resolution; bit-identical for a given
/// plan, profile, jitter spec and seed.
EmulationTrace emulate_event(const ExecutionPlan& plan, const SystemProfile& profile, const EmulationConfig& cfg);

/// Real-time round against an OffloadServer at cfg.endpoint. Fully local
/// plans never open a connection. Throws ConnectionError, ProtocolError or
/// TimeoutError.
EmulationTrace emulate_socket(const ExecutionPlan& plan, const SystemProfile& profile, const EmulationConfig& cfg);

/// Dispatches on cfg.mode.
EmulationTrace emulate(const ExecutionPlan& plan, const SystemProfile& profile, const EmulationConfig& cfg);

struct TrialSummary {
  std::vector<double> totals;  // seconds, one per trial
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single trial
  double min = 0.0;
  double max = 0.0;
};

/// Runs `n` rounds; trial i uses seed cfg.seed + i. Errors are rethrown with
/// the trial index prefixed.
TrialSummary run_trials(const ExecutionPlan& plan, const SystemProfile& profile, const EmulationConfig& cfg,
                        int n);

/// Per-segment compute time on the MEC server for a plan (segments
/// split+1..exit), drawing d_mec jitter from `sampler` when given.
double mec_service_time(const ExecutionPlan& plan, const SystemProfile& profile, JitterSampler* sampler = nullptr);

}  // namespace offsim
