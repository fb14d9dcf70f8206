// SPDX-License-Identifier: Apache-2.0
#pragma once

// Delay, energy and accuracy of a single execution plan. Every function is
// pure; all times are seconds and all energies joules.

#include <cstdint>

#include "offsim/profiles.hpp"

namespace offsim {

enum class ModelMode {
  /// Per-segment and preprocessing overheads included (the default).
  kRefined,
  /// Only volume/bitrate and demand/compute-rate terms; no d_dev, d_mec or
  /// preprocessing.
  kIdealized,
};

struct DelayBreakdown {
  double t_prep = 0.0;
  double t_local = 0.0;
  double t_mec = 0.0;
  double t_ul = 0.0;
  double t_dl = 0.0;
  double t_comm = 0.0;  // t_ul + t_dl
  double t_comp = 0.0;  // t_prep + t_local + t_mec
  double t_total = 0.0;  // t_comp + t_comm

  friend bool operator==(const DelayBreakdown&, const DelayBreakdown&) = default;
};

struct EnergyBreakdown {
  double e_idle = 0.0;
  double e_prep = 0.0;
  double e_comp = 0.0;
  double e_comm = 0.0;
  double e_total = 0.0;

  friend bool operator==(const EnergyBreakdown&, const EnergyBreakdown&) = default;
};

struct CostReport {
  ExecutionPlan plan;
  DelayBreakdown delay;
  EnergyBreakdown energy;
  double accuracy = 0.0;
  bool offload_active = false;

  friend bool operator==(const CostReport&, const CostReport&) = default;
};

struct CommunicationDelay {
  double t_ul = 0.0;
  double t_dl = 0.0;
};

struct ComputingDelay {
  double t_prep = 0.0;
  double t_local = 0.0;
  double t_mec = 0.0;
};

/// n_true / n_total. Throws DomainError when n_total is 0 or n_true is
/// outside 0..n_total.
double classification_accuracy(std::int64_t n_true, std::int64_t n_total);

/// Volume handed to preprocessing for `split`, in kilobits.
double preprocessing_volume_kb(const SplitPointEntry& entry, const ComputeProfile& compute);

/// Zero unless the plan offloads.
double preprocessing_delay(const ExecutionPlan& plan, const SystemProfile& profile);

CommunicationDelay communication_delay(const ExecutionPlan& plan, const SystemProfile& profile);

/// Local segments 1..min(S,E) on the device, segments S+1..E on the MEC
/// server (none when S >= E).
ComputingDelay computing_delay(const ExecutionPlan& plan, const SystemProfile& profile,
                               ModelMode mode = ModelMode::kRefined);

DelayBreakdown total_delay(const ExecutionPlan& plan, const SystemProfile& profile,
                           ModelMode mode = ModelMode::kRefined);

/// The modem term is charged only while offloading; a fully local plan has
/// no idle, preprocessing or communication energy.
EnergyBreakdown total_energy(const ExecutionPlan& plan, const SystemProfile& profile,
                             const DelayBreakdown& delay);

/// Throws ValidationError when the plan is outside the profile's topology.
CostReport evaluate_plan(const ExecutionPlan& plan, const SystemProfile& profile,
                         ModelMode mode = ModelMode::kRefined);

}  // namespace offsim
