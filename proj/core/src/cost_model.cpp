// SPDX-License-Identifier: Apache-2.0
#include "offsim/cost_model.hpp"

#include <algorithm>

#include "offsim/errors.hpp"

namespace offsim {

double classification_accuracy(std::int64_t n_true, std::int64_t n_total) {
  if (n_total <= 0) throw DomainError("classification accuracy needs at least one input");
  if (n_true < 0 || n_true > n_total) throw DomainError("correct count must lie in 0..total");
  return static_cast<double>(n_true) / static_cast<double>(n_total);
}

double preprocessing_volume_kb(const SplitPointEntry& entry, const ComputeProfile& compute) {
  return compute.prep_volume == PrepVolume::kCompressed ? entry.d_comp_kb : entry.d_ul_kb;
}

double preprocessing_delay(const ExecutionPlan& plan, const SystemProfile& profile) {
  if (!plan.offload_active()) return 0.0;
  const auto& c = profile.compute;
  const double volume_kb = preprocessing_volume_kb(profile.splits.at(plan.split), c);
  // k_prep is per millisecond, so the variable part comes out in ms.
  const double variable_ms = c.prep_model == PrepModel::kDivide ? volume_kb / c.k_prep : c.k_prep * volume_kb;
  return c.d_prep_s() + units::ms_to_s(variable_ms);
}

CommunicationDelay communication_delay(const ExecutionPlan& plan, const SystemProfile& profile) {
  if (!plan.offload_active()) return {};
  const auto& entry = profile.splits.at(plan.split);
  const auto& net = profile.network;
  return {net.d_ul_s() + entry.ul_bits() / net.b_ul_bps(), net.d_dl_s() + entry.dl_bits() / net.b_dl_bps()};
}

ComputingDelay computing_delay(const ExecutionPlan& plan, const SystemProfile& profile, ModelMode mode) {
  const auto& c = profile.compute;
  const bool refined = mode == ModelMode::kRefined;
  const double dev_overhead = refined ? c.d_dev_s() : 0.0;
  const double mec_overhead = refined ? c.d_mec_s() : 0.0;

  ComputingDelay out;
  const int local_end = std::min(plan.split, plan.exit);
  for (int i = 1; i <= local_end; ++i) {
    out.t_local += dev_overhead + profile.splits.segment_flop(i) / c.c_dev_flops();
  }
  for (int i = plan.split + 1; i <= plan.exit; ++i) {
    out.t_mec += mec_overhead + profile.splits.segment_flop(i) / c.c_mec_flops();
  }
  out.t_prep = refined ? preprocessing_delay(plan, profile) : 0.0;
  return out;
}

DelayBreakdown total_delay(const ExecutionPlan& plan, const SystemProfile& profile, ModelMode mode) {
  const auto comm = communication_delay(plan, profile);
  const auto comp = computing_delay(plan, profile, mode);

  DelayBreakdown d;
  d.t_prep = comp.t_prep;
  d.t_local = comp.t_local;
  d.t_mec = comp.t_mec;
  d.t_ul = comm.t_ul;
  d.t_dl = comm.t_dl;
  d.t_comm = d.t_ul + d.t_dl;
  d.t_comp = d.t_prep + d.t_local + d.t_mec;
  d.t_total = d.t_comp + d.t_comm;
  return d;
}

EnergyBreakdown total_energy(const ExecutionPlan& plan, const SystemProfile& profile, const DelayBreakdown& delay) {
  const auto& p = profile.power;
  EnergyBreakdown e;
  e.e_idle = (delay.t_comm + delay.t_mec) * p.p_idle_w;
  e.e_prep = delay.t_prep * p.p_prep_w;
  e.e_comp = delay.t_local * p.p_proc_w;
  e.e_comm = plan.offload_active() ? delay.t_total * p.p_comm_w : 0.0;
  e.e_total = e.e_idle + e.e_prep + e.e_comp + e.e_comm;
  return e;
}

CostReport evaluate_plan(const ExecutionPlan& plan, const SystemProfile& profile, ModelMode mode) {
  profile.validate_plan(plan);
  CostReport r;
  r.plan = plan;
  r.delay = total_delay(plan, profile, mode);
  r.energy = total_energy(plan, profile, r.delay);
  r.accuracy = profile.accuracy.at(plan.exit, plan.split);
  r.offload_active = plan.offload_active();
  return r;
}

}  // namespace offsim
