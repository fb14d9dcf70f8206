// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "offsim/cost_model.hpp"

namespace offsim {

/// Every (exit, split) plan of a profile, ordered by exit then split.
struct SweepResult {
  std::vector<CostReport> rows;
  int num_exits = 0;
  int num_splits = 0;

  const CostReport& at(int exit, int split) const;
};

/// All axes are minimised; accuracy enters negated.
enum class Axis { kDelay, kEnergy, kNegAccuracy };

std::string_view to_string(Axis axis);
double axis_value(const CostReport& row, Axis axis);

struct Objective {
  enum class Kind { kMinDelay, kMinEnergy, kWeighted };

  Kind kind = Kind::kMinDelay;
  double weight_delay = 0.0;
  double weight_energy = 0.0;

  static Objective min_delay() { return {Kind::kMinDelay, 1.0, 0.0}; }
  static Objective min_energy() { return {Kind::kMinEnergy, 0.0, 1.0}; }
  static Objective weighted(double w_delay, double w_energy) { return {Kind::kWeighted, w_delay, w_energy}; }

  void validate() const;
};

struct Constraint {
  std::optional<double> min_accuracy;
  std::optional<double> max_delay;   // seconds
  std::optional<double> max_energy;  // joules

  void validate() const;
  bool satisfied_by(const CostReport& row) const;
};

SweepResult sweep(const SystemProfile& profile, ModelMode mode = ModelMode::kRefined);

/// Rows not strictly dominated on `axes`, in sweep order. Rows with identical
/// values on every axis never eliminate each other. Throws DomainError on an
/// empty sweep or fewer than two axes.
std::vector<CostReport> pareto_front(const SweepResult& sweep, std::span<const Axis> axes);

/// Axes the optimum is guaranteed to be non-dominated on: the objective's
/// own axes plus one per active constraint.
std::vector<Axis> implied_axes(const Objective& objective, const Constraint& constraint);

/// Feasible row minimising the objective. Exact ties go to the row not
/// dominated on implied_axes(), then to the smaller exit, then the smaller
/// split. Throws InfeasibleError naming the tightest violated constraint.
CostReport optimize(const SweepResult& sweep, const Objective& objective, const Constraint& constraint);

CostReport optimize(const SystemProfile& profile, const Objective& objective, const Constraint& constraint,
                    ModelMode mode = ModelMode::kRefined);

/// Names of the active constraints whose removal would change the optimum.
std::vector<std::string> binding_constraints(const SweepResult& sweep, const Objective& objective,
                                             const Constraint& constraint);

}  // namespace offsim
