// SPDX-License-Identifier: Apache-2.0
#include "offsim/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "offsim/errors.hpp"

namespace offsim {

const CostReport& SweepResult::at(int exit, int split) const {
  if (exit < 1 || exit > num_exits || split < 0 || split > num_splits) {
    throw DomainError(fmt::format("no sweep row for exit {}, split {}", exit, split));
  }
  return rows[static_cast<std::size_t>(exit - 1) * static_cast<std::size_t>(num_splits + 1) +
              static_cast<std::size_t>(split)];
}

std::string_view to_string(Axis axis) {
  switch (axis) {
    case Axis::kDelay: return "delay";
    case Axis::kEnergy: return "energy";
    case Axis::kNegAccuracy: return "neg_accuracy";
  }
  return "delay";
}

double axis_value(const CostReport& row, Axis axis) {
  switch (axis) {
    case Axis::kDelay: return row.delay.t_total;
    case Axis::kEnergy: return row.energy.e_total;
    case Axis::kNegAccuracy: return -row.accuracy;
  }
  return 0.0;
}

void Objective::validate() const {
  if (kind != Kind::kWeighted) return;
  if (!(weight_delay >= 0.0) || !(weight_energy >= 0.0) || !std::isfinite(weight_delay) ||
      !std::isfinite(weight_energy)) {
    throw ValidationError("objective.weights", "weights must be finite and nonnegative");
  }
  if (weight_delay + weight_energy <= 0.0) {
    throw ValidationError("objective.weights", "at least one weight must be positive");
  }
}

void Constraint::validate() const {
  auto bound = [](const std::optional<double>& v, const char* field) {
    if (v && (!std::isfinite(*v) || *v < 0.0)) {
      throw ValidationError(field, fmt::format("must be finite and nonnegative (got {})", *v));
    }
  };
  bound(min_accuracy, "constraint.min_accuracy");
  bound(max_delay, "constraint.max_delay");
  bound(max_energy, "constraint.max_energy");
  if (min_accuracy && *min_accuracy > 1.0) {
    throw ValidationError("constraint.min_accuracy", "must lie in [0, 1]");
  }
}

bool Constraint::satisfied_by(const CostReport& row) const {
  if (min_accuracy && row.accuracy < *min_accuracy) return false;
  if (max_delay && row.delay.t_total > *max_delay) return false;
  if (max_energy && row.energy.e_total > *max_energy) return false;
  return true;
}

SweepResult sweep(const SystemProfile& profile, ModelMode mode) {
  SweepResult out;
  out.num_exits = profile.topology.num_exits;
  out.num_splits = profile.topology.num_splits;
  out.rows.reserve(static_cast<std::size_t>(out.num_exits) * static_cast<std::size_t>(out.num_splits + 1));
  for (int e = 1; e <= out.num_exits; ++e) {
    for (int s = 0; s <= out.num_splits; ++s) out.rows.push_back(evaluate_plan({e, s}, profile, mode));
  }
  return out;
}

namespace {

bool dominates(const CostReport& a, const CostReport& b, std::span<const Axis> axes) {
  bool strictly = false;
  for (Axis axis : axes) {
    double va = axis_value(a, axis);
    double vb = axis_value(b, axis);
    if (va > vb) return false;
    if (va < vb) strictly = true;
  }
  return strictly;
}

// Non-dominated subset of `rows` (indices). Rows are visited in
// lexicographic axis order, so any dominator of a row is visited before it;
// dominance is transitive, so comparing against the front found so far
// suffices.
std::vector<std::size_t> non_dominated(const std::vector<const CostReport*>& rows, std::span<const Axis> axes) {
  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    for (Axis axis : axes) {
      double va = axis_value(*rows[a], axis);
      double vb = axis_value(*rows[b], axis);
      if (va != vb) return va < vb;
    }
    return false;
  });

  std::vector<std::size_t> front;
  for (std::size_t idx : order) {
    bool dominated = std::any_of(front.begin(), front.end(),
                                 [&](std::size_t f) { return dominates(*rows[f], *rows[idx], axes); });
    if (!dominated) front.push_back(idx);
  }
  std::sort(front.begin(), front.end());
  return front;
}

double objective_value(const CostReport& row, const Objective& objective, double max_delay, double max_energy) {
  switch (objective.kind) {
    case Objective::Kind::kMinDelay: return row.delay.t_total;
    case Objective::Kind::kMinEnergy: return row.energy.e_total;
    case Objective::Kind::kWeighted: {
      double d = max_delay > 0.0 ? row.delay.t_total / max_delay : 0.0;
      double e = max_energy > 0.0 ? row.energy.e_total / max_energy : 0.0;
      return objective.weight_delay * d + objective.weight_energy * e;
    }
  }
  return 0.0;
}

struct ConstraintCheck {
  std::string name;
  std::string describe;
  bool satisfiable_alone = false;
  std::size_t satisfying = 0;
};

[[noreturn]] void throw_infeasible(const SweepResult& sweep, const Constraint& c) {
  std::vector<ConstraintCheck> checks;
  auto add = [&](const std::string& name, auto pred, std::string describe) {
    ConstraintCheck chk{name, std::move(describe), false, 0};
    for (const auto& row : sweep.rows) chk.satisfying += pred(row) ? 1 : 0;
    chk.satisfiable_alone = chk.satisfying > 0;
    checks.push_back(std::move(chk));
  };

  double best_acc = -1.0;
  double best_delay = std::numeric_limits<double>::infinity();
  double best_energy = std::numeric_limits<double>::infinity();
  for (const auto& row : sweep.rows) {
    best_acc = std::max(best_acc, row.accuracy);
    best_delay = std::min(best_delay, row.delay.t_total);
    best_energy = std::min(best_energy, row.energy.e_total);
  }
  if (c.min_accuracy) {
    add("min_accuracy", [&](const CostReport& r) { return r.accuracy >= *c.min_accuracy; },
        fmt::format("min_accuracy {} (best achievable {})", *c.min_accuracy, best_acc));
  }
  if (c.max_delay) {
    add("max_delay", [&](const CostReport& r) { return r.delay.t_total <= *c.max_delay; },
        fmt::format("max_delay {:.3f} ms (best achievable {:.3f} ms)", *c.max_delay * 1e3, best_delay * 1e3));
  }
  if (c.max_energy) {
    add("max_energy", [&](const CostReport& r) { return r.energy.e_total <= *c.max_energy; },
        fmt::format("max_energy {:.4f} J (best achievable {:.4f} J)", *c.max_energy, best_energy));
  }

  // An individually unsatisfiable constraint is the tightest; otherwise the
  // one admitting the fewest plans on its own.
  const ConstraintCheck* tightest = nullptr;
  for (const auto& chk : checks) {
    if (!tightest || chk.satisfying < tightest->satisfying) tightest = &chk;
  }
  if (!tightest) throw InfeasibleError("none", "sweep has no plans");
  std::string what = tightest->satisfiable_alone
                         ? fmt::format("no plan satisfies all constraints jointly; tightest: {}", tightest->describe)
                         : fmt::format("no plan satisfies {}", tightest->describe);
  throw InfeasibleError(tightest->name, what);
}

}  // namespace

std::vector<CostReport> pareto_front(const SweepResult& sweep, std::span<const Axis> axes) {
  if (sweep.rows.empty()) throw DomainError("pareto front of an empty sweep");
  if (axes.size() < 2) throw DomainError("pareto front needs at least two axes");
  std::vector<const CostReport*> rows;
  rows.reserve(sweep.rows.size());
  for (const auto& r : sweep.rows) rows.push_back(&r);
  std::vector<CostReport> out;
  for (std::size_t i : non_dominated(rows, axes)) out.push_back(*rows[i]);
  return out;
}

std::vector<Axis> implied_axes(const Objective& objective, const Constraint& constraint) {
  std::vector<Axis> axes;
  auto add = [&](Axis a) {
    if (std::find(axes.begin(), axes.end(), a) == axes.end()) axes.push_back(a);
  };
  switch (objective.kind) {
    case Objective::Kind::kMinDelay: add(Axis::kDelay); break;
    case Objective::Kind::kMinEnergy: add(Axis::kEnergy); break;
    case Objective::Kind::kWeighted:
      add(Axis::kDelay);
      add(Axis::kEnergy);
      break;
  }
  if (constraint.min_accuracy) add(Axis::kNegAccuracy);
  if (constraint.max_delay) add(Axis::kDelay);
  if (constraint.max_energy) add(Axis::kEnergy);
  return axes;
}

CostReport optimize(const SweepResult& sweep, const Objective& objective, const Constraint& constraint) {
  objective.validate();
  constraint.validate();
  if (sweep.rows.empty()) throw DomainError("optimize over an empty sweep");

  double max_delay = 0.0;
  double max_energy = 0.0;
  for (const auto& r : sweep.rows) {
    max_delay = std::max(max_delay, r.delay.t_total);
    max_energy = std::max(max_energy, r.energy.e_total);
  }

  std::vector<const CostReport*> best;
  double best_value = std::numeric_limits<double>::infinity();
  for (const auto& r : sweep.rows) {
    if (!constraint.satisfied_by(r)) continue;
    double v = objective_value(r, objective, max_delay, max_energy);
    if (best.empty() || v < best_value) {
      best.assign(1, &r);
      best_value = v;
    } else if (v == best_value) {
      best.push_back(&r);
    }
  }
  if (best.empty()) throw_infeasible(sweep, constraint);
  if (best.size() == 1) return *best.front();

  // Rows arrive in (exit, split) order, so the first non-dominated one wins
  // the remaining tie.
  const auto axes = implied_axes(objective, constraint);
  return *best[non_dominated(best, axes).front()];
}

CostReport optimize(const SystemProfile& profile, const Objective& objective, const Constraint& constraint,
                    ModelMode mode) {
  return optimize(sweep(profile, mode), objective, constraint);
}

std::vector<std::string> binding_constraints(const SweepResult& sweep, const Objective& objective,
                                             const Constraint& constraint) {
  const CostReport chosen = optimize(sweep, objective, constraint);
  std::vector<std::string> binding;
  auto check = [&](const char* name, Constraint relaxed) {
    if (optimize(sweep, objective, relaxed).plan != chosen.plan) binding.emplace_back(name);
  };
  if (constraint.min_accuracy) {
    Constraint c = constraint;
    c.min_accuracy.reset();
    check("min_accuracy", c);
  }
  if (constraint.max_delay) {
    Constraint c = constraint;
    c.max_delay.reset();
    check("max_delay", c);
  }
  if (constraint.max_energy) {
    Constraint c = constraint;
    c.max_energy.reset();
    check("max_energy", c);
  }
  return binding;
}

}  // namespace offsim
