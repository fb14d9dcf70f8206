// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "offsim/config.hpp"
#include "offsim/cost_model.hpp"
#include "offsim/emulator.hpp"
#include "offsim/errors.hpp"
#include "offsim/phy_bitrate.hpp"
#include "offsim/planner.hpp"
#include "offsim/profiles.hpp"
#include "offsim/server.hpp"
#include "offsim/wire.hpp"
#include "oracle/reference_model.hpp"
#include "support/test_support.hpp"

namespace {

using namespace offsim;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

double rel_err(double a, double b) {
  if (a == b) return 0.0;
  return std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b));
}

const SystemProfile& def() { return default_profile(); }

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  bool frozen_ok = true;
  for (int e = 1; e <= 5; ++e) {
    for (int s = 0; s <= 5; ++s) {
      const auto r = evaluate_plan({e, s}, def());
      const auto o = oracle::evaluate(e, s);
      const double pairs[][2] = {{r.delay.t_prep, o.prep},    {r.delay.t_local, o.local},
                                 {r.delay.t_mec, o.mec},      {r.delay.t_ul, o.ul},
                                 {r.delay.t_dl, o.dl},        {r.delay.t_total, o.total},
                                 {r.energy.e_idle, o.e_idle}, {r.energy.e_prep, o.e_prep},
                                 {r.energy.e_comp, o.e_comp}, {r.energy.e_comm, o.e_comm},
                                 {r.energy.e_total, o.e_total}};
      for (const auto& p : pairs) worst = std::max(worst, rel_err(p[0], p[1]));
      // Frozen table is rounded to 1e-6 ms.
      frozen_ok = frozen_ok && std::fabs(r.delay.t_total * 1e3 - oracle::kTotalMs[e - 1][s]) < 1e-6;
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  char buf[160];
  std::snprintf(buf, sizeof buf, "30 plans, max relative error %.3g, frozen totals %s, %.3f s", worst,
                frozen_ok ? "match" : "differ", secs);
  return {worst < 1e-9 && frozen_ok && secs < 1.0, buf};
}

Outcome ratio_in(double value, double lo, double hi, const char* what) {
  char buf[160];
  if (hi == std::numeric_limits<double>::infinity()) {
    std::snprintf(buf, sizeof buf, "%s = %.4f (need >= %.1f)", what, value, lo);
  } else {
    std::snprintf(buf, sizeof buf, "%s = %.4f (need [%.1f, %.1f])", what, value, lo, hi);
  }
  return {value >= lo && value <= hi, buf};
}

Outcome offloading_delay_gain() {
  const double v = evaluate_plan({5, 5}, def()).delay.t_total / evaluate_plan({5, 0}, def()).delay.t_total;
  return ratio_in(v, 2.0, 3.2, "t_total(5,5)/t_total(5,0)");
}

Outcome offloading_energy_gain() {
  const double v = evaluate_plan({5, 5}, def()).energy.e_total / evaluate_plan({5, 0}, def()).energy.e_total;
  return ratio_in(v, 2.1, 3.2, "e_total(5,5)/e_total(5,0)");
}

Outcome early_exit_gain() {
  double best = 0.0;
  int at = -1;
  for (int s = 0; s <= 5; ++s) {
    const double v = evaluate_plan({5, s}, def()).delay.t_total / evaluate_plan({1, s}, def()).delay.t_total;
    if (v > best) {
      best = v;
      at = s;
    }
  }
  auto o = ratio_in(best, 4.0, std::numeric_limits<double>::infinity(), "max_S t_total(5,S)/t_total(1,S)");
  o.detail += " at S=" + std::to_string(at);
  return o;
}

Outcome mec_speedup() {
  const double v = evaluate_plan({5, 5}, def()).delay.t_local / evaluate_plan({5, 0}, def()).delay.t_mec;
  return ratio_in(v, 50.0, std::numeric_limits<double>::infinity(), "t_local(5,5)/t_mec(5,0)");
}

Outcome accuracy_endpoints() {
  bool ok = true;
  for (int s = 0; s <= 5; ++s) {
    ok = ok && evaluate_plan({1, s}, def()).accuracy == 0.32 && evaluate_plan({5, s}, def()).accuracy == 0.93;
  }
  return {ok, "accuracy 0.32 at E=1 and 0.93 at E=5 for S=0..5"};
}

Outcome emulator_equivalence() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int e = 1; e <= 5; ++e) {
    for (int s = 0; s <= 5; ++s) {
      worst = std::max(worst, rel_err(emulate_event({e, s}, def(), {}).measured_total,
                                       evaluate_plan({e, s}, def()).delay.t_total));
    }
  }

  double socket_err = std::numeric_limits<double>::infinity();
  std::string socket_note;
  try {
    ServerOptions opts;
    opts.endpoint = "127.0.0.1:0";
    OffloadServer server(def(), opts);
    server.bind();
    std::atomic<bool> stop{false};
    std::thread t([&] { server.serve(stop); });
    EmulationConfig cfg;
    cfg.mode = EmulationMode::kSocket;
    cfg.endpoint = "127.0.0.1:" + std::to_string(server.port());
    cfg.stage_timeout = std::chrono::seconds(10);
    try {
      const double measured = emulate_socket({5, 4}, def(), cfg).measured_total;
      const double model = evaluate_plan({5, 4}, def()).delay.t_total;
      socket_err = std::fabs(measured - model) / model;
    } catch (const Error& e) {
      socket_note = std::string(", socket error: ") + e.what();
    }
    stop = true;
    t.join();
  } catch (const Error& e) {
    socket_note = std::string(", server error: ") + e.what();
  }

  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  char buf[200];
  std::snprintf(buf, sizeof buf, "event max relative error %.3g over 30 plans; socket (5,4) deviation %.2f%%; %.2f s",
                worst, socket_err * 100.0, secs);
  return {worst < 1e-9 && socket_err <= 0.15 && secs < 30.0, buf + socket_note};
}

std::vector<ExecutionPlan> sorted_plans(const std::vector<CostReport>& rows) {
  std::vector<ExecutionPlan> out;
  for (const auto& r : rows) out.push_back(r.plan);
  std::sort(out.begin(), out.end());
  return out;
}

Outcome planner_correctness() {
  const std::vector<std::vector<Axis>> axis_sets = {{Axis::kDelay, Axis::kEnergy},
                                                    {Axis::kDelay, Axis::kNegAccuracy},
                                                    {Axis::kEnergy, Axis::kNegAccuracy},
                                                    {Axis::kDelay, Axis::kEnergy, Axis::kNegAccuracy}};
  int fronts = 0;
  int optima = 0;
  int failures = 0;
  for (std::uint64_t seed = 0; seed <= 100; ++seed) {
    const SystemProfile p = seed == 0 ? def() : testing::random_profile(seed);
    const SweepResult s = sweep(p);
    for (const auto& axes : axis_sets) {
      ++fronts;
      if (sorted_plans(pareto_front(s, axes)) != sorted_plans(testing::brute_force_front(s.rows, axes))) ++failures;
    }
    const double floors[] = {0.0, 0.3, 0.6, 0.9};
    for (const Objective& obj : {Objective::min_delay(), Objective::min_energy(), Objective::weighted(0.5, 0.5)}) {
      for (double floor : floors) {
        Constraint c;
        if (floor > 0.0) c.min_accuracy = floor;
        CostReport best;
        try {
          best = optimize(s, obj, c);
        } catch (const InfeasibleError&) {
          continue;
        }
        ++optima;
        const auto front = sorted_plans(testing::brute_force_front(s.rows, implied_axes(obj, c)));
        if (!std::binary_search(front.begin(), front.end(), best.plan)) ++failures;
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "default + 100 random profiles: %d fronts, %d optima checked, %d mismatches", fronts,
                optima, failures);
  return {failures == 0, buf};
}

Outcome property_suites() {
  const auto t0 = Clock::now();
  std::vector<std::string> failed;
  auto check = [&](const char* name, const std::function<bool()>& f) {
    bool ok = false;
    try {
      ok = f();
    } catch (const std::exception&) {
      ok = false;
    }
    if (!ok) failed.emplace_back(name);
  };

  std::vector<SystemProfile> profiles{def()};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) profiles.push_back(testing::random_profile(seed));

  check("additivity", [&] {
    for (const auto& p : profiles) {
      for (const auto& r : sweep(p).rows) {
        const auto& d = r.delay;
        const auto& e = r.energy;
        if (d.t_comm != d.t_ul + d.t_dl || d.t_comp != d.t_prep + d.t_local + d.t_mec ||
            d.t_total != d.t_comp + d.t_comm || e.e_total != e.e_idle + e.e_prep + e.e_comp + e.e_comm) {
          return false;
        }
      }
    }
    return true;
  });
  check("fully-local collapse", [&] {
    for (const auto& p : profiles) {
      for (int e = 1; e <= 5; ++e) {
        const auto base = evaluate_plan({e, e}, p);
        for (int s = e + 1; s <= 5; ++s) {
          const auto r = evaluate_plan({e, s}, p);
          if (r.delay != base.delay || r.energy != base.energy) return false;
        }
      }
    }
    return true;
  });
  check("monotonicity in exit", [&] {
    for (const auto& p : profiles) {
      for (int s = 0; s <= 5; ++s) {
        for (int e = 1; e < 5; ++e) {
          if (p.splits.segment_flop(e + 1) > 0.0 &&
              !(evaluate_plan({e + 1, s}, p).delay.t_total > evaluate_plan({e, s}, p).delay.t_total)) {
            return false;
          }
        }
      }
    }
    return true;
  });
  check("zero-overhead degeneration", [&] {
    for (auto p : profiles) {
      p.compute.d_dev_ms = p.compute.d_mec_ms = p.compute.d_prep_ms = 0.0;
      p.compute.k_prep = std::numeric_limits<double>::infinity();
      for (int e = 1; e <= 5; ++e) {
        for (int s = 0; s <= 5; ++s) {
          if (evaluate_plan({e, s}, p, ModelMode::kRefined) != evaluate_plan({e, s}, p, ModelMode::kIdealized)) {
            return false;
          }
        }
      }
    }
    return true;
  });
  check("bitrate linearity", [&] {
    const PhyConfig base{106, 12, 6, 28000, 0.5};
    const double b = link_bitrate(base);
    for (int field = 0; field < 5; ++field) {
      PhyConfig c = base;
      double* f[] = {&c.n_rb, &c.n_sub, &c.n_bits, &c.n_sym, &c.code_rate};
      *f[field] *= 1.7;
      if (rel_err(link_bitrate(c), 1.7 * b) > 1e-12) return false;
    }
    return std::fabs(link_bitrate({106, 12, 6, 28000, 0.754}) - 161126784.0) < 1e-3;
  });
  check("config round-trip", [&] {
    for (const auto& p : profiles) {
      if (parse_profile(serialize_profile(p)) != p) return false;
    }
    return true;
  });
  check("wire negative cases", [&] {
    const auto good = wire::encode_header({wire::MessageType::kTask, 5, 4, 100});
    auto rejects = [](std::array<std::uint8_t, wire::kHeaderSize> b) {
      try {
        wire::decode_header(b);
      } catch (const ProtocolError&) {
        return true;
      }
      return false;
    };
    auto bad_magic = good;
    bad_magic[1] = 0;
    auto bad_version = good;
    bad_version[4] = 9;
    auto bad_type = good;
    bad_type[5] = 7;
    const auto too_long = wire::encode_header({wire::MessageType::kTask, 5, 4, wire::kMaxPayload + 1});
    return !rejects(good) && rejects(bad_magic) && rejects(bad_version) && rejects(bad_type) && rejects(too_long);
  });

  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  std::string detail = "7 suites";
  if (!failed.empty()) {
    detail += "; failed:";
    for (const auto& f : failed) detail += " [" + f + "]";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, ", %.2f s", secs);
  return {failed.empty(), detail + buf};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "oracle equivalence", oracle_equivalence},
      {2, "offloading delay gain", offloading_delay_gain},
      {3, "offloading energy gain", offloading_energy_gain},
      {4, "early-exit delay gain", early_exit_gain},
      {5, "MEC speedup", mec_speedup},
      {6, "accuracy endpoints", accuracy_endpoints},
      {7, "emulator equivalence", emulator_equivalence},
      {8, "planner correctness", planner_correctness},
      {9, "property suites", property_suites},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o{false, ""};
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
