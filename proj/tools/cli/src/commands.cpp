// SPDX-License-Identifier: Apache-2.0
#include "offsim_cli/commands.hpp"

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "offsim/cost_model.hpp"
#include "offsim/emulator.hpp"
#include "offsim/errors.hpp"
#include "offsim/phy_bitrate.hpp"
#include "offsim/planner.hpp"
#include "offsim/profiles.hpp"
#include "offsim/server.hpp"
#include "offsim_cli/report.hpp"

namespace offsim::cli {

namespace {

std::atomic<bool> g_stop_serving{false};

extern "C" void on_stop_signal(int) { g_stop_serving.store(true); }

struct GlobalOptions {
  std::string profile_path;
  std::vector<std::string> overrides;
  bool idealized = false;
  bool refined = false;
  std::string format = "csv";
};

/// Argument problem detected after CLI parsing.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Profile loading failure; mapped to its own exit status.
class ProfileError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

SystemProfile resolve_profile(const GlobalOptions& g) {
  std::optional<std::filesystem::path> path;
  if (!g.profile_path.empty()) {
    path = g.profile_path;
  } else if (const char* env = std::getenv("OFFSIM_PROFILE"); env && *env) {
    path = env;
  }
  try {
    Overrides overrides;
    for (const auto& o : g.overrides) overrides.push_back(parse_override(o));
    return load_profile(path, overrides);
  } catch (const Error& e) {
    throw ProfileError(fmt::format("profile{}: {}", path ? " '" + path->string() + "'" : "", e.what()));
  }
}

ModelMode mode_of(const GlobalOptions& g) {
  if (g.idealized && g.refined) throw UsageError("--refined and --idealized are mutually exclusive");
  return g.idealized ? ModelMode::kIdealized : ModelMode::kRefined;
}

ExecutionPlan checked_plan(const SystemProfile& profile, int exit, int split) {
  ExecutionPlan plan{exit, split};
  try {
    profile.validate_plan(plan);
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  return plan;
}

void print_rows(std::ostream& out, const std::vector<ReportRow>& rows, const std::string& format, bool as_array) {
  if (format == "json") {
    if (as_array) {
      auto arr = nlohmann::ordered_json::array();
      for (const auto& r : rows) arr.push_back(to_json(r));
      out << arr.dump(2) << '\n';
    } else {
      out << to_json(rows.front()).dump(2) << '\n';
    }
  } else {
    write_csv(out, rows);
  }
}

std::string ms(double seconds) { return fmt::format("{:.3f}", seconds * 1e3); }

// ---------------------------------------------------------------------------

struct EvalArgs {
  int exit = 0;
  int split = 0;
};

int cmd_eval(const GlobalOptions& g, const EvalArgs& a, std::ostream& out) {
  const ModelMode mode = mode_of(g);
  const SystemProfile profile = resolve_profile(g);
  const auto plan = checked_plan(profile, a.exit, a.split);
  print_rows(out, {to_row(evaluate_plan(plan, profile, mode))}, g.format, false);
  return kOk;
}

struct SweepArgs {
  std::string output;
};

int cmd_sweep(const GlobalOptions& g, const SweepArgs& a, std::ostream& out) {
  const ModelMode mode = mode_of(g);
  const SystemProfile profile = resolve_profile(g);
  const SweepResult result = sweep(profile, mode);
  std::vector<ReportRow> rows;
  rows.reserve(result.rows.size());
  for (const auto& r : result.rows) rows.push_back(to_row(r));

  if (a.output.empty() || a.output == "-") {
    print_rows(out, rows, g.format, true);
    return kOk;
  }
  std::ofstream file(a.output, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError(fmt::format("cannot open '{}' for writing", a.output));
  print_rows(file, rows, g.format, true);
  file.flush();
  if (!file) throw IoError(fmt::format("write to '{}' failed", a.output));
  return kOk;
}

struct OptimizeArgs {
  std::string objective = "delay";
  double weight_delay = 0.5;
  double weight_energy = 0.5;
  std::optional<double> min_accuracy;
  std::optional<double> max_delay_ms;
  std::optional<double> max_energy_j;
};

int cmd_optimize(const GlobalOptions& g, const OptimizeArgs& a, std::ostream& out) {
  const ModelMode mode = mode_of(g);
  Objective objective;
  if (a.objective == "delay") {
    objective = Objective::min_delay();
  } else if (a.objective == "energy") {
    objective = Objective::min_energy();
  } else {
    objective = Objective::weighted(a.weight_delay, a.weight_energy);
  }
  Constraint constraint;
  constraint.min_accuracy = a.min_accuracy;
  if (a.max_delay_ms) constraint.max_delay = units::ms_to_s(*a.max_delay_ms);
  constraint.max_energy = a.max_energy_j;
  try {
    objective.validate();
    constraint.validate();
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }

  const SystemProfile profile = resolve_profile(g);
  const SweepResult result = sweep(profile, mode);
  const CostReport best = optimize(result, objective, constraint);
  const auto binding = binding_constraints(result, objective, constraint);
  const std::string justification =
      binding.empty() ? std::string("no binding constraint; unconstrained optimum")
                      : fmt::format("binding constraint: {}", fmt::join(binding, ", "));

  const ReportRow row = to_row(best);
  if (g.format == "json") {
    nlohmann::ordered_json j;
    j["plan"] = to_json(row);
    j["objective"] = a.objective;
    j["binding"] = binding;
    j["justification"] = justification;
    out << j.dump(2) << '\n';
  } else {
    write_csv(out, {row});
    out << "# " << justification << '\n';
  }
  return kOk;
}

struct EmulateArgs {
  int exit = 0;
  int split = 0;
  std::string mode = "event";
  int trials = 1;
  std::uint64_t seed = 0;
  std::string jitter = "none";
  std::string endpoint = "127.0.0.1:7878";
  std::optional<double> rate_ul_mbps;
  std::optional<double> rate_dl_mbps;
  double timeout_s = 30.0;
  bool trace = false;
};

int cmd_emulate(const GlobalOptions& g, const EmulateArgs& a, std::ostream& out) {
  EmulationConfig cfg;
  cfg.mode = a.mode == "socket" ? EmulationMode::kSocket : EmulationMode::kEvent;
  cfg.seed = a.seed;
  cfg.endpoint = a.endpoint;
  cfg.stage_timeout = std::chrono::milliseconds(static_cast<long long>(a.timeout_s * 1e3));
  try {
    cfg.jitter = JitterSpec::parse(a.jitter);
    if (cfg.mode == EmulationMode::kSocket) net::Endpoint::parse(a.endpoint);
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  if (a.rate_ul_mbps) cfg.shaping_rate_ul = units::mbps_to_bps(*a.rate_ul_mbps);
  if (a.rate_dl_mbps) cfg.shaping_rate_dl = units::mbps_to_bps(*a.rate_dl_mbps);

  const SystemProfile profile = resolve_profile(g);
  const auto plan = checked_plan(profile, a.exit, a.split);
  const TrialSummary summary = run_trials(plan, profile, cfg, a.trials);

  std::optional<EmulationTrace> trace;
  if (a.trace) trace = emulate(plan, profile, cfg);

  if (g.format == "json") {
    nlohmann::ordered_json j;
    j["exit"] = plan.exit;
    j["split"] = plan.split;
    j["mode"] = a.mode;
    j["jitter"] = cfg.jitter.str();
    j["seed"] = cfg.seed;
    auto totals = nlohmann::ordered_json::array();
    for (double t : summary.totals) totals.push_back(t * 1e3);
    j["totals_ms"] = totals;
    j["summary"] = {{"mean_ms", summary.mean * 1e3},
                    {"std_ms", summary.stddev * 1e3},
                    {"min_ms", summary.min * 1e3},
                    {"max_ms", summary.max * 1e3}};
    if (trace) {
      auto events = nlohmann::ordered_json::array();
      for (const auto& e : trace->events) {
        events.push_back({{"time_ps", e.time_ps}, {"stage", to_string(e.stage)}, {"segment", e.segment}});
      }
      j["trace"] = events;
    }
    out << j.dump(2) << '\n';
    return kOk;
  }

  out << "trial,measured_total_ms\n";
  for (std::size_t i = 0; i < summary.totals.size(); ++i) out << i << ',' << ms(summary.totals[i]) << '\n';
  out << "\nstatistic,value_ms\n";
  out << "mean," << ms(summary.mean) << '\n';
  out << "std," << ms(summary.stddev) << '\n';
  out << "min," << ms(summary.min) << '\n';
  out << "max," << ms(summary.max) << '\n';
  if (trace) out << '\n' << trace->to_text();
  return kOk;
}

struct ServeArgs {
  std::string endpoint = "127.0.0.1:7878";
  std::optional<double> rate_dl_mbps;
  std::string jitter = "none";
  std::uint64_t seed = 0;
};

int cmd_serve(const GlobalOptions& g, const ServeArgs& a, std::ostream& out, std::ostream& err) {
  ServerOptions opts;
  opts.endpoint = a.endpoint;
  opts.seed = a.seed;
  opts.log = &out;
  try {
    opts.jitter = JitterSpec::parse(a.jitter);
    net::Endpoint::parse(a.endpoint);
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  if (a.rate_dl_mbps) opts.shaping_rate_dl = units::mbps_to_bps(*a.rate_dl_mbps);

  OffloadServer server(resolve_profile(g), opts);
  server.bind();

  g_stop_serving.store(false);
  struct sigaction sa {};
  sa.sa_handler = on_stop_signal;
  sigemptyset(&sa.sa_mask);
  struct sigaction old_int {};
  struct sigaction old_term {};
  ::sigaction(SIGINT, &sa, &old_int);
  ::sigaction(SIGTERM, &sa, &old_term);

  fmt::print(err, "listening on {}:{}\n", net::Endpoint::parse(a.endpoint).host, server.port());
  err.flush();
  server.serve(g_stop_serving);

  ::sigaction(SIGINT, &old_int, nullptr);
  ::sigaction(SIGTERM, &old_term, nullptr);
  fmt::print(err, "stopped after {} rounds\n", server.rounds_served());
  out.flush();
  return kOk;
}

struct BitrateArgs {
  double n_rb = 0.0;
  double n_sub = 12.0;
  double n_bits = 0.0;
  double n_sym = 0.0;
  double code_rate = 1.0;
};

int cmd_bitrate(const GlobalOptions& g, const BitrateArgs& a, std::ostream& out, std::ostream& err) {
  PhyConfig cfg{a.n_rb, a.n_sub, a.n_bits, a.n_sym, a.code_rate};
  double bps = 0.0;
  try {
    bps = link_bitrate(cfg);
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  const SystemProfile profile = resolve_profile(g);
  for (const auto& w : check_against_peak(profile.network, bps)) fmt::print(err, "warning: {}\n", w);

  if (g.format == "json") {
    nlohmann::ordered_json j;
    j["bitrate_bps"] = bps;
    j["bitrate_mbps"] = bps / 1e6;
    out << j.dump(2) << '\n';
  } else {
    fmt::print(out, "bitrate_bps,bitrate_mbps\n{:.0f},{:.3f}\n", bps, bps / 1e6);
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Offloading simulator for CNNs with early exits and split points", "offsim"};
  app.fallthrough();
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--profile", g.profile_path, "Profile file (falls back to $OFFSIM_PROFILE, then built-in)");
  app.add_option("--set", g.overrides, "Override a profile key, e.g. network.b_ul=25")->take_all();
  app.add_flag("--refined", g.refined, "Include fitted per-stage overheads (default)");
  app.add_flag("--idealized", g.idealized, "Drop per-stage overheads and preprocessing");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Evaluate one plan");
  eval->add_option("--exit", eval_args.exit, "Exit E")->required();
  eval->add_option("--split", eval_args.split, "Split S")->required();

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate every (exit, split) plan");
  sweep_cmd->add_option("--output,-o", sweep_args.output, "Write to a file instead of stdout");

  OptimizeArgs opt_args;
  auto* optimize_cmd = app.add_subcommand("optimize", "Pick the best feasible plan");
  optimize_cmd->add_option("--objective", opt_args.objective)->check(CLI::IsMember({"delay", "energy", "weighted"}));
  optimize_cmd->add_option("--weight-delay", opt_args.weight_delay, "Weighted objective: delay weight");
  optimize_cmd->add_option("--weight-energy", opt_args.weight_energy, "Weighted objective: energy weight");
  optimize_cmd->add_option("--min-accuracy", opt_args.min_accuracy, "Lower bound on accuracy in [0, 1]");
  optimize_cmd->add_option("--max-delay", opt_args.max_delay_ms, "Upper bound on total delay, ms");
  optimize_cmd->add_option("--max-energy", opt_args.max_energy_j, "Upper bound on total energy, J");

  EmulateArgs em_args;
  auto* emulate_cmd = app.add_subcommand("emulate", "Replay offloading rounds");
  emulate_cmd->add_option("--exit", em_args.exit)->required();
  emulate_cmd->add_option("--split", em_args.split)->required();
  emulate_cmd->add_option("--mode", em_args.mode)->check(CLI::IsMember({"event", "socket"}));
  emulate_cmd->add_option("--trials", em_args.trials)->check(CLI::PositiveNumber);
  emulate_cmd->add_option("--seed", em_args.seed);
  emulate_cmd->add_option("--jitter", em_args.jitter, "none | gaussian:<sigma_ms>[@ul,dl,dev,mec] | "
                                                      "lognormal:<median_ms>:<shape>[@...]");
  emulate_cmd->add_option("--endpoint", em_args.endpoint, "Server host:port (socket mode)");
  emulate_cmd->add_option("--shaping-rate-ul", em_args.rate_ul_mbps, "Uplink shaping rate, Mbps");
  emulate_cmd->add_option("--shaping-rate-dl", em_args.rate_dl_mbps, "Unused by the client; set it on serve");
  emulate_cmd->add_option("--timeout", em_args.timeout_s, "Per-stage timeout, s")->check(CLI::PositiveNumber);
  emulate_cmd->add_flag("--trace", em_args.trace, "Also print the stage trace of one round");

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "Run the MEC side of socket-mode emulation");
  serve_cmd->add_option("--endpoint", serve_args.endpoint, "Listen host:port");
  serve_cmd->add_option("--shaping-rate-dl", serve_args.rate_dl_mbps, "Downlink shaping rate, Mbps");
  serve_cmd->add_option("--jitter", serve_args.jitter);
  serve_cmd->add_option("--seed", serve_args.seed);

  BitrateArgs br_args;
  auto* bitrate_cmd = app.add_subcommand("bitrate", "Peak PHY bitrate from resource-grid parameters");
  bitrate_cmd->add_option("--n-rb", br_args.n_rb, "Resource blocks")->required();
  bitrate_cmd->add_option("--n-sub", br_args.n_sub, "Subcarriers per resource block");
  bitrate_cmd->add_option("--n-bits", br_args.n_bits, "Bits per modulation symbol")->required();
  bitrate_cmd->add_option("--n-sym", br_args.n_sym, "Symbols per subcarrier per second")->required();
  bitrate_cmd->add_option("--code-rate", br_args.code_rate, "Code rate in (0, 1]")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadArguments;
  }

  try {
    if (*eval) return cmd_eval(g, eval_args, out);
    if (*sweep_cmd) return cmd_sweep(g, sweep_args, out);
    if (*optimize_cmd) return cmd_optimize(g, opt_args, out);
    if (*emulate_cmd) return cmd_emulate(g, em_args, out);
    if (*serve_cmd) return cmd_serve(g, serve_args, out, err);
    if (*bitrate_cmd) return cmd_bitrate(g, br_args, out, err);
  } catch (const UsageError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kBadArguments;
  } catch (const ProfileError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kProfileError;
  } catch (const IoError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kIoError;
  } catch (const InfeasibleError& e) {
    fmt::print(err, "infeasible ({}): {}\n", e.constraint(), e.what());
    return kInfeasible;
  } catch (const ConnectionError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kNetworkError;
  } catch (const TimeoutError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kNetworkError;
  } catch (const ProtocolError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kNetworkError;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kBadArguments;
  }
  return kBadArguments;
}

}  // namespace offsim::cli
