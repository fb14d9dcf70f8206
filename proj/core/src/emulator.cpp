// SPDX-License-Identifier: Apache-2.0
#include "offsim/emulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "offsim/cost_model.hpp"
#include "offsim/errors.hpp"
#include "offsim/token_bucket.hpp"
#include "offsim/transport.hpp"
#include "offsim/wire.hpp"

namespace offsim {

// ---------------------------------------------------------------------------
// Jitter

namespace {

double parse_ms(std::string_view text, const char* what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v) || v < 0.0) {
    throw ValidationError("jitter", fmt::format("invalid {} '{}'", what, text));
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

}  // namespace

JitterSpec JitterSpec::parse(std::string_view text) {
  JitterSpec spec;
  if (text.empty() || text == "none") return spec;

  std::string_view body = text;
  if (auto at = text.find('@'); at != std::string_view::npos) {
    body = text.substr(0, at);
    spec.targets = 0;
    for (auto t : split(text.substr(at + 1), ',')) {
      if (t == "ul") {
        spec.targets |= kJitterUplink;
      } else if (t == "dl") {
        spec.targets |= kJitterDownlink;
      } else if (t == "dev") {
        spec.targets |= kJitterDevice;
      } else if (t == "mec") {
        spec.targets |= kJitterMec;
      } else {
        throw ValidationError("jitter", fmt::format("unknown jitter target '{}' (ul, dl, dev, mec)", t));
      }
    }
  }

  auto parts = split(body, ':');
  if (parts[0] == "gaussian" && parts.size() == 2) {
    spec.kind = Kind::kGaussian;
    spec.scale_s = units::ms_to_s(parse_ms(parts[1], "sigma"));
  } else if (parts[0] == "lognormal" && parts.size() == 3) {
    spec.kind = Kind::kLognormal;
    spec.scale_s = units::ms_to_s(parse_ms(parts[1], "median"));
    spec.shape = parse_ms(parts[2], "shape");
  } else {
    throw ValidationError("jitter",
                          fmt::format("expected none, gaussian:<sigma_ms> or lognormal:<median_ms>:<shape>, got '{}'",
                                      text));
  }
  return spec;
}

std::string JitterSpec::str() const {
  std::string out;
  switch (kind) {
    case Kind::kNone: return "none";
    case Kind::kGaussian: out = fmt::format("gaussian:{}", units::s_to_ms(scale_s)); break;
    case Kind::kLognormal: out = fmt::format("lognormal:{}:{}", units::s_to_ms(scale_s), shape); break;
  }
  if (targets != kJitterAll) {
    std::vector<std::string_view> names;
    if (targets & kJitterUplink) names.push_back("ul");
    if (targets & kJitterDownlink) names.push_back("dl");
    if (targets & kJitterDevice) names.push_back("dev");
    if (targets & kJitterMec) names.push_back("mec");
    out += fmt::format("@{}", fmt::join(names, ","));
  }
  return out;
}

double JitterSampler::apply(double base_s, JitterTarget target) {
  if (spec_.kind == JitterSpec::Kind::kNone || !(spec_.targets & target)) return base_s;
  const double z = normal_(rng_);
  if (spec_.kind == JitterSpec::Kind::kGaussian) return std::max(0.0, base_s + spec_.scale_s * z);
  return base_s + spec_.scale_s * std::exp(spec_.shape * z);
}

// ---------------------------------------------------------------------------
// Traces

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::kPrepStart: return "prep_start";
    case Stage::kPrepEnd: return "prep_end";
    case Stage::kUlStart: return "ul_start";
    case Stage::kUlEnd: return "ul_end";
    case Stage::kSegStart: return "seg_start";
    case Stage::kSegEnd: return "seg_end";
    case Stage::kMecStart: return "mec_start";
    case Stage::kMecEnd: return "mec_end";
    case Stage::kDlStart: return "dl_start";
    case Stage::kDlEnd: return "dl_end";
    case Stage::kDone: return "done";
  }
  return "done";
}

std::string EmulationTrace::to_text() const {
  std::string out = fmt::format("plan exit={} split={}\n", plan.exit, plan.split);
  for (const auto& e : events) {
    if (e.stage == Stage::kSegStart || e.stage == Stage::kSegEnd) {
      out += fmt::format("{} {} {}\n", e.time_ps, to_string(e.stage), e.segment);
    } else {
      out += fmt::format("{} {}\n", e.time_ps, to_string(e.stage));
    }
  }
  return out;
}

double mec_service_time(const ExecutionPlan& plan, const SystemProfile& profile, JitterSampler* sampler) {
  const auto& c = profile.compute;
  double total = 0.0;
  for (int i = plan.split + 1; i <= plan.exit; ++i) {
    double overhead = sampler ? sampler->apply(c.d_mec_s(), kJitterMec) : c.d_mec_s();
    total += overhead + profile.splits.segment_flop(i) / c.c_mec_flops();
  }
  return total;
}

// ---------------------------------------------------------------------------
// Event mode

namespace {

std::int64_t to_ps(double seconds) { return static_cast<std::int64_t>(std::llround(seconds * 1e12)); }

class VirtualTimeline {
 public:
  explicit VirtualTimeline(EmulationTrace& trace) : trace_(trace) {}

  void mark(Stage stage, int segment = 0) { trace_.events.push_back({now_ps_, stage, segment}); }
  void advance(double seconds) { now_ps_ += to_ps(seconds); }

  // Brackets a stage of `seconds` between two events.
  void stage(Stage start, Stage end, double seconds, int segment = 0) {
    mark(start, segment);
    advance(seconds);
    mark(end, segment);
  }

  std::int64_t now_ps() const { return now_ps_; }

 private:
  EmulationTrace& trace_;
  std::int64_t now_ps_ = 0;
};

}  // namespace

EmulationTrace emulate_event(const ExecutionPlan& plan, const SystemProfile& profile, const EmulationConfig& cfg) {
  if (cfg.mode != EmulationMode::kEvent) throw DomainError("emulate_event requires event mode");
  profile.validate_plan(plan);

  const auto& c = profile.compute;
  const auto& net = profile.network;
  JitterSampler jitter(cfg.jitter, cfg.seed);

  EmulationTrace trace;
  trace.plan = plan;
  VirtualTimeline tl(trace);

  const int local_end = std::min(plan.split, plan.exit);
  for (int i = 1; i <= local_end; ++i) {
    double d = jitter.apply(c.d_dev_s(), kJitterDevice) + profile.splits.segment_flop(i) / c.c_dev_flops();
    tl.stage(Stage::kSegStart, Stage::kSegEnd, d, i);
  }

  if (plan.offload_active()) {
    const auto& entry = profile.splits.at(plan.split);
    tl.stage(Stage::kPrepStart, Stage::kPrepEnd, preprocessing_delay(plan, profile));

    double ul = jitter.apply(net.d_ul_s(), kJitterUplink) + entry.ul_bits() / net.b_ul_bps();
    tl.stage(Stage::kUlStart, Stage::kUlEnd, ul);

    tl.mark(Stage::kMecStart);
    for (int i = plan.split + 1; i <= plan.exit; ++i) {
      double d = jitter.apply(c.d_mec_s(), kJitterMec) + profile.splits.segment_flop(i) / c.c_mec_flops();
      tl.stage(Stage::kSegStart, Stage::kSegEnd, d, i);
    }
    tl.mark(Stage::kMecEnd);

    double dl = jitter.apply(net.d_dl_s(), kJitterDownlink) + entry.dl_bits() / net.b_dl_bps();
    tl.stage(Stage::kDlStart, Stage::kDlEnd, dl);
  }

  tl.mark(Stage::kDone);
  trace.measured_total = trace.events.back().seconds();
  return trace;
}

// ---------------------------------------------------------------------------
// Socket mode

namespace {

using Clock = std::chrono::steady_clock;

class WallTimeline {
 public:
  WallTimeline(EmulationTrace& trace, Clock::time_point origin) : trace_(trace), origin_(origin) {}

  void mark(Stage stage, int segment = 0) {
    auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - origin_).count();
    trace_.events.push_back({static_cast<std::int64_t>(ns) * 1000, stage, segment});
  }

  // Sleeps for `seconds` measured from the end of the previous timed stage,
  // so oversleeping does not accumulate.
  void wait(double seconds) {
    target_ += std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(seconds));
    target_ = std::max(target_, Clock::now() - origin_);
    std::this_thread::sleep_until(origin_ + target_);
  }

  void resync() { target_ = Clock::now() - origin_; }

 private:
  EmulationTrace& trace_;
  Clock::time_point origin_;
  Clock::duration target_{};
};

}  // namespace

EmulationTrace emulate_socket(const ExecutionPlan& plan, const SystemProfile& profile, const EmulationConfig& cfg) {
  if (cfg.mode != EmulationMode::kSocket) throw DomainError("emulate_socket requires socket mode");
  profile.validate_plan(plan);

  const auto& c = profile.compute;
  const auto& net = profile.network;
  const double rate_ul = cfg.shaping_rate_ul > 0.0 ? cfg.shaping_rate_ul : net.b_ul_bps();
  JitterSampler jitter(cfg.jitter, cfg.seed);

  net::Socket conn;
  if (plan.offload_active()) conn = net::connect_to(net::Endpoint::parse(cfg.endpoint), cfg.stage_timeout);

  EmulationTrace trace;
  trace.plan = plan;
  const auto origin = Clock::now();
  WallTimeline tl(trace, origin);

  const int local_end = std::min(plan.split, plan.exit);
  for (int i = 1; i <= local_end; ++i) {
    double d = jitter.apply(c.d_dev_s(), kJitterDevice) + profile.splits.segment_flop(i) / c.c_dev_flops();
    tl.mark(Stage::kSegStart, i);
    tl.wait(d);
    tl.mark(Stage::kSegEnd, i);
  }

  if (plan.offload_active()) {
    const auto& entry = profile.splits.at(plan.split);
    tl.mark(Stage::kPrepStart);
    tl.wait(preprocessing_delay(plan, profile));
    tl.mark(Stage::kPrepEnd);

    tl.mark(Stage::kUlStart);
    tl.wait(jitter.apply(net.d_ul_s(), kJitterUplink));
    const std::uint64_t ul_total = wire::volume_bytes(entry.d_ul_kb);
    wire::FrameHeader task{wire::MessageType::kTask, static_cast<std::uint8_t>(plan.exit),
                           static_cast<std::uint8_t>(plan.split), wire::payload_for_total(ul_total)};
    auto header = wire::encode_header(task);
    TokenBucket bucket(rate_ul, cfg.burst_bytes, std::chrono::duration_cast<TokenBucket::Duration>(Clock::now() - origin));
    net::send_shaped(conn, header, bucket, origin, cfg.stage_timeout);
    net::send_zeros_shaped(conn, task.payload_length, bucket, origin, cfg.stage_timeout);
    tl.mark(Stage::kUlEnd);

    // The server replies with the header as soon as MEC compute finishes.
    tl.mark(Stage::kMecStart);
    std::array<std::uint8_t, wire::kHeaderSize> reply{};
    net::recv_exact(conn, reply, cfg.stage_timeout);
    tl.mark(Stage::kMecEnd);
    tl.mark(Stage::kDlStart);
    wire::FrameHeader result = wire::decode_header(reply);
    if (result.type == wire::MessageType::kError) {
      std::string msg(static_cast<std::size_t>(std::min<std::uint64_t>(result.payload_length, 4096)), '\0');
      net::recv_exact(conn, std::span(reinterpret_cast<std::uint8_t*>(msg.data()), msg.size()), cfg.stage_timeout);
      throw ProtocolError("server rejected task: " + msg);
    }
    if (result.type != wire::MessageType::kResult || result.exit != task.exit || result.split != task.split) {
      throw ProtocolError("unexpected reply frame");
    }
    std::array<std::uint8_t, 2> class_id{};
    net::recv_exact(conn, class_id, cfg.stage_timeout);
    net::recv_discard(conn, result.payload_length - 2, cfg.stage_timeout);
    tl.mark(Stage::kDlEnd);
  }

  tl.mark(Stage::kDone);
  trace.measured_total = trace.events.back().seconds();
  return trace;
}

EmulationTrace emulate(const ExecutionPlan& plan, const SystemProfile& profile, const EmulationConfig& cfg) {
  return cfg.mode == EmulationMode::kEvent ? emulate_event(plan, profile, cfg) : emulate_socket(plan, profile, cfg);
}

TrialSummary run_trials(const ExecutionPlan& plan, const SystemProfile& profile, const EmulationConfig& cfg, int n) {
  if (n < 1) throw DomainError("trial count must be at least 1");
  TrialSummary s;
  s.totals.reserve(static_cast<std::size_t>(n));

  double m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    EmulationConfig trial_cfg = cfg;
    trial_cfg.seed = cfg.seed + static_cast<std::uint64_t>(i);
    double total = 0.0;
    try {
      total = emulate(plan, profile, trial_cfg).measured_total;
    } catch (const ConnectionError& e) {
      throw ConnectionError(fmt::format("trial {}: {}", i, e.what()));
    } catch (const TimeoutError& e) {
      throw TimeoutError(fmt::format("trial {}: {}", i, e.what()));
    } catch (const ProtocolError& e) {
      throw ProtocolError(fmt::format("trial {}: {}", i, e.what()));
    }
    s.totals.push_back(total);
    // Welford; identical inputs give an exact mean and zero spread.
    const double delta = total - s.mean;
    s.mean += delta / static_cast<double>(i + 1);
    m2 += delta * (total - s.mean);
  }
  s.stddev = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0;
  auto [lo, hi] = std::minmax_element(s.totals.begin(), s.totals.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

}  // namespace offsim
