// SPDX-License-Identifier: Apache-2.0
#include "offsim/server.hpp"

#include <array>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "offsim/errors.hpp"
#include "offsim/token_bucket.hpp"
#include "offsim/wire.hpp"

namespace offsim {

namespace {
using Clock = std::chrono::steady_clock;
constexpr std::chrono::milliseconds kPollInterval{100};
}  // namespace

OffloadServer::OffloadServer(SystemProfile profile, ServerOptions options)
    : profile_(std::move(profile)), options_(std::move(options)), jitter_(options_.jitter, options_.seed) {
  profile_.validate();
}

void OffloadServer::bind() { listener_ = net::listen_on(net::Endpoint::parse(options_.endpoint)); }

std::uint16_t OffloadServer::port() const { return net::local_port(listener_); }

void OffloadServer::serve(const std::atomic<bool>& stop) {
  if (!listener_) bind();
  while (!stop.load()) {
    auto conn = net::accept_for(listener_, kPollInterval);
    if (conn) handle_connection(std::move(*conn), stop);
  }
}

void OffloadServer::reject(const net::Socket& conn, const std::string& message) {
  if (options_.log) fmt::print(*options_.log, "reject: {}\n", message);
  wire::FrameHeader h{wire::MessageType::kError, 0, 0, message.size()};
  auto header = wire::encode_header(h);
  try {
    net::send_all(conn, header, options_.stage_timeout);
    net::send_all(conn, std::span(reinterpret_cast<const std::uint8_t*>(message.data()), message.size()),
                  options_.stage_timeout);
  } catch (const Error&) {
    // Peer may already be gone.
  }
}

void OffloadServer::handle_connection(net::Socket conn, const std::atomic<bool>& stop) {
  const auto& net_profile = profile_.network;
  const double rate_dl = options_.shaping_rate_dl > 0.0 ? options_.shaping_rate_dl : net_profile.b_dl_bps();

  while (!stop.load()) {
    // Idle between rounds: poll so an interrupt is noticed.
    if (!net::wait_readable(conn, kPollInterval)) continue;

    std::array<std::uint8_t, wire::kHeaderSize> raw{};
    wire::FrameHeader task;
    try {
      net::recv_exact(conn, raw, options_.stage_timeout);
      task = wire::decode_header(raw);
    } catch (const ProtocolError& e) {
      reject(conn, e.what());
      return;
    } catch (const Error&) {
      return;  // closed or stalled peer
    }

    const ExecutionPlan plan{task.exit, task.split};
    std::string problem;
    if (task.type != wire::MessageType::kTask) {
      problem = "expected a TASK frame";
    } else if (plan.exit < 1 || plan.exit > profile_.topology.num_exits || plan.split > profile_.topology.num_splits) {
      problem = fmt::format("plan exit={} split={} outside the server topology", plan.exit, plan.split);
    } else if (!plan.offload_active()) {
      problem = fmt::format("plan exit={} split={} has nothing to offload", plan.exit, plan.split);
    }
    if (!problem.empty()) {
      reject(conn, problem);
      return;
    }

    try {
      net::recv_discard(conn, task.payload_length, options_.stage_timeout);
      const auto received = Clock::now();

      const double service = mec_service_time(plan, profile_, &jitter_);
      std::this_thread::sleep_until(received + std::chrono::duration_cast<Clock::duration>(
                                                   std::chrono::duration<double>(service)));

      const auto& entry = profile_.splits.at(plan.split);
      const std::uint64_t dl_total = wire::volume_bytes(entry.d_dl_kb);
      wire::FrameHeader result{wire::MessageType::kResult, task.exit, task.split,
                               wire::payload_for_total(dl_total, 2)};
      const auto origin = Clock::now();
      TokenBucket bucket(rate_dl, options_.burst_bytes);
      net::send_shaped(conn, wire::encode_header(result), bucket, origin, options_.stage_timeout);
      std::this_thread::sleep_for(std::chrono::duration<double>(jitter_.apply(net_profile.d_dl_s(), kJitterDownlink)));
      const auto class_id = static_cast<std::uint16_t>(rounds_.load() % 43);
      auto payload = wire::result_payload(class_id, result.payload_length);
      net::send_shaped(conn, payload, bucket, origin, options_.stage_timeout);

      ++rounds_;
      if (options_.log) {
        fmt::print(*options_.log, "round exit={} split={} ul_bytes={} dl_bytes={} service_ms={:.3f}\n", plan.exit,
                   plan.split, wire::kHeaderSize + task.payload_length, wire::kHeaderSize + result.payload_length,
                   service * 1e3);
        options_.log->flush();
      }
    } catch (const Error& e) {
      if (options_.log) fmt::print(*options_.log, "connection dropped: {}\n", e.what());
      return;
    }
  }
}

}  // namespace offsim
