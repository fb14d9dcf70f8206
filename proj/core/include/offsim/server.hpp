// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <ostream>
#include <string>

#include "offsim/emulator.hpp"
#include "offsim/profiles.hpp"
#include "offsim/transport.hpp"

namespace offsim {

struct ServerOptions {
  std::string endpoint = "127.0.0.1:7878";
  /// Downlink token-bucket rate in bit/s; 0 means the profile's b_dl.
  double shaping_rate_dl = 0.0;
  std::size_t burst_bytes = 1500;
  JitterSpec jitter;
  std::uint64_t seed = 0;
  std::chrono::milliseconds stage_timeout{30000};
  /// One line per served round or rejected frame; null for silence.
  std::ostream* log = nullptr;
};

/// MEC side of socket-mode emulation. Serves one connection at a time; each
/// TASK frame is answered after the MEC compute time with a RESULT frame of
/// the split's downlink volume. A malformed frame is answered with an ERROR
/// frame and the connection is closed; the server keeps listening.
class OffloadServer {
 public:
  OffloadServer(SystemProfile profile, ServerOptions options);

  /// Binds the listening socket. Throws ConnectionError on failure.
  void bind();
  /// Port actually bound (useful with port 0).
  std::uint16_t port() const;

  /// Accepts and serves connections until `stop` becomes true. A round in
  /// progress is finished before returning.
  void serve(const std::atomic<bool>& stop);

  std::uint64_t rounds_served() const { return rounds_.load(); }

 private:
  void handle_connection(net::Socket conn, const std::atomic<bool>& stop);
  void reject(const net::Socket& conn, const std::string& message);

  SystemProfile profile_;
  ServerOptions options_;
  net::Socket listener_;
  JitterSampler jitter_;
  std::atomic<std::uint64_t> rounds_{0};
};

}  // namespace offsim
