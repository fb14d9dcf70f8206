// SPDX-License-Identifier: Apache-2.0
#pragma once

// Blocking TCP helpers with per-call deadlines (POSIX sockets).

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "offsim/token_bucket.hpp"

namespace offsim::net {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 7878;

  /// "host:port"; throws ValidationError("endpoint", ...) when malformed.
  static Endpoint parse(std::string_view text);
  std::string str() const;
};

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  Socket(Socket&& other) noexcept : fd_(other.release()) {}
  Socket& operator=(Socket&& other) noexcept;
  ~Socket() { close(); }

  int fd() const { return fd_; }
  explicit operator bool() const { return fd_ >= 0; }
  int release() noexcept;
  void close() noexcept;

 private:
  int fd_ = -1;
};

using Millis = std::chrono::milliseconds;

/// Throws ConnectionError when refused/unreachable, TimeoutError on timeout.
Socket connect_to(const Endpoint& endpoint, Millis timeout);

/// Throws ConnectionError when the address cannot be bound.
Socket listen_on(const Endpoint& endpoint, int backlog = 4);

std::uint16_t local_port(const Socket& socket);

/// Empty when nothing arrived within `timeout`.
std::optional<Socket> accept_for(const Socket& listener, Millis timeout);

/// True when the socket is readable (data or EOF) within `timeout`.
bool wait_readable(const Socket& socket, Millis timeout);

/// Throws ConnectionError on a closed peer, TimeoutError past the deadline.
void send_all(const Socket& socket, std::span<const std::uint8_t> data, Millis timeout);

/// Sends in chunks of at most the bucket's burst size, each released at
/// the time the bucket grants. `origin` is the bucket's time zero.
void send_shaped(const Socket& socket, std::span<const std::uint8_t> data, TokenBucket& bucket,
                 std::chrono::steady_clock::time_point origin, Millis timeout);

/// Sends `count` zero bytes through the bucket.
void send_zeros_shaped(const Socket& socket, std::uint64_t count, TokenBucket& bucket,
                       std::chrono::steady_clock::time_point origin, Millis timeout);

/// Fills `out` entirely. Throws ConnectionError on EOF, TimeoutError past
/// the deadline.
void recv_exact(const Socket& socket, std::span<std::uint8_t> out, Millis timeout);

/// Reads and drops `count` bytes.
void recv_discard(const Socket& socket, std::uint64_t count, Millis timeout);

}  // namespace offsim::net
