// SPDX-License-Identifier: Apache-2.0
#include "offsim/transport.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "offsim/errors.hpp"

namespace offsim::net {

namespace {

using Clock = std::chrono::steady_clock;

std::string errno_text(int err) { return std::strerror(err); }

int remaining_ms(Clock::time_point deadline) {
  auto left = std::chrono::duration_cast<Millis>(deadline - Clock::now()).count();
  return static_cast<int>(std::clamp<long long>(left, 0, 1 << 30));
}

// poll() until `events` is ready or the deadline passes.
bool poll_until(int fd, short events, Clock::time_point deadline) {
  while (true) {
    pollfd p{fd, events, 0};
    int rc = ::poll(&p, 1, remaining_ms(deadline));
    if (rc > 0) return true;
    if (rc == 0) {
      if (Clock::now() >= deadline) return false;
      continue;
    }
    if (errno == EINTR) continue;
    throw ConnectionError("poll: " + errno_text(errno));
  }
}

sockaddr_in resolve(const Endpoint& ep) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  int rc = ::getaddrinfo(ep.host.c_str(), nullptr, &hints, &res);
  if (rc != 0 || !res) throw ConnectionError(fmt::format("cannot resolve '{}': {}", ep.host, ::gai_strerror(rc)));
  sockaddr_in addr{};
  std::memcpy(&addr, res->ai_addr, sizeof(addr));
  ::freeaddrinfo(res);
  addr.sin_port = htons(ep.port);
  return addr;
}

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

}  // namespace

Endpoint Endpoint::parse(std::string_view text) {
  auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 >= text.size()) {
    throw ValidationError("endpoint", "expected host:port, got '" + std::string(text) + "'");
  }
  unsigned port = 0;
  auto digits = text.substr(colon + 1);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || port > 65535) {
    throw ValidationError("endpoint", "invalid port in '" + std::string(text) + "'");
  }
  return Endpoint{std::string(text.substr(0, colon)), static_cast<std::uint16_t>(port)};
}

std::string Endpoint::str() const { return fmt::format("{}:{}", host, port); }

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = other.release();
  }
  return *this;
}

int Socket::release() noexcept {
  int fd = fd_;
  fd_ = -1;
  return fd;
}

void Socket::close() noexcept {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

Socket connect_to(const Endpoint& endpoint, Millis timeout) {
  sockaddr_in addr = resolve(endpoint);
  Socket s(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!s) throw ConnectionError("socket: " + errno_text(errno));

  int flags = ::fcntl(s.fd(), F_GETFL, 0);
  ::fcntl(s.fd(), F_SETFL, flags | O_NONBLOCK);
  int rc = ::connect(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr));
  if (rc != 0 && errno != EINPROGRESS) {
    throw ConnectionError(fmt::format("connect to {}: {}", endpoint.str(), errno_text(errno)));
  }
  if (rc != 0) {
    if (!poll_until(s.fd(), POLLOUT, Clock::now() + timeout)) {
      throw TimeoutError(fmt::format("connect to {} timed out", endpoint.str()));
    }
    int err = 0;
    socklen_t len = sizeof(err);
    ::getsockopt(s.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
    if (err != 0) throw ConnectionError(fmt::format("connect to {}: {}", endpoint.str(), errno_text(err)));
  }
  ::fcntl(s.fd(), F_SETFL, flags);
  set_nodelay(s.fd());
  return s;
}

Socket listen_on(const Endpoint& endpoint, int backlog) {
  sockaddr_in addr = resolve(endpoint);
  Socket s(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!s) throw ConnectionError("socket: " + errno_text(errno));
  int one = 1;
  ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
    throw ConnectionError(fmt::format("bind {}: {}", endpoint.str(), errno_text(errno)));
  }
  if (::listen(s.fd(), backlog) != 0) throw ConnectionError("listen: " + errno_text(errno));
  return s;
}

std::uint16_t local_port(const Socket& socket) {
  sockaddr_in addr{};
  socklen_t len = sizeof(addr);
  if (::getsockname(socket.fd(), reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
    throw ConnectionError("getsockname: " + errno_text(errno));
  }
  return ntohs(addr.sin_port);
}

std::optional<Socket> accept_for(const Socket& listener, Millis timeout) {
  if (!poll_until(listener.fd(), POLLIN, Clock::now() + timeout)) return std::nullopt;
  int fd = ::accept4(listener.fd(), nullptr, nullptr, SOCK_CLOEXEC);
  if (fd < 0) {
    if (errno == EINTR || errno == EAGAIN || errno == ECONNABORTED) return std::nullopt;
    throw ConnectionError("accept: " + errno_text(errno));
  }
  set_nodelay(fd);
  return Socket(fd);
}

bool wait_readable(const Socket& socket, Millis timeout) {
  return poll_until(socket.fd(), POLLIN, Clock::now() + timeout);
}

void send_all(const Socket& socket, std::span<const std::uint8_t> data, Millis timeout) {
  const auto deadline = Clock::now() + timeout;
  std::size_t sent = 0;
  while (sent < data.size()) {
    if (!poll_until(socket.fd(), POLLOUT, deadline)) throw TimeoutError("send timed out");
    ssize_t n = ::send(socket.fd(), data.data() + sent, data.size() - sent, MSG_NOSIGNAL | MSG_DONTWAIT);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN || errno == EWOULDBLOCK) continue;
      throw ConnectionError("send: " + errno_text(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
}

void send_shaped(const Socket& socket, std::span<const std::uint8_t> data, TokenBucket& bucket,
                 Clock::time_point origin, Millis timeout) {
  const auto deadline = Clock::now() + timeout;
  std::size_t offset = 0;
  while (offset < data.size()) {
    std::size_t chunk = std::min(bucket.burst_bytes(), data.size() - offset);
    auto now = std::chrono::duration_cast<TokenBucket::Duration>(Clock::now() - origin);
    auto release = origin + bucket.reserve(chunk, now);
    if (release > deadline) throw TimeoutError("shaped send would exceed the stage deadline");
    std::this_thread::sleep_until(release);
    send_all(socket, data.subspan(offset, chunk), std::chrono::duration_cast<Millis>(deadline - Clock::now()));
    offset += chunk;
  }
}

void send_zeros_shaped(const Socket& socket, std::uint64_t count, TokenBucket& bucket, Clock::time_point origin,
                       Millis timeout) {
  const auto deadline = Clock::now() + timeout;
  std::vector<std::uint8_t> zeros(bucket.burst_bytes(), 0);
  while (count > 0) {
    std::size_t chunk = static_cast<std::size_t>(std::min<std::uint64_t>(zeros.size(), count));
    send_shaped(socket, std::span(zeros).first(chunk), bucket, origin,
                std::max(Millis(0), std::chrono::duration_cast<Millis>(deadline - Clock::now())));
    count -= chunk;
  }
}

void recv_exact(const Socket& socket, std::span<std::uint8_t> out, Millis timeout) {
  const auto deadline = Clock::now() + timeout;
  std::size_t got = 0;
  while (got < out.size()) {
    if (!poll_until(socket.fd(), POLLIN, deadline)) throw TimeoutError("receive timed out");
    ssize_t n = ::recv(socket.fd(), out.data() + got, out.size() - got, MSG_DONTWAIT);
    if (n == 0) throw ConnectionError("peer closed the connection");
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN || errno == EWOULDBLOCK) continue;
      throw ConnectionError("recv: " + errno_text(errno));
    }
    got += static_cast<std::size_t>(n);
  }
}

void recv_discard(const Socket& socket, std::uint64_t count, Millis timeout) {
  const auto deadline = Clock::now() + timeout;
  std::array<std::uint8_t, 16384> buf{};
  while (count > 0) {
    std::size_t chunk = static_cast<std::size_t>(std::min<std::uint64_t>(buf.size(), count));
    recv_exact(socket, std::span(buf).first(chunk),
               std::max(Millis(0), std::chrono::duration_cast<Millis>(deadline - Clock::now())));
    count -= chunk;
  }
}

}  // namespace offsim::net
