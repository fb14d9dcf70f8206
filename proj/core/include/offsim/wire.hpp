// SPDX-License-Identifier: Apache-2.0
#pragma once

// Offload frame: 16-byte header followed by `payload_length` bytes.
//
//   0..3   magic "OFLD" (0x4F 0x46 0x4C 0x44)
//   4      version (0x01)
//   5      message type (0x01 TASK, 0x02 RESULT, 0x03 ERROR)
//   6      exit
//   7      split
//   8..15  payload length, little-endian uint64
//
// A RESULT payload starts with a little-endian uint16 class identifier; the
// rest is zero padding. An ERROR payload is a UTF-8 message.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace offsim::wire {

inline constexpr std::array<std::uint8_t, 4> kMagic{0x4F, 0x46, 0x4C, 0x44};
inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::size_t kHeaderSize = 16;
/// Larger payloads are rejected as protocol violations.
inline constexpr std::uint64_t kMaxPayload = std::uint64_t{1} << 28;

enum class MessageType : std::uint8_t {
  kTask = 0x01,
  kResult = 0x02,
  kError = 0x03,
};

struct FrameHeader {
  MessageType type = MessageType::kTask;
  std::uint8_t exit = 0;
  std::uint8_t split = 0;
  std::uint64_t payload_length = 0;

  friend bool operator==(const FrameHeader&, const FrameHeader&) = default;
};

std::array<std::uint8_t, kHeaderSize> encode_header(const FrameHeader& header);

/// Throws ProtocolError on bad magic, version, message type or length.
FrameHeader decode_header(std::span<const std::uint8_t, kHeaderSize> bytes);

/// Bytes a frame occupies for a volume given in kilobits, rounded to the
/// nearest byte.
std::uint64_t volume_bytes(double kilobits);

/// Payload length that makes the whole frame `total_bytes` long; never less
/// than `min_payload`.
std::uint64_t payload_for_total(std::uint64_t total_bytes, std::uint64_t min_payload = 0);

std::vector<std::uint8_t> result_payload(std::uint16_t class_id, std::uint64_t length);
std::uint16_t result_class(std::span<const std::uint8_t> payload);

}  // namespace offsim::wire
