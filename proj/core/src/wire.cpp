// SPDX-License-Identifier: Apache-2.0
#include "offsim/wire.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "offsim/errors.hpp"

namespace offsim::wire {

std::array<std::uint8_t, kHeaderSize> encode_header(const FrameHeader& header) {
  std::array<std::uint8_t, kHeaderSize> out{};
  std::copy(kMagic.begin(), kMagic.end(), out.begin());
  out[4] = kVersion;
  out[5] = static_cast<std::uint8_t>(header.type);
  out[6] = header.exit;
  out[7] = header.split;
  for (int i = 0; i < 8; ++i) out[8 + i] = static_cast<std::uint8_t>(header.payload_length >> (8 * i));
  return out;
}

FrameHeader decode_header(std::span<const std::uint8_t, kHeaderSize> bytes) {
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw ProtocolError(fmt::format("bad magic {:02x} {:02x} {:02x} {:02x}", bytes[0], bytes[1], bytes[2], bytes[3]));
  }
  if (bytes[4] != kVersion) throw ProtocolError(fmt::format("unsupported version {}", bytes[4]));
  if (bytes[5] < 0x01 || bytes[5] > 0x03) throw ProtocolError(fmt::format("unknown message type {}", bytes[5]));

  FrameHeader h;
  h.type = static_cast<MessageType>(bytes[5]);
  h.exit = bytes[6];
  h.split = bytes[7];
  for (int i = 0; i < 8; ++i) h.payload_length |= std::uint64_t{bytes[8 + i]} << (8 * i);
  if (h.payload_length > kMaxPayload) {
    throw ProtocolError(fmt::format("payload length {} exceeds limit {}", h.payload_length, kMaxPayload));
  }
  if (h.type == MessageType::kResult && h.payload_length < 2) {
    throw ProtocolError("result payload shorter than its class identifier");
  }
  return h;
}

std::uint64_t volume_bytes(double kilobits) {
  if (!(kilobits >= 0.0)) return 0;
  return static_cast<std::uint64_t>(std::llround(kilobits * 1000.0 / 8.0));
}

std::uint64_t payload_for_total(std::uint64_t total_bytes, std::uint64_t min_payload) {
  std::uint64_t payload = total_bytes > kHeaderSize ? total_bytes - kHeaderSize : 0;
  return std::max(payload, min_payload);
}

std::vector<std::uint8_t> result_payload(std::uint16_t class_id, std::uint64_t length) {
  std::vector<std::uint8_t> out(std::max<std::uint64_t>(length, 2), 0);
  out[0] = static_cast<std::uint8_t>(class_id & 0xFF);
  out[1] = static_cast<std::uint8_t>(class_id >> 8);
  return out;
}

std::uint16_t result_class(std::span<const std::uint8_t> payload) {
  if (payload.size() < 2) throw ProtocolError("result payload shorter than its class identifier");
  return static_cast<std::uint16_t>(payload[0] | (payload[1] << 8));
}

}  // namespace offsim::wire
