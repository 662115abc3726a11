#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace vp {

enum class MsgType : std::uint8_t { Request = 0, Response = 1, Error = 2 };

inline constexpr std::uint8_t kFrameMagic0 = 0x56;  // 'V'
inline constexpr std::uint8_t kFrameMagic1 = 0x50;  // 'P'
inline constexpr std::uint8_t kProtocolVersion = 1;
inline constexpr std::size_t kFrameHeaderBytes = 16;

/// One protocol message. On the wire (little-endian): magic 0x56 0x50,
/// version u8, msg_type u8, request_id u64, payload_len u32, payload.
struct Frame {
  MsgType type = MsgType::Request;
  std::uint64_t request_id = 0;
  std::vector<std::uint8_t> payload;
};

struct FrameHeader {
  MsgType type = MsgType::Request;
  std::uint64_t request_id = 0;
  std::uint32_t payload_len = 0;
};

std::vector<std::uint8_t> encode_frame(const Frame& frame);

/// Validates magic, version and message type of the first 16 bytes.
/// Throws ProtocolError on a contract violation, CorruptPayloadError when
/// shorter than a header.
FrameHeader decode_frame_header(std::span<const std::uint8_t> bytes);

/// Decodes a whole buffer holding exactly one frame.
Frame decode_frame(std::span<const std::uint8_t> bytes);

/// Request payload helpers: the harness transports labeled samples as the
/// opaque input blob (sample_id u64, true_class u32, little-endian).
std::vector<std::uint8_t> encode_sample_blob(std::int64_t sample_id, int true_class);
void decode_sample_blob(std::span<const std::uint8_t> blob, std::int64_t& sample_id,
                        int& true_class);

}  // namespace vp
