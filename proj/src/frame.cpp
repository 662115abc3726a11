#include "vp/frame.hpp"

#include <string>

#include "vp/errors.hpp"

namespace vp {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[at + i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[at + i]) << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_frame(const Frame& frame) {
  std::vector<std::uint8_t> out;
  out.reserve(kFrameHeaderBytes + frame.payload.size());
  out.push_back(kFrameMagic0);
  out.push_back(kFrameMagic1);
  out.push_back(kProtocolVersion);
  out.push_back(static_cast<std::uint8_t>(frame.type));
  put_u64(out, frame.request_id);
  put_u32(out, static_cast<std::uint32_t>(frame.payload.size()));
  out.insert(out.end(), frame.payload.begin(), frame.payload.end());
  return out;
}

FrameHeader decode_frame_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFrameHeaderBytes) {
    throw CorruptPayloadError("frame shorter than its 16-byte header");
  }
  if (bytes[0] != kFrameMagic0 || bytes[1] != kFrameMagic1) {
    throw ProtocolError("bad frame magic");
  }
  if (bytes[2] != kProtocolVersion) {
    throw ProtocolError("unsupported protocol version " + std::to_string(bytes[2]));
  }
  if (bytes[3] > static_cast<std::uint8_t>(MsgType::Error)) {
    throw ProtocolError("unknown message type " + std::to_string(bytes[3]));
  }
  FrameHeader header;
  header.type = static_cast<MsgType>(bytes[3]);
  header.request_id = get_u64(bytes, 4);
  header.payload_len = get_u32(bytes, 12);
  return header;
}

Frame decode_frame(std::span<const std::uint8_t> bytes) {
  const FrameHeader header = decode_frame_header(bytes);
  if (bytes.size() != kFrameHeaderBytes + header.payload_len) {
    throw CorruptPayloadError("frame length does not match declared payload_len");
  }
  Frame frame;
  frame.type = header.type;
  frame.request_id = header.request_id;
  frame.payload.assign(bytes.begin() + kFrameHeaderBytes, bytes.end());
  return frame;
}

std::vector<std::uint8_t> encode_sample_blob(std::int64_t sample_id, int true_class) {
  std::vector<std::uint8_t> blob;
  put_u64(blob, static_cast<std::uint64_t>(sample_id));
  put_u32(blob, static_cast<std::uint32_t>(true_class));
  return blob;
}

void decode_sample_blob(std::span<const std::uint8_t> blob, std::int64_t& sample_id,
                        int& true_class) {
  if (blob.size() != 12) throw CorruptPayloadError("sample blob must be 12 bytes");
  sample_id = static_cast<std::int64_t>(get_u64(blob, 0));
  true_class = static_cast<int>(get_u32(blob, 8));
}

}  // namespace vp
