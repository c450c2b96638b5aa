#ifndef SECAGG_WIRE_HPP
#define SECAGG_WIRE_HPP

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "secagg/bytes.hpp"

namespace secagg {

// The server is a distinguished party outside the user id space [0, n).
inline constexpr uint64_t kServerId = UINT64_MAX;

enum class MsgType : uint8_t {
  kBeacon = 1,          // server -> all: per-round public randomness
  kMaskedInput = 2,     // user -> server: blinded input vector
  kEncryptedKeyShare = 3,  // committee -> server -> neighbor: one share
  kU2Announce = 4,      // server -> committee: contributing-user set
  kPartialBlinding = 5, // committee -> server: summed masks
  kKdrop = 6,           // server -> backup: dropped-committee set
  kAck = 7,             // backup -> server: ack (semi-honest) or signature
  kAckBundle = 8,       // server -> backup: everyone's signatures
  kShareRelease = 9,    // backup -> server: decrypted share for a dropped id
  kPublish = 10,        // server -> all: output (plus proof in lisa-plus)
  kCommitment = 11,     // user -> server -> committee: commitments + sig
  kRhoSigma = 12,       // committee -> server: rho_j, C_j and signatures
};

inline std::string msg_type_name(MsgType t) {
  switch (t) {
    case MsgType::kBeacon: return "beacon";
    case MsgType::kMaskedInput: return "masked-input";
    case MsgType::kEncryptedKeyShare: return "encrypted-key-share";
    case MsgType::kU2Announce: return "u2-announce";
    case MsgType::kPartialBlinding: return "partial-blinding";
    case MsgType::kKdrop: return "k-drop";
    case MsgType::kAck: return "ack";
    case MsgType::kAckBundle: return "ack-bundle";
    case MsgType::kShareRelease: return "share-release";
    case MsgType::kPublish: return "publish";
    case MsgType::kCommitment: return "commitment";
    case MsgType::kRhoSigma: return "rho-sigma";
  }
  throw std::logic_error("msg_type_name: bad type");
}

inline MsgType msg_type_from_name(const std::string& s) {
  for (uint8_t v = 1; v <= 12; v++) {
    if (msg_type_name(MsgType(v)) == s) return MsgType(v);
  }
  throw std::invalid_argument("unknown message type: " + s);
}

struct Message {
  uint8_t round = 0;
  MsgType type = MsgType::kBeacon;
  uint64_t sender = 0;
  uint64_t receiver = 0;
  Bytes payload;

  // Framing: round(1) type(1) sender(8) receiver(8) length(4) payload.
  static constexpr size_t kHeaderSize = 22;
  size_t wire_size() const { return kHeaderSize + payload.size(); }
};

inline Bytes encode_message(const Message& m) {
  Bytes out;
  out.reserve(m.wire_size());
  out.push_back(m.round);
  out.push_back(uint8_t(m.type));
  put_be64(out, m.sender);
  put_be64(out, m.receiver);
  put_be32(out, uint32_t(m.payload.size()));
  append(out, m.payload);
  return out;
}

inline Message decode_message(const Bytes& b) {
  if (b.size() < Message::kHeaderSize)
    throw std::invalid_argument("decode_message: truncated header");
  Message m;
  size_t off = 0;
  m.round = b[off++];
  uint8_t t = b[off++];
  if (t < 1 || t > 12) throw std::invalid_argument("decode_message: bad type");
  m.type = MsgType(t);
  m.sender = get_be64(b, off);
  off += 8;
  m.receiver = get_be64(b, off);
  off += 8;
  uint32_t len = get_be32(b, off);
  off += 4;
  if (b.size() != off + len)
    throw std::invalid_argument("decode_message: bad payload length");
  m.payload.assign(b.begin() + off, b.end());
  return m;
}

// ---------------------------------------------------------------------------
// Canonical encodings. Signed sets use one fixed form so every party signs
// and verifies identical bytes: u32 count, then sorted ids as 8-byte
// big-endian words.

inline Bytes canonical_id_set(std::vector<uint64_t> ids) {
  std::sort(ids.begin(), ids.end());
  for (size_t i = 1; i < ids.size(); i++)
    if (ids[i] == ids[i - 1])
      throw std::invalid_argument("canonical_id_set: duplicate id");
  Bytes out;
  put_be32(out, uint32_t(ids.size()));
  for (uint64_t id : ids) put_be64(out, id);
  return out;
}

inline std::vector<uint64_t> parse_id_set(const Bytes& b, size_t& off) {
  uint32_t count = get_be32(b, off);
  if (off + size_t(count) * 8 > b.size())
    throw std::invalid_argument("parse_id_set: truncated ids");
  std::vector<uint64_t> ids(count);
  for (uint32_t i = 0; i < count; i++) ids[i] = get_be64(b, off);
  for (size_t i = 1; i < ids.size(); i++)
    if (ids[i] <= ids[i - 1])
      throw std::invalid_argument("parse_id_set: not strictly sorted");
  return ids;
}

inline std::vector<uint64_t> parse_id_set(const Bytes& b) {
  size_t off = 0;
  auto ids = parse_id_set(b, off);
  if (off != b.size())
    throw std::invalid_argument("parse_id_set: trailing bytes");
  return ids;
}

// Residue vectors: u32 count, then 8-byte big-endian words.
inline Bytes encode_vec64(const std::vector<uint64_t>& v) {
  Bytes out;
  put_be32(out, uint32_t(v.size()));
  for (uint64_t x : v) put_be64(out, x);
  return out;
}

inline std::vector<uint64_t> parse_vec64(const Bytes& b, size_t& off) {
  uint32_t count = get_be32(b, off);
  if (off + size_t(count) * 8 > b.size())
    throw std::invalid_argument("parse_vec64: truncated values");
  std::vector<uint64_t> v(count);
  for (uint32_t i = 0; i < count; i++) v[i] = get_be64(b, off);
  return v;
}

inline std::vector<uint64_t> parse_vec64(const Bytes& b) {
  size_t off = 0;
  auto v = parse_vec64(b, off);
  if (off != b.size())
    throw std::invalid_argument("parse_vec64: trailing bytes");
  return v;
}

// Length-prefixed byte string inside a payload.
inline void put_blob(Bytes& out, const Bytes& blob) {
  put_be32(out, uint32_t(blob.size()));
  append(out, blob);
}

inline Bytes get_blob(const Bytes& b, size_t& off) {
  uint32_t len = get_be32(b, off);
  if (off + len > b.size())
    throw std::invalid_argument("get_blob: truncated body");
  Bytes out(b.begin() + off, b.begin() + off + len);
  off += len;
  return out;
}

// ---------------------------------------------------------------------------
// Transcript lines: newline-delimited JSON with base64 payloads.

inline nlohmann::json message_to_json(const Message& m) {
  return nlohmann::json{
      {"round", m.round},
      {"type", msg_type_name(m.type)},
      {"sender", m.sender},
      {"receiver", m.receiver},
      {"bytes", m.wire_size()},
      {"payload", to_base64(m.payload)},
  };
}

inline Message message_from_json(const nlohmann::json& j) {
  Message m;
  m.round = j.at("round").get<uint8_t>();
  m.type = msg_type_from_name(j.at("type").get<std::string>());
  m.sender = j.at("sender").get<uint64_t>();
  m.receiver = j.at("receiver").get<uint64_t>();
  m.payload = from_base64(j.at("payload").get<std::string>());
  if (j.at("bytes").get<size_t>() != m.wire_size())
    throw std::invalid_argument("message_from_json: byte count mismatch");
  return m;
}

}  // namespace secagg

#endif  // SECAGG_WIRE_HPP
