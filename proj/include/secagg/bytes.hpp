#ifndef SECAGG_BYTES_HPP
#define SECAGG_BYTES_HPP

#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace secagg {

using Bytes = std::vector<uint8_t>;

inline Bytes to_bytes(std::string_view s) {
  return Bytes(s.begin(), s.end());
}

inline void append(Bytes& out, const Bytes& more) {
  out.insert(out.end(), more.begin(), more.end());
}

inline void append(Bytes& out, std::string_view s) {
  out.insert(out.end(), s.begin(), s.end());
}

// Fixed-width big-endian integer encoding; the wire format uses no other
// integer representation.
inline void put_be32(Bytes& out, uint32_t v) {
  out.push_back(uint8_t(v >> 24));
  out.push_back(uint8_t(v >> 16));
  out.push_back(uint8_t(v >> 8));
  out.push_back(uint8_t(v));
}

inline void put_be64(Bytes& out, uint64_t v) {
  put_be32(out, uint32_t(v >> 32));
  put_be32(out, uint32_t(v));
}

inline uint32_t get_be32(const uint8_t* p) {
  return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) |
         (uint32_t(p[2]) << 8) | uint32_t(p[3]);
}

inline uint64_t get_be64(const uint8_t* p) {
  return (uint64_t(get_be32(p)) << 32) | get_be32(p + 4);
}

// Cursor-style reads: advance `off` past the consumed bytes, throw on
// truncated input.
inline uint32_t get_be32(const Bytes& b, size_t& off) {
  if (off + 4 > b.size()) throw std::invalid_argument("get_be32: truncated");
  uint32_t v = get_be32(b.data() + off);
  off += 4;
  return v;
}

inline uint64_t get_be64(const Bytes& b, size_t& off) {
  if (off + 8 > b.size()) throw std::invalid_argument("get_be64: truncated");
  uint64_t v = get_be64(b.data() + off);
  off += 8;
  return v;
}

inline Bytes be64(uint64_t v) {
  Bytes b;
  put_be64(b, v);
  return b;
}

inline std::string to_hex(const Bytes& b) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(b.size() * 2);
  for (uint8_t c : b) {
    s.push_back(digits[c >> 4]);
    s.push_back(digits[c & 0xf]);
  }
  return s;
}

inline Bytes from_hex(std::string_view s) {
  auto nib = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument("from_hex: bad digit");
  };
  if (s.size() % 2) throw std::invalid_argument("from_hex: odd length");
  Bytes b(s.size() / 2);
  for (size_t i = 0; i < b.size(); i++)
    b[i] = uint8_t(nib(s[2 * i]) << 4 | nib(s[2 * i + 1]));
  return b;
}

inline std::string to_base64(const Bytes& in) {
  static const char* tab =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((in.size() + 2) / 3 * 4);
  size_t i = 0;
  for (; i + 3 <= in.size(); i += 3) {
    uint32_t v = in[i] << 16 | in[i + 1] << 8 | in[i + 2];
    out.push_back(tab[v >> 18]);
    out.push_back(tab[(v >> 12) & 63]);
    out.push_back(tab[(v >> 6) & 63]);
    out.push_back(tab[v & 63]);
  }
  if (i + 1 == in.size()) {
    uint32_t v = in[i] << 16;
    out.push_back(tab[v >> 18]);
    out.push_back(tab[(v >> 12) & 63]);
    out.append("==");
  } else if (i + 2 == in.size()) {
    uint32_t v = in[i] << 16 | in[i + 1] << 8;
    out.push_back(tab[v >> 18]);
    out.push_back(tab[(v >> 12) & 63]);
    out.push_back(tab[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

inline Bytes from_base64(std::string_view s) {
  auto val = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    throw std::invalid_argument("from_base64: bad character");
  };
  if (s.size() % 4) throw std::invalid_argument("from_base64: bad length");
  Bytes out;
  out.reserve(s.size() / 4 * 3);
  for (size_t i = 0; i < s.size(); i += 4) {
    int pad = 0;
    uint32_t v = 0;
    for (int j = 0; j < 4; j++) {
      char c = s[i + j];
      if (c == '=') {
        pad++;
        v <<= 6;
      } else {
        if (pad) throw std::invalid_argument("from_base64: data after pad");
        v = v << 6 | uint32_t(val(c));
      }
    }
    out.push_back(uint8_t(v >> 16));
    if (pad < 2) out.push_back(uint8_t(v >> 8));
    if (pad < 1) out.push_back(uint8_t(v));
  }
  return out;
}

}  // namespace secagg

#endif  // SECAGG_BYTES_HPP
