#ifndef SECAGG_HASH_HPP
#define SECAGG_HASH_HPP

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <stdexcept>

#include "secagg/bytes.hpp"

namespace secagg {

inline Bytes sha256(const Bytes& data) {
  Bytes out(32);
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(),
                  nullptr) ||
      len != 32)
    throw std::runtime_error("sha256 failed");
  return out;
}

inline Bytes hmac_sha256(const Bytes& key, const Bytes& data) {
  Bytes out(32);
  unsigned int len = 0;
  if (!HMAC(EVP_sha256(), key.data(), int(key.size()), data.data(),
            data.size(), out.data(), &len) ||
      len != 32)
    throw std::runtime_error("hmac failed");
  return out;
}

// RFC 5869 extract-then-expand with HMAC-SHA256.
inline Bytes hkdf_sha256(const Bytes& ikm, const Bytes& salt, const Bytes& info,
                         size_t out_len) {
  Bytes prk = hmac_sha256(salt.empty() ? Bytes(32, 0) : salt, ikm);
  Bytes out;
  Bytes t;
  uint8_t counter = 1;
  while (out.size() < out_len) {
    Bytes block = t;
    append(block, info);
    block.push_back(counter++);
    t = hmac_sha256(prk, block);
    append(out, t);
  }
  out.resize(out_len);
  return out;
}

}  // namespace secagg

#endif  // SECAGG_HASH_HPP
