#ifndef SECAGG_CRYPTO_HPP
#define SECAGG_CRYPTO_HPP

#include <openssl/evp.h>

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "secagg/group.hpp"
#include "secagg/hash.hpp"

namespace secagg {

// Deterministic keystream: AES-256-CTR over a zero IV. Every random choice in
// the library (key generation, mask expansion, Shamir coefficients, committee
// sampling, harness sampling) draws from one of these, so runs replay
// bit-identically from their seeds on any platform.
class PrgStream {
 public:
  explicit PrgStream(const Bytes& key32) : ctx_(EVP_CIPHER_CTX_new()) {
    if (key32.size() != 32)
      throw std::invalid_argument("PrgStream: key must be 32 bytes");
    static const uint8_t iv[16] = {0};
    if (!ctx_ ||
        !EVP_EncryptInit_ex(ctx_.get(), EVP_aes_256_ctr(), nullptr,
                            key32.data(), iv))
      throw std::runtime_error("PrgStream: init failed");
  }

  void fill(uint8_t* out, size_t len) {
    static const uint8_t zero[4096] = {0};
    while (len > 0) {
      size_t chunk = len < sizeof(zero) ? len : sizeof(zero);
      int outl = 0;
      if (!EVP_EncryptUpdate(ctx_.get(), out, &outl, zero, int(chunk)) ||
          size_t(outl) != chunk)
        throw std::runtime_error("PrgStream: update failed");
      out += chunk;
      len -= chunk;
    }
  }

  Bytes bytes(size_t len) {
    Bytes out(len);
    fill(out.data(), len);
    return out;
  }

  uint64_t u64() {
    uint8_t b[8];
    fill(b, 8);
    return get_be64(b);
  }

  // Unbiased draw from [0, bound) by rejection sampling.
  uint64_t below(uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("PrgStream: bound 0");
    uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
      uint64_t v = u64();
      if (v < limit) return v % bound;
    }
  }

 private:
  struct CtxFree {
    void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
  };
  std::unique_ptr<EVP_CIPHER_CTX, CtxFree> ctx_;
};

// Labeled subseed so one master seed can drive many independent streams.
inline Bytes derive_seed(const Bytes& seed, std::string_view label,
                         uint64_t index = 0) {
  Bytes in = to_bytes("secagg.subseed.v1\x00");
  append(in, seed);
  append(in, label);
  append(in, be64(index));
  return sha256(in);
}

// ---------------------------------------------------------------------------
// Key agreement (two-message Diffie-Hellman in the fixed group, with a KDF).

struct KaKeyPair {
  mpz_class sk;  // scalar in [1, q-1]
  mpz_class pk;  // g^sk
};

inline KaKeyPair ka_gen(const Bytes& rng_seed) {
  const Group& G = group();
  Bytes material =
      hkdf_sha256(rng_seed, to_bytes("secagg.ka.gen.v1"), Bytes{}, 48);
  mpz_class sk = mpz_from_bytes_be(material) % (G.q() - 1) + 1;
  return KaKeyPair{sk, G.exp_g(sk)};
}

// Context strings are fixed: "prg" keys feed mask expansion, "enc" keys feed
// the AEAD. Both sides derive the same key from (sk_a, pk_b) and (sk_b, pk_a).
// Results are memoized per thread: multi-round simulations rederive the same
// pairwise keys constantly and the two exponentiations dominate otherwise.
inline Bytes ka_derive(std::string_view ctx, const mpz_class& sk,
                       const mpz_class& pk_peer) {
  if (ctx != "prg" && ctx != "enc")
    throw std::invalid_argument("ka_derive: ctx must be \"prg\" or \"enc\"");
  const Group& G = group();
  thread_local std::unordered_map<std::string, Bytes> memo;
  std::string key(ctx);
  {
    Bytes kb = mpz_to_bytes_be(sk, G.scalar_width());
    Bytes pb = mpz_to_bytes_be(pk_peer, G.element_width());
    key.append(kb.begin(), kb.end());
    key.append(pb.begin(), pb.end());
  }
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  // Subgroup membership costs a full exponentiation and depends only on the
  // peer key, so validated encodings are cached separately: a fresh pair with
  // an already-seen peer pays one exponentiation instead of two.
  thread_local std::unordered_set<std::string> valid_pk;
  std::string pk_key(key, 3 + G.scalar_width());
  if (!valid_pk.contains(pk_key)) {
    if (!G.is_element(pk_peer))
      throw std::invalid_argument("ka_derive: invalid public key");
    if (valid_pk.size() >= (size_t(1) << 20)) valid_pk.clear();
    valid_pk.insert(std::move(pk_key));
  }
  if (sgn(sk) <= 0 || sk >= G.q())
    throw std::invalid_argument("ka_derive: invalid secret scalar");
  mpz_class shared = G.exp(pk_peer, sk);
  Bytes out = hkdf_sha256(G.encode_element(shared), to_bytes("secagg.ka.v1"),
                          to_bytes(ctx), 32);
  if (memo.size() >= (size_t(1) << 22)) memo.clear();
  memo.emplace(std::move(key), out);
  return out;
}

// ---------------------------------------------------------------------------
// PRG expansion of a symmetric key into residue vectors.

// modulus == 0 encodes 2^64; any other value is taken literally. Draws are
// rejection-sampled from fixed-width big-endian reads of the keystream, so
// power-of-two moduli consume exactly width bytes per element.
inline std::vector<uint64_t> prg_expand(const Bytes& key32, size_t m,
                                        uint64_t modulus) {
  if (m == 0) throw std::invalid_argument("prg_expand: m must be positive");
  PrgStream prg(key32);
  std::vector<uint64_t> out(m);
  if (modulus == 0) {
    for (size_t i = 0; i < m; i++) out[i] = prg.u64();
    return out;
  }
  if (modulus <= uint64_t(UINT32_MAX) + 1) {
    uint64_t limit = (uint64_t(UINT32_MAX) + 1) -
                     (uint64_t(UINT32_MAX) + 1) % modulus;
    for (size_t i = 0; i < m; i++) {
      for (;;) {
        uint8_t b[4];
        prg.fill(b, 4);
        uint64_t v = get_be32(b);
        if (v < limit) {
          out[i] = v % modulus;
          break;
        }
      }
    }
    return out;
  }
  for (size_t i = 0; i < m; i++) out[i] = prg.below(modulus);
  return out;
}

// Expansion into scalars of the group's order-q field (used by the integrity
// mode's commitment randomness). 48-byte draws keep the mod-q bias below
// 2^-128.
inline std::vector<mpz_class> prg_expand_scalars(const Bytes& key32, size_t m) {
  if (m == 0) throw std::invalid_argument("prg_expand_scalars: m must be positive");
  const PrimeField& fq = group().scalar_field();
  PrgStream prg(key32);
  std::vector<mpz_class> out;
  out.reserve(m);
  for (size_t i = 0; i < m; i++) out.push_back(fq.from_bytes_mod(prg.bytes(48)));
  return out;
}

// ---------------------------------------------------------------------------
// Authenticated encryption (AES-256-GCM, 12-byte nonce, 16-byte tag).

inline constexpr size_t kAeadNonceLen = 12;
inline constexpr size_t kAeadTagLen = 16;

// Nonce = hash(round || sender || receiver) truncated to the AEAD nonce size.
// Each ordered (round, sender, receiver) triple keys at most one message per
// symmetric key, so nonces never repeat under a key.
inline Bytes ae_nonce(uint8_t round, uint64_t sender, uint64_t receiver) {
  Bytes in = to_bytes("secagg.ae.nonce.v1");
  in.push_back(round);
  append(in, be64(sender));
  append(in, be64(receiver));
  Bytes h = sha256(in);
  h.resize(kAeadNonceLen);
  return h;
}

inline Bytes ae_encrypt(const Bytes& key32, const Bytes& nonce,
                        const Bytes& plaintext) {
  if (key32.size() != 32) throw std::invalid_argument("ae_encrypt: bad key size");
  if (nonce.size() != kAeadNonceLen)
    throw std::invalid_argument("ae_encrypt: bad nonce size");
  std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)> ctx(
      EVP_CIPHER_CTX_new(), EVP_CIPHER_CTX_free);
  if (!ctx) throw std::runtime_error("ae_encrypt: ctx");
  if (!EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key32.data(),
                          nonce.data()))
    throw std::runtime_error("ae_encrypt: init");
  Bytes out(plaintext.size() + kAeadTagLen);
  int outl = 0;
  if (!plaintext.empty() &&
      !EVP_EncryptUpdate(ctx.get(), out.data(), &outl, plaintext.data(),
                         int(plaintext.size())))
    throw std::runtime_error("ae_encrypt: update");
  int fin = 0;
  if (!EVP_EncryptFinal_ex(ctx.get(), out.data() + outl, &fin))
    throw std::runtime_error("ae_encrypt: final");
  if (!EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kAeadTagLen,
                           out.data() + outl + fin))
    throw std::runtime_error("ae_encrypt: tag");
  return out;
}

// nullopt = authentication failure. Malformed inputs (short ciphertext, bad
// nonce/key size) throw instead.
inline std::optional<Bytes> ae_decrypt(const Bytes& key32, const Bytes& nonce,
                                       const Bytes& ciphertext) {
  if (key32.size() != 32) throw std::invalid_argument("ae_decrypt: bad key size");
  if (nonce.size() != kAeadNonceLen)
    throw std::invalid_argument("ae_decrypt: bad nonce size");
  if (ciphertext.size() < kAeadTagLen)
    throw std::invalid_argument("ae_decrypt: ciphertext shorter than tag");
  std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)> ctx(
      EVP_CIPHER_CTX_new(), EVP_CIPHER_CTX_free);
  if (!ctx) throw std::runtime_error("ae_decrypt: ctx");
  if (!EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key32.data(),
                          nonce.data()))
    throw std::runtime_error("ae_decrypt: init");
  size_t ct_len = ciphertext.size() - kAeadTagLen;
  Bytes tag(ciphertext.end() - kAeadTagLen, ciphertext.end());
  Bytes out(ct_len);
  int outl = 0;
  if (ct_len > 0 &&
      !EVP_DecryptUpdate(ctx.get(), out.data(), &outl, ciphertext.data(),
                         int(ct_len)))
    return std::nullopt;
  if (!EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kAeadTagLen,
                           tag.data()))
    throw std::runtime_error("ae_decrypt: set tag");
  int fin = 0;
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + outl, &fin) != 1)
    return std::nullopt;
  out.resize(outl + fin);
  return out;
}

// ---------------------------------------------------------------------------
// Digital signatures (Ed25519).

struct SigKeyPair {
  Bytes sk;  // 32-byte seed
  Bytes pk;  // 32-byte public key
};

inline SigKeyPair ds_gen(const Bytes& rng_seed) {
  Bytes seed = hkdf_sha256(rng_seed, to_bytes("secagg.ds.gen.v1"), Bytes{}, 32);
  std::unique_ptr<EVP_PKEY, decltype(&EVP_PKEY_free)> key(
      EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed.data(),
                                   seed.size()),
      EVP_PKEY_free);
  if (!key) throw std::runtime_error("ds_gen: key");
  Bytes pk(32);
  size_t len = 32;
  if (!EVP_PKEY_get_raw_public_key(key.get(), pk.data(), &len) || len != 32)
    throw std::runtime_error("ds_gen: pub");
  return SigKeyPair{seed, pk};
}

inline Bytes ds_sign(const Bytes& sk, const Bytes& message) {
  if (sk.size() != 32) throw std::invalid_argument("ds_sign: bad key size");
  std::unique_ptr<EVP_PKEY, decltype(&EVP_PKEY_free)> key(
      EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, sk.data(),
                                   sk.size()),
      EVP_PKEY_free);
  if (!key) throw std::runtime_error("ds_sign: key");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(
      EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx ||
      !EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()))
    throw std::runtime_error("ds_sign: init");
  size_t sig_len = 64;
  Bytes sig(sig_len);
  if (!EVP_DigestSign(ctx.get(), sig.data(), &sig_len, message.data(),
                      message.size()) ||
      sig_len != 64)
    throw std::runtime_error("ds_sign: sign");
  return sig;
}

// False on any invalid signature, including malformed pk/sig encodings.
inline bool ds_verify(const Bytes& pk, const Bytes& signature,
                      const Bytes& message) {
  if (pk.size() != 32 || signature.size() != 64) return false;
  std::unique_ptr<EVP_PKEY, decltype(&EVP_PKEY_free)> key(
      EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, pk.data(),
                                  pk.size()),
      EVP_PKEY_free);
  if (!key) return false;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(
      EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx ||
      !EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()))
    return false;
  return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(),
                          message.data(), message.size()) == 1;
}

}  // namespace secagg

#endif  // SECAGG_CRYPTO_HPP
