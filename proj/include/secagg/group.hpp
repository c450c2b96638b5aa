#ifndef SECAGG_GROUP_HPP
#define SECAGG_GROUP_HPP

#include <memory>

#include "secagg/field.hpp"
#include "secagg/hash.hpp"

namespace secagg {

// Prime-order subgroup of Z_p^* for a safe prime p = 2q + 1. Key agreement,
// Pedersen commitments, and secret sharing all use this one group: secrets
// are scalars in F_q, so a committee secret key is directly shareable.
//
// p is the smallest safe prime above 2^256 (p = 2^256 + 230191), so q has
// exactly 256 bits. g = 4 is a quadratic residue and therefore generates the
// order-q subgroup. Elements encode as 33-byte big-endian strings, scalars
// as 32-byte big-endian strings.
class Group {
 public:
  Group()
      : p_(mpz_class(
            "0x1000000000000000000000000000000000000000000000000000000000003832"
            "f")),
        q_(mpz_class(
            "0x800000000000000000000000000000000000000000000000000000000001c19"
            "7")),
        g_(4),
        fp_(p_),
        fq_(q_) {
    h_ = derive_h();
  }

  const mpz_class& p() const { return p_; }
  const mpz_class& q() const { return q_; }
  const mpz_class& g() const { return g_; }
  const mpz_class& h() const { return h_; }
  const PrimeField& fp() const { return fp_; }    // mod-p arithmetic
  const PrimeField& scalar_field() const { return fq_; }  // mod-q arithmetic

  size_t element_width() const { return fp_.encoded_width(); }  // 33
  size_t scalar_width() const { return fq_.encoded_width(); }   // 32

  mpz_class exp(const mpz_class& base, const mpz_class& scalar) const {
    return fp_.pow(base, scalar);
  }

  mpz_class exp_g(const mpz_class& scalar) const { return exp(g_, scalar); }
  mpz_class exp_h(const mpz_class& scalar) const { return exp(h_, scalar); }

  mpz_class mul(const mpz_class& a, const mpz_class& b) const {
    return fp_.mul(a, b);
  }

  mpz_class identity() const { return mpz_class(1); }

  // Membership in the order-q subgroup: x in [1, p) and x^q = 1.
  bool is_element(const mpz_class& x) const {
    if (sgn(x) <= 0 || x >= p_) return false;
    return fp_.pow(x, q_) == 1;
  }

  Bytes encode_element(const mpz_class& x) const { return fp_.encode(x); }

  mpz_class decode_element(const Bytes& b) const {
    mpz_class x = fp_.decode(b);
    if (!is_element(x)) throw std::invalid_argument("Group: not a subgroup element");
    return x;
  }

  Bytes encode_scalar(const mpz_class& x) const { return fq_.encode(x); }

  mpz_class decode_scalar(const Bytes& b) const { return fq_.decode(b); }

 private:
  // Second Pedersen base with unknown discrete log w.r.t. g: hash a fixed
  // domain tag to Z_p and square into the quadratic-residue subgroup.
  mpz_class derive_h() const {
    Bytes seed = sha256(to_bytes("secagg.group.h.v1:0"));
    append(seed, sha256(to_bytes("secagg.group.h.v1:1")));
    mpz_class s = fp_.from_bytes_mod(seed);
    mpz_class h = fp_.mul(s, s);
    if (h == 1 || sgn(h) == 0)
      throw std::logic_error("Group: degenerate h");  // unreachable for v1 tag
    return h;
  }

  mpz_class p_, q_, g_, h_;
  PrimeField fp_, fq_;
};

inline const Group& group() {
  static const Group g;
  return g;
}

}  // namespace secagg

#endif  // SECAGG_GROUP_HPP
