#ifndef SECAGG_FIELD_HPP
#define SECAGG_FIELD_HPP

#include <gmpxx.h>

#include <stdexcept>
#include <string>

#include "secagg/bytes.hpp"

namespace secagg {

inline mpz_class mpz_from_bytes_be(const uint8_t* p, size_t len) {
  mpz_class x;
  mpz_import(x.get_mpz_t(), len, 1, 1, 1, 0, p);
  return x;
}

inline mpz_class mpz_from_bytes_be(const Bytes& b) {
  return mpz_from_bytes_be(b.data(), b.size());
}

// Fixed-width big-endian encoding; throws if x needs more than `width` bytes.
inline Bytes mpz_to_bytes_be(const mpz_class& x, size_t width) {
  if (sgn(x) < 0) throw std::invalid_argument("mpz_to_bytes_be: negative");
  size_t need = (mpz_sizeinbase(x.get_mpz_t(), 2) + 7) / 8;
  if (x == 0) need = 0;
  if (need > width) throw std::invalid_argument("mpz_to_bytes_be: overflow");
  Bytes out(width, 0);
  size_t written = 0;
  if (need > 0)
    mpz_export(out.data() + (width - need), &written, 1, 1, 1, 0,
               x.get_mpz_t());
  return out;
}

// Prime field with a runtime modulus. Element values are plain mpz_class in
// [0, p); the field object carries the modulus and the fixed encoding width.
class PrimeField {
 public:
  explicit PrimeField(mpz_class p) : p_(std::move(p)) {
    if (p_ < 2) throw std::invalid_argument("PrimeField: modulus < 2");
    width_ = (mpz_sizeinbase(p_.get_mpz_t(), 2) + 7) / 8;
  }

  const mpz_class& modulus() const { return p_; }
  size_t encoded_width() const { return width_; }

  mpz_class reduce(const mpz_class& x) const {
    mpz_class r = x % p_;
    if (sgn(r) < 0) r += p_;
    return r;
  }

  mpz_class add(const mpz_class& a, const mpz_class& b) const {
    mpz_class r = a + b;
    if (r >= p_) r -= p_;
    return r;
  }

  mpz_class sub(const mpz_class& a, const mpz_class& b) const {
    mpz_class r = a - b;
    if (sgn(r) < 0) r += p_;
    return r;
  }

  mpz_class neg(const mpz_class& a) const {
    if (sgn(a) == 0) return a;
    return p_ - a;
  }

  mpz_class mul(const mpz_class& a, const mpz_class& b) const {
    mpz_class r = a * b;
    return r % p_;
  }

  mpz_class inv(const mpz_class& a) const {
    if (sgn(a) == 0) throw std::domain_error("PrimeField: inverse of zero");
    mpz_class r;
    if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), p_.get_mpz_t()))
      throw std::domain_error("PrimeField: not invertible");
    return r;
  }

  mpz_class pow(const mpz_class& base, const mpz_class& exp) const {
    mpz_class r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), p_.get_mpz_t());
    return r;
  }

  Bytes encode(const mpz_class& x) const { return mpz_to_bytes_be(x, width_); }

  mpz_class decode(const uint8_t* p, size_t len) const {
    if (len != width_) throw std::invalid_argument("PrimeField: bad encoding width");
    mpz_class x = mpz_from_bytes_be(p, len);
    if (x >= p_) throw std::invalid_argument("PrimeField: encoding out of range");
    return x;
  }

  mpz_class decode(const Bytes& b) const { return decode(b.data(), b.size()); }

  // Uniform-enough reduction of an oversized byte string (>= width+16 bytes
  // recommended); used to derive field elements from PRG output.
  mpz_class from_bytes_mod(const Bytes& b) const {
    return reduce(mpz_from_bytes_be(b));
  }

 private:
  mpz_class p_;
  size_t width_;
};

}  // namespace secagg

#endif  // SECAGG_FIELD_HPP
