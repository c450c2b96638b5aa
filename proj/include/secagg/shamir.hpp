#ifndef SECAGG_SHAMIR_HPP
#define SECAGG_SHAMIR_HPP

#include <set>
#include <vector>

#include "secagg/crypto.hpp"
#include "secagg/field.hpp"

namespace secagg {

struct Share {
  uint32_t index = 0;  // evaluation point, in [1, count]
  mpz_class value;

  bool operator==(const Share&) const = default;
};

// t-of-count sharing of `secret` over `field`: evaluations of a random
// degree-(t-1) polynomial with constant term `secret` at x = 1..count.
// Coefficients are drawn deterministically from `rng_seed`.
inline std::vector<Share> ss_share(const PrimeField& field,
                                   const mpz_class& secret, uint32_t t,
                                   uint32_t count, const Bytes& rng_seed) {
  if (t < 1 || t > count) throw std::invalid_argument("ss_share: need 1 <= t <= count");
  if (mpz_class(count) >= field.modulus())
    throw std::invalid_argument("ss_share: count must be below field modulus");
  if (sgn(secret) < 0 || secret >= field.modulus())
    throw std::invalid_argument("ss_share: secret out of field range");
  size_t draw = field.encoded_width() + 16;
  PrgStream prg(derive_seed(rng_seed, "ss.coeff"));
  std::vector<mpz_class> coeff(t);
  coeff[0] = secret;
  for (uint32_t i = 1; i < t; i++) coeff[i] = field.from_bytes_mod(prg.bytes(draw));
  std::vector<Share> shares(count);
  for (uint32_t x = 1; x <= count; x++) {
    mpz_class acc = 0;  // Horner evaluation at x
    for (uint32_t i = t; i-- > 0;) acc = field.add(field.mul(acc, x), coeff[i]);
    shares[x - 1] = Share{x, acc};
  }
  return shares;
}

// Lagrange interpolation at 0 over all provided shares. `t` is the sharing
// threshold; fewer than t shares is an error, more than t is fine (any
// superset of a valid share set reconstructs the same secret).
inline mpz_class ss_recon(const PrimeField& field,
                          const std::vector<Share>& shares, uint32_t t) {
  if (t < 1) throw std::invalid_argument("ss_recon: t must be positive");
  if (shares.size() < t) throw std::invalid_argument("ss_recon: fewer than t shares");
  std::set<uint32_t> seen;
  for (const Share& s : shares) {
    if (s.index == 0) throw std::invalid_argument("ss_recon: zero index");
    if (!seen.insert(s.index).second)
      throw std::invalid_argument("ss_recon: duplicate share index");
    if (sgn(s.value) < 0 || s.value >= field.modulus())
      throw std::invalid_argument("ss_recon: share value out of field range");
  }
  mpz_class secret = 0;
  for (size_t i = 0; i < shares.size(); i++) {
    mpz_class num = 1, den = 1;
    mpz_class xi(shares[i].index);
    for (size_t j = 0; j < shares.size(); j++) {
      if (j == i) continue;
      mpz_class xj(shares[j].index);
      num = field.mul(num, xj);
      den = field.mul(den, field.sub(xj, xi));
    }
    mpz_class lagrange = field.mul(num, field.inv(den));
    secret = field.add(secret, field.mul(lagrange, shares[i].value));
  }
  return secret;
}

// Lagrange evaluation at an arbitrary point of the polynomial defined by the
// given shares; used to test extra shares for consistency with a chosen
// reconstruction set. `x` must differ from every share index.
inline mpz_class ss_interpolate(const PrimeField& field,
                                const std::vector<Share>& shares, uint32_t x) {
  if (shares.empty()) throw std::invalid_argument("ss_interpolate: no shares");
  mpz_class value = 0;
  mpz_class xq(x);
  for (size_t i = 0; i < shares.size(); i++) {
    mpz_class num = 1, den = 1;
    mpz_class xi(shares[i].index);
    if (xi == xq) throw std::invalid_argument("ss_interpolate: x collides with share index");
    for (size_t j = 0; j < shares.size(); j++) {
      if (j == i) continue;
      mpz_class xj(shares[j].index);
      num = field.mul(num, field.sub(xq, xj));
      den = field.mul(den, field.sub(xi, xj));
    }
    value = field.add(value, field.mul(field.mul(num, field.inv(den)),
                                       shares[i].value));
  }
  return value;
}

}  // namespace secagg

#endif  // SECAGG_SHAMIR_HPP
