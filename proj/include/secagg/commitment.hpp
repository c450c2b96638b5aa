#ifndef SECAGG_COMMITMENT_HPP
#define SECAGG_COMMITMENT_HPP

#include <vector>

#include "secagg/group.hpp"

namespace secagg {

// Pedersen commitment in the fixed group: Com(x, r) = g^x * h^r with
// x, r in F_q. Computationally binding under discrete log, perfectly hiding,
// and linearly homomorphic: Com(x1, r1) * Com(x2, r2) = Com(x1+x2, r1+r2).

inline mpz_class comm_gen(const mpz_class& message, const mpz_class& randomness) {
  const Group& G = group();
  const PrimeField& fq = G.scalar_field();
  if (sgn(message) < 0 || message >= fq.modulus())
    throw std::invalid_argument("comm_gen: message out of scalar range");
  if (sgn(randomness) < 0 || randomness >= fq.modulus())
    throw std::invalid_argument("comm_gen: randomness out of scalar range");
  return G.mul(G.exp_g(message), G.exp_h(randomness));
}

inline bool comm_vfy(const mpz_class& commitment, const mpz_class& message,
                     const mpz_class& randomness) {
  const Group& G = group();
  const PrimeField& fq = G.scalar_field();
  if (!G.is_element(commitment)) return false;
  if (sgn(message) < 0 || message >= fq.modulus()) return false;
  if (sgn(randomness) < 0 || randomness >= fq.modulus()) return false;
  return commitment == comm_gen(message, randomness);
}

inline mpz_class comm_mul(const mpz_class& a, const mpz_class& b) {
  const Group& G = group();
  if (!G.is_element(a) || !G.is_element(b))
    throw std::invalid_argument("comm_mul: not a group element");
  return G.mul(a, b);
}

inline mpz_class comm_identity() { return group().identity(); }

}  // namespace secagg

#endif  // SECAGG_COMMITMENT_HPP
