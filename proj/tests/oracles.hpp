#ifndef SECAGG_TESTS_ORACLES_HPP
#define SECAGG_TESTS_ORACLES_HPP

// Independent reference computations the tests compare library results
// against. Everything favors transparency over speed: exact rational
// arithmetic and direct summation, no shared code with the library paths
// under test.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace oracle {

inline mpz_class binom(uint64_t n, uint64_t k) {
  if (k > n) return mpz_class(0);
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n),
               static_cast<unsigned long>(k));
  return r;
}

// X ~ HG(pop, marked, draws): successes when drawing `draws` items without
// replacement from `pop` items of which `marked` are successes.
// Returns P[X >= x_min] as an exact rational, rounded once to double.
inline double hg_upper_tail(uint64_t pop, uint64_t marked, uint64_t draws,
                            uint64_t x_min) {
  if (marked > pop || draws > pop)
    throw std::invalid_argument("hg_upper_tail: need marked, draws <= pop");
  mpz_class numer(0);
  uint64_t hi = std::min(marked, draws);
  for (uint64_t x = x_min; x <= hi; x++) {
    if (draws - x > pop - marked) continue;
    numer += binom(marked, x) * binom(pop - marked, draws - x);
  }
  mpq_class q(numer, binom(pop, draws));
  q.canonicalize();
  return q.get_d();
}

inline double hg_pmf(uint64_t pop, uint64_t marked, uint64_t draws,
                     uint64_t x) {
  if (x > draws || x > marked) return 0.0;
  if (draws - x > pop - marked) return 0.0;
  mpq_class q(binom(marked, x) * binom(pop - marked, draws - x),
              binom(pop, draws));
  q.canonicalize();
  return q.get_d();
}

// Pearson statistic for observed bin counts against expected probabilities.
// Caller pins the critical value for its degrees of freedom.
inline double chi_square(const std::vector<uint64_t>& observed,
                         const std::vector<double>& expected_prob) {
  if (observed.size() != expected_prob.size())
    throw std::invalid_argument("chi_square: size mismatch");
  uint64_t total = 0;
  for (uint64_t c : observed) total += c;
  double stat = 0.0;
  for (size_t i = 0; i < observed.size(); i++) {
    double e = expected_prob[i] * double(total);
    if (e <= 0.0) {
      if (observed[i] != 0)
        throw std::invalid_argument("chi_square: mass in zero-probability bin");
      continue;
    }
    double d = double(observed[i]) - e;
    stat += d * d / e;
  }
  return stat;
}

// Componentwise sum of the given vectors, reduced modulo `modulus`
// (0 encodes 2^64). Computed in exact integers, reduced at the end.
inline std::vector<uint64_t> plain_sum(
    const std::vector<std::vector<uint64_t>>& inputs, uint64_t modulus) {
  if (inputs.empty()) return {};
  size_t m = inputs[0].size();
  mpz_class mod = modulus == 0 ? (mpz_class(1) << 64) : mpz_class(modulus);
  std::vector<uint64_t> out(m);
  for (size_t c = 0; c < m; c++) {
    mpz_class acc(0);
    for (const auto& v : inputs) {
      if (v.size() != m) throw std::invalid_argument("plain_sum: ragged input");
      acc += mpz_class(static_cast<unsigned long>(v[c]));
    }
    acc %= mod;
    out[c] = acc.get_ui();
  }
  return out;
}

}  // namespace oracle

#endif  // SECAGG_TESTS_ORACLES_HPP
