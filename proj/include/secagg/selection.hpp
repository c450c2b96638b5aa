#ifndef SECAGG_SELECTION_HPP
#define SECAGG_SELECTION_HPP

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "secagg/bytes.hpp"
#include "secagg/crypto.hpp"
#include "secagg/hash.hpp"

namespace secagg {

// Public per-round randomness from which everyone derives the same
// committee and neighborhoods.
struct BeaconSeed {
  Bytes bytes;           // 32-byte public random string
  uint64_t round_index = 0;
};

// Draws `count` distinct ids from `universe`, deterministically from `seed`.
// PRG-driven partial Fisher-Yates over the sorted universe with rejection
// sampling for unbiased index draws.
inline std::vector<uint64_t> select(const Bytes& seed,
                                    std::vector<uint64_t> universe,
                                    uint64_t count) {
  if (count > universe.size())
    throw std::invalid_argument("select: count exceeds universe size");
  std::sort(universe.begin(), universe.end());
  Bytes tagged = to_bytes("secagg.select.v1");
  append(tagged, seed);
  PrgStream prg(sha256(tagged));
  for (uint64_t i = 0; i < count; i++) {
    uint64_t j = i + prg.below(universe.size() - i);
    std::swap(universe[i], universe[j]);
  }
  universe.resize(count);
  return universe;
}

namespace detail {

inline std::vector<uint64_t> iota_universe(uint64_t n, uint64_t skip) {
  std::vector<uint64_t> u;
  u.reserve(skip < n ? n - 1 : n);
  for (uint64_t i = 0; i < n; i++)
    if (i != skip) u.push_back(i);
  return u;
}

}  // namespace detail

// Committee of k among users {0..n-1}, seeded by the beacon alone.
inline std::vector<uint64_t> committee(const BeaconSeed& q, uint64_t n,
                                       uint64_t k) {
  return select(q.bytes, detail::iota_universe(n, n), k);
}

// Backup neighborhood of committee member j: ell users drawn from everyone
// but j, seeded by Q || encode(j) so distinct members get independent sets.
inline std::vector<uint64_t> neighborhood(const BeaconSeed& q, uint64_t j,
                                          uint64_t n, uint64_t ell) {
  if (j >= n) throw std::invalid_argument("neighborhood: j out of range");
  Bytes seed = q.bytes;
  append(seed, be64(j));
  return select(seed, detail::iota_universe(n, j), ell);
}

}  // namespace secagg

#endif  // SECAGG_SELECTION_HPP
