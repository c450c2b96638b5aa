#ifndef SECAGG_PROTOCOL_HPP
#define SECAGG_PROTOCOL_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "secagg/bytes.hpp"
#include "secagg/commitment.hpp"
#include "secagg/crypto.hpp"
#include "secagg/group.hpp"
#include "secagg/params.hpp"
#include "secagg/shamir.hpp"
#include "secagg/wire.hpp"

namespace secagg {

// ---------------------------------------------------------------------------
// Abort taxonomy. Aborts are values, not exceptions: honest parties stop and
// name the reason; exceptions are reserved for malformed API use.

namespace reason {
inline constexpr const char* kTooFewInputs = "too-few-inputs";
inline constexpr const char* kTooManyCommitteeDropouts =
    "too-many-committee-dropouts";
inline constexpr const char* kInsufficientAcks = "insufficient-acks";
inline constexpr const char* kCorruptShare = "corrupt-share";
inline constexpr const char* kInsufficientShares = "insufficient-shares";
inline constexpr const char* kBadCommitmentSignature =
    "bad-commitment-signature";
}  // namespace reason

struct Abort {
  std::string reason;
  uint8_t round = 0;
  uint64_t party = kServerId;
};

template <typename T>
class Outcome {
 public:
  Outcome(T v) : value_(std::move(v)) {}
  Outcome(Abort a) : abort_(std::move(a)) {}
  bool ok() const { return value_.has_value(); }
  const T& value() const { return value_.value(); }
  T& value() { return value_.value(); }
  const Abort& abort() const { return abort_.value(); }

 private:
  std::optional<T> value_;
  std::optional<Abort> abort_;
};

// ---------------------------------------------------------------------------
// Residue arithmetic for masked vectors. modulus 0 encodes 2^64 (native
// wraparound).

inline uint64_t mod_reduce(uint64_t x, uint64_t modulus) {
  return modulus == 0 ? x : x % modulus;
}

inline uint64_t mod_add(uint64_t a, uint64_t b, uint64_t modulus) {
  if (modulus == 0) return a + b;
  return uint64_t(((unsigned __int128)a + b) % modulus);
}

inline uint64_t mod_sub(uint64_t a, uint64_t b, uint64_t modulus) {
  if (modulus == 0) return a - b;
  return uint64_t(((unsigned __int128)a + modulus - b % modulus) % modulus);
}

inline void mod_add_in(std::vector<uint64_t>& acc,
                       const std::vector<uint64_t>& v, uint64_t modulus) {
  if (acc.size() != v.size())
    throw std::invalid_argument("mod_add_in: length mismatch");
  for (size_t c = 0; c < acc.size(); c++)
    acc[c] = mod_add(acc[c], v[c], modulus);
}

inline void mod_sub_in(std::vector<uint64_t>& acc,
                       const std::vector<uint64_t>& v, uint64_t modulus) {
  if (acc.size() != v.size())
    throw std::invalid_argument("mod_sub_in: length mismatch");
  for (size_t c = 0; c < acc.size(); c++)
    acc[c] = mod_sub(acc[c], v[c], modulus);
}

// ---------------------------------------------------------------------------
// Keys and the simulated PKI view.

struct PartyKeys {
  KaKeyPair mask;       // (sk_i, pk_i): masks and share encryption
  KaKeyPair committee;  // (SK_i, PK_i): the secret a committee member shares
  SigKeyPair sig;       // (Ssk_i, Spk_i)
};

struct PublicDirectory {
  std::vector<mpz_class> mask_pk;       // pk_i by user id
  std::vector<mpz_class> committee_pk;  // PK_i by user id
  std::vector<Bytes> sig_pk;            // Spk_i by user id

  void check_id(uint64_t i) const {
    if (i >= mask_pk.size())
      throw std::invalid_argument("directory: unknown party id");
  }
};

// ---------------------------------------------------------------------------
// Domain types.

struct MaskedVector {
  std::vector<uint64_t> values;  // m residues mod modulus
  uint64_t sender = 0;
};

struct PartialBlinding {
  std::vector<uint64_t> values;  // m residues mod modulus
  uint64_t committee_member = 0;
};

struct EncryptedKeyShare {
  uint64_t from = 0;  // committee member j
  uint64_t to = 0;    // backup neighbor i
  Bytes ciphertext;   // AE(k^e_{j,i}, be32(index) || scalar)
};

struct DropDeclaration {
  std::vector<uint64_t> k_drop;
  std::map<uint64_t, Bytes> signatures;  // signer -> signature (malicious)
};

struct IntegrityBundle {
  std::vector<Bytes> commitments;  // m encoded group elements
  Bytes signature;                 // over the concatenated commitments
  std::map<uint64_t, Bytes> enc_rand_shares;  // committee id -> AE(seed)
};

struct CommitteeIntegrityOut {
  std::vector<mpz_class> rho;              // m scalars mod q
  Bytes rho_signature;                     // over encoded rho
  std::vector<Bytes> aggregate_commitment; // C_j: m encoded elements
  Bytes aggregate_signature;               // over C_j || canonical(U'_2)
};

struct PublishedResult {
  std::vector<uint64_t> y;
  std::vector<uint64_t> u_prime_2;  // sorted contributing-user ids
  struct AliveEntry {
    uint64_t j = 0;
    std::vector<mpz_class> rho;
    Bytes rho_signature;
    std::vector<Bytes> commitment;
    Bytes commitment_signature;
  };
  struct RecoveredEntry {
    uint64_t j = 0;
    std::vector<mpz_class> rho;
  };
  std::vector<AliveEntry> alive;
  std::vector<RecoveredEntry> recovered;
};

// Canonical byte strings covered by signatures.
inline Bytes rho_sign_bytes(const std::vector<mpz_class>& rho) {
  const auto& fq = group().scalar_field();
  Bytes out = to_bytes("rho:");
  for (const auto& v : rho) append(out, fq.encode(v));
  return out;
}

inline Bytes commitment_concat(const std::vector<Bytes>& comms) {
  Bytes out;
  for (const auto& c : comms) append(out, c);
  return out;
}

inline Bytes aggregate_sign_bytes(const std::vector<Bytes>& c_j,
                                  const std::vector<uint64_t>& u2) {
  Bytes out = to_bytes("aggcomm:");
  append(out, commitment_concat(c_j));
  append(out, canonical_id_set(u2));
  return out;
}

// ---------------------------------------------------------------------------
// Mask derivation, shared by users (sk_i, PK_j) and committee (SK_j, pk_i):
// the agreement is symmetric so both sides expand identical streams.

inline std::vector<uint64_t> pairwise_mask(const ProtocolParams& p,
                                           const mpz_class& own_secret,
                                           const mpz_class& peer_public) {
  Bytes key = ka_derive("prg", own_secret, peer_public);
  return prg_expand(key, p.m, p.modulus);
}

// ---------------------------------------------------------------------------
// Round 2, regular user: blind the input under every committee mask. In
// lisa-plus mode also commit to the input and share the commitment
// randomness additively (k-of-k) across the committee as PRG seeds.

struct UserRound2Out {
  MaskedVector masked;
  std::optional<IntegrityBundle> bundle;
};

inline UserRound2Out user_round2(const ProtocolParams& p, uint64_t self,
                                 const std::vector<uint64_t>& x,
                                 const PartyKeys& keys,
                                 const std::vector<uint64_t>& committee_ids,
                                 const PublicDirectory& dir,
                                 const Bytes& rng_seed) {
  if (x.size() != p.m) throw std::invalid_argument("user_round2: |x| != m");
  if (committee_ids.size() != p.k)
    throw std::invalid_argument("user_round2: committee size != k");
  UserRound2Out out;
  out.masked.sender = self;
  out.masked.values.resize(p.m);
  for (size_t c = 0; c < p.m; c++)
    out.masked.values[c] = mod_reduce(x[c], p.modulus);
  for (uint64_t j : committee_ids) {
    dir.check_id(j);
    mod_add_in(out.masked.values,
               pairwise_mask(p, keys.mask.sk, dir.committee_pk[j]), p.modulus);
  }
  if (p.mode != Mode::kIntegrity) return out;

  const Group& grp = group();
  const auto& fq = grp.scalar_field();
  IntegrityBundle bundle;
  std::vector<mpz_class> r_total(p.m, 0);
  uint64_t idx = 0;
  for (uint64_t j : committee_ids) {
    Bytes seed = derive_seed(rng_seed, "rand-share", idx++);
    std::vector<mpz_class> share = prg_expand_scalars(seed, p.m);
    for (size_t c = 0; c < p.m; c++)
      r_total[c] = fq.add(r_total[c], share[c]);
    Bytes key = ka_derive("enc", keys.mask.sk, dir.committee_pk[j]);
    bundle.enc_rand_shares[j] = ae_encrypt(key, ae_nonce(2, self, j), seed);
  }
  bundle.commitments.reserve(p.m);
  for (size_t c = 0; c < p.m; c++)
    bundle.commitments.push_back(grp.encode_element(
        comm_gen(mpz_class(mod_reduce(x[c], p.modulus)), r_total[c])));
  bundle.signature =
      ds_sign(keys.sig.sk, commitment_concat(bundle.commitments));
  out.bundle = std::move(bundle);
  return out;
}

// ---------------------------------------------------------------------------
// Round 2, committee member: Shamir-share SK_j to the backup neighborhood,
// one AE ciphertext per neighbor. Share index equals the neighbor's position
// in L_j plus one.

inline std::vector<EncryptedKeyShare> committee_round2(
    const ProtocolParams& p, uint64_t j, const PartyKeys& keys,
    const std::vector<uint64_t>& neighbors, const PublicDirectory& dir,
    const Bytes& rng_seed) {
  if (neighbors.size() != p.ell)
    throw std::invalid_argument("committee_round2: |L_j| != ell");
  const auto& fq = group().scalar_field();
  std::vector<Share> shares =
      ss_share(fq, keys.committee.sk, p.t, p.ell, rng_seed);
  std::vector<EncryptedKeyShare> out;
  out.reserve(p.ell);
  for (size_t pos = 0; pos < neighbors.size(); pos++) {
    uint64_t i = neighbors[pos];
    dir.check_id(i);
    Bytes plain;
    put_be32(plain, shares[pos].index);
    append(plain, fq.encode(shares[pos].value));
    Bytes key = ka_derive("enc", keys.mask.sk, dir.mask_pk[i]);
    out.push_back(EncryptedKeyShare{
        j, i, ae_encrypt(key, ae_nonce(2, j, i), plain)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Round 3, committee member: abort when the server claims too few inputs,
// otherwise sum the pairwise masks over the announced contributor set. In
// lisa-plus mode additionally verify every contributor's commitment
// signature, aggregate the commitments, and sum the randomness shares.

struct CommitteeRound3In {
  // Lisa-plus only; keyed by contributor id.
  std::map<uint64_t, std::vector<Bytes>> commitments;
  std::map<uint64_t, Bytes> commitment_sigs;
  std::map<uint64_t, Bytes> enc_rand_shares;  // ciphertexts addressed to j
};

struct CommitteeRound3Out {
  PartialBlinding blinding;
  std::optional<CommitteeIntegrityOut> integrity;
};

inline Outcome<CommitteeRound3Out> committee_round3(
    const ProtocolParams& p, uint64_t j, const PartyKeys& keys,
    const std::vector<uint64_t>& u2, const PublicDirectory& dir,
    const CommitteeRound3In& in = {}) {
  if (double(u2.size()) < p.alpha * double(p.n))
    return Abort{reason::kTooFewInputs, 3, j};
  CommitteeRound3Out out;
  out.blinding.committee_member = j;
  out.blinding.values.assign(p.m, 0);
  for (uint64_t i : u2) {
    dir.check_id(i);
    mod_add_in(out.blinding.values,
               pairwise_mask(p, keys.committee.sk, dir.mask_pk[i]), p.modulus);
  }
  if (p.mode != Mode::kIntegrity) return out;

  const Group& grp = group();
  const auto& fq = grp.scalar_field();
  CommitteeIntegrityOut integ;
  integ.rho.assign(p.m, 0);
  std::vector<mpz_class> c_agg(p.m);
  for (size_t c = 0; c < p.m; c++) c_agg[c] = comm_identity();
  for (uint64_t i : u2) {
    auto comm_it = in.commitments.find(i);
    auto sig_it = in.commitment_sigs.find(i);
    if (comm_it == in.commitments.end() || sig_it == in.commitment_sigs.end() ||
        comm_it->second.size() != p.m ||
        !ds_verify(dir.sig_pk[i], sig_it->second,
                   commitment_concat(comm_it->second)))
      return Abort{reason::kBadCommitmentSignature, 3, j};
    for (size_t c = 0; c < p.m; c++)
      c_agg[c] = comm_mul(c_agg[c], grp.decode_element(comm_it->second[c]));
    auto ct_it = in.enc_rand_shares.find(i);
    if (ct_it == in.enc_rand_shares.end())
      return Abort{reason::kCorruptShare, 3, j};
    Bytes key = ka_derive("enc", keys.committee.sk, dir.mask_pk[i]);
    auto seed = ae_decrypt(key, ae_nonce(2, i, j), ct_it->second);
    if (!seed || seed->size() != 32) return Abort{reason::kCorruptShare, 3, j};
    std::vector<mpz_class> share = prg_expand_scalars(*seed, p.m);
    for (size_t c = 0; c < p.m; c++)
      integ.rho[c] = fq.add(integ.rho[c], share[c]);
  }
  integ.aggregate_commitment.reserve(p.m);
  for (size_t c = 0; c < p.m; c++)
    integ.aggregate_commitment.push_back(grp.encode_element(c_agg[c]));
  integ.rho_signature = ds_sign(keys.sig.sk, rho_sign_bytes(integ.rho));
  integ.aggregate_signature = ds_sign(
      keys.sig.sk, aggregate_sign_bytes(integ.aggregate_commitment, u2));
  out.integrity = std::move(integ);
  return out;
}

// ---------------------------------------------------------------------------
// Round 4, backup neighbor: refuse recovery once the committee has lost its
// correctness margin. Malicious mode signs the canonical dropout set;
// semi-honest mode returns an empty acknowledgment.

inline Outcome<Bytes> backup_round4(const ProtocolParams& p, uint64_t self,
                                    const PartyKeys& keys,
                                    const std::vector<uint64_t>& k_drop) {
  if (k_drop.size() >= size_t(p.k - p.c_tilde))
    return Abort{reason::kTooManyCommitteeDropouts, 4, self};
  if (p.mode == Mode::kSemiHonest) return Bytes{};
  return ds_sign(keys.sig.sk, canonical_id_set(k_drop));
}

// ---------------------------------------------------------------------------
// Round 5, backup neighbor: in malicious mode, admit only signers of the
// exact dropout set this backup received, and require a quorum for every
// committee member before releasing anything. Then decrypt and release the
// held shares of dropped members.

struct ReleasedShare {
  uint64_t j = 0;  // dropped committee member
  Share share;
};

inline Outcome<std::vector<ReleasedShare>> backup_round5(
    const ProtocolParams& p, uint64_t self, const PartyKeys& keys,
    const DropDeclaration& decl,
    const std::vector<std::vector<uint64_t>>& neighborhoods,
    const std::map<uint64_t, Bytes>& held_shares, const PublicDirectory& dir) {
  if (p.mode != Mode::kSemiHonest) {
    Bytes canon = canonical_id_set(decl.k_drop);
    std::set<uint64_t> ack;
    for (const auto& [signer, sig] : decl.signatures) {
      dir.check_id(signer);
      if (ds_verify(dir.sig_pk[signer], sig, canon)) ack.insert(signer);
    }
    for (const auto& l_j : neighborhoods) {
      size_t overlap = 0;
      for (uint64_t i : l_j) overlap += ack.count(i);
      if (overlap < p.t) return Abort{reason::kInsufficientAcks, 5, self};
    }
  }
  const auto& fq = group().scalar_field();
  std::vector<ReleasedShare> out;
  for (uint64_t j : decl.k_drop) {
    auto it = held_shares.find(j);
    if (it == held_shares.end()) continue;  // self not in L_j
    dir.check_id(j);
    Bytes key = ka_derive("enc", keys.mask.sk, dir.mask_pk[j]);
    auto plain = ae_decrypt(key, ae_nonce(2, j, self), it->second);
    if (!plain || plain->size() != 4 + fq.encoded_width())
      return Abort{reason::kCorruptShare, 5, self};
    size_t off = 0;
    uint32_t index = get_be32(*plain, off);
    Bytes scalar(plain->begin() + 4, plain->end());
    out.push_back(ReleasedShare{j, Share{index, fq.decode(scalar)}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Server-side computations (pure helpers; scheduling lives in the harness).

inline std::vector<uint64_t> aggregate_masked(
    const ProtocolParams& p, const std::vector<MaskedVector>& inputs) {
  std::vector<uint64_t> acc(p.m, 0);
  for (const auto& mv : inputs) {
    if (mv.values.size() != p.m)
      throw std::invalid_argument("aggregate_masked: |c_i| != m");
    mod_add_in(acc, mv.values, p.modulus);
  }
  return acc;
}

inline Outcome<mpz_class> recover_secret(const ProtocolParams& p,
                                         const std::vector<Share>& shares) {
  if (shares.size() < p.t)
    return Abort{reason::kInsufficientShares, 6, kServerId};
  return ss_recon(group().scalar_field(), shares, p.t);
}

// The blinding a recovered SK_j implies; identical math to committee_round3.
inline std::vector<uint64_t> recompute_blinding(
    const ProtocolParams& p, const mpz_class& sk_j,
    const std::vector<uint64_t>& u2, const PublicDirectory& dir) {
  std::vector<uint64_t> acc(p.m, 0);
  for (uint64_t i : u2) {
    dir.check_id(i);
    mod_add_in(acc, pairwise_mask(p, sk_j, dir.mask_pk[i]), p.modulus);
  }
  return acc;
}

inline std::vector<uint64_t> finalize_output(
    const ProtocolParams& p, const std::vector<uint64_t>& c_agg,
    const std::vector<std::vector<uint64_t>>& blindings) {
  std::vector<uint64_t> y = c_agg;
  for (const auto& b : blindings) mod_sub_in(y, b, p.modulus);
  return y;
}

// Lisa-plus: a recovered SK_j also unlocks the randomness shares users
// addressed to j, so the server can publish rho_j for dropped members.
inline Outcome<std::vector<mpz_class>> recover_rho(
    const ProtocolParams& p, const mpz_class& sk_j, uint64_t j,
    const std::vector<uint64_t>& u2,
    const std::map<uint64_t, Bytes>& enc_rand_shares,
    const PublicDirectory& dir) {
  const auto& fq = group().scalar_field();
  std::vector<mpz_class> rho(p.m, 0);
  for (uint64_t i : u2) {
    auto it = enc_rand_shares.find(i);
    if (it == enc_rand_shares.end())
      return Abort{reason::kCorruptShare, 6, kServerId};
    dir.check_id(i);
    Bytes key = ka_derive("enc", sk_j, dir.mask_pk[i]);
    auto seed = ae_decrypt(key, ae_nonce(2, i, j), it->second);
    if (!seed || seed->size() != 32)
      return Abort{reason::kCorruptShare, 6, kServerId};
    std::vector<mpz_class> share = prg_expand_scalars(*seed, p.m);
    for (size_t c = 0; c < p.m; c++) rho[c] = fq.add(rho[c], share[c]);
  }
  return rho;
}

// ---------------------------------------------------------------------------
// Lisa-plus output verification: any user checks the published aggregate
// against the homomorphically aggregated commitments. The masked sum lives
// mod `modulus` while commitments live in the exponent group, so the check
// searches the bounded wrap count w in [0, |U'_2|]; soundness needs
// n * modulus < q, which validate_integrity_domain enforces.

struct VerifyResult {
  bool accepted = false;
  std::string reason;  // names the first failing assertion when rejected
};

namespace verify_reason {
inline constexpr const char* kCommitteeAliveCount = "committee-alive-count";
inline constexpr const char* kInconsistentCommitments =
    "inconsistent-commitments";
inline constexpr const char* kBadOpeningSignature = "bad-opening-signature";
inline constexpr const char* kBadAggregateSignature =
    "bad-aggregate-signature";
inline constexpr const char* kCommitmentMismatch = "commitment-mismatch";
}  // namespace verify_reason

inline mpz_class modulus_as_mpz(uint64_t modulus) {
  if (modulus == 0) return mpz_class(1) << 64;
  return mpz_class(modulus_to_string(modulus));
}

inline void validate_integrity_domain(const ProtocolParams& p) {
  if (mpz_class(p.n) * modulus_as_mpz(p.modulus) >=
      group().scalar_field().modulus())
    throw std::invalid_argument(
        "integrity mode needs n * modulus < group order");
}

inline VerifyResult user_verify_output(const ProtocolParams& p,
                                       const PublishedResult& r,
                                       const std::vector<Bytes>& sig_pk) {
  auto rejected = [](const char* why) { return VerifyResult{false, why}; };
  if (r.alive.size() < size_t(p.k - p.c_tilde))
    return rejected(verify_reason::kCommitteeAliveCount);
  for (const auto& e : r.alive)
    if (e.commitment != r.alive.front().commitment)
      return rejected(verify_reason::kInconsistentCommitments);
  for (const auto& e : r.alive) {
    if (e.j >= sig_pk.size())
      throw std::invalid_argument("user_verify_output: unknown signer id");
    if (e.rho.size() != p.m ||
        !ds_verify(sig_pk[e.j], e.rho_signature, rho_sign_bytes(e.rho)))
      return rejected(verify_reason::kBadOpeningSignature);
  }
  for (const auto& e : r.alive) {
    if (e.commitment.size() != p.m ||
        !ds_verify(sig_pk[e.j], e.commitment_signature,
                   aggregate_sign_bytes(e.commitment, r.u_prime_2)))
      return rejected(verify_reason::kBadAggregateSignature);
  }
  if (r.y.size() != p.m || r.alive.empty())
    return rejected(verify_reason::kCommitmentMismatch);

  const Group& grp = group();
  const auto& fq = grp.scalar_field();
  std::vector<mpz_class> rho_sum(p.m, 0);
  size_t entries = 0;
  for (const auto& e : r.alive) {
    for (size_t c = 0; c < p.m; c++) rho_sum[c] = fq.add(rho_sum[c], e.rho[c]);
    entries++;
  }
  for (const auto& e : r.recovered) {
    if (e.rho.size() != p.m)
      return rejected(verify_reason::kCommitmentMismatch);
    for (size_t c = 0; c < p.m; c++) rho_sum[c] = fq.add(rho_sum[c], e.rho[c]);
    entries++;
  }
  if (entries != p.k) return rejected(verify_reason::kCommitmentMismatch);

  // Precompute g^(w * modulus) for every admissible wrap count w; each
  // component then reduces to one table lookup.
  mpz_class g_mod = grp.exp_g(fq.reduce(modulus_as_mpz(p.modulus)));
  std::unordered_map<std::string, bool> wrap_table;
  {
    mpz_class acc = 1;
    for (uint64_t w = 0; w <= r.u_prime_2.size(); w++) {
      Bytes enc = grp.encode_element(acc);
      wrap_table.emplace(std::string(enc.begin(), enc.end()), true);
      acc = grp.mul(acc, g_mod);
    }
  }
  for (size_t c = 0; c < p.m; c++) {
    mpz_class claimed =
        grp.mul(grp.exp_g(fq.reduce(mpz_class(r.y[c]))), grp.exp_h(rho_sum[c]));
    mpz_class target;
    try {
      target = grp.decode_element(r.alive.front().commitment[c]);
    } catch (const std::invalid_argument&) {
      return rejected(verify_reason::kCommitmentMismatch);
    }
    // target / claimed must equal g^(w * modulus) for some admissible w.
    mpz_class ratio = grp.mul(target, grp.fp().inv(claimed));
    Bytes enc = grp.encode_element(ratio);
    if (!wrap_table.count(std::string(enc.begin(), enc.end())))
      return rejected(verify_reason::kCommitmentMismatch);
  }
  return VerifyResult{true, ""};
}

// ---------------------------------------------------------------------------
// Published-result codecs: a binary form for the final broadcast message and
// a JSON form for result files.

inline Bytes encode_published(const ProtocolParams& p,
                              const PublishedResult& r) {
  const auto& fq = group().scalar_field();
  Bytes out;
  append(out, encode_vec64(r.y));
  append(out, canonical_id_set(r.u_prime_2));
  put_be32(out, uint32_t(r.alive.size()));
  for (const auto& e : r.alive) {
    put_be64(out, e.j);
    if (e.rho.size() != p.m || e.commitment.size() != p.m)
      throw std::invalid_argument("encode_published: bad entry width");
    for (const auto& v : e.rho) append(out, fq.encode(v));
    put_blob(out, e.rho_signature);
    for (const auto& c : e.commitment) append(out, c);
    put_blob(out, e.commitment_signature);
  }
  put_be32(out, uint32_t(r.recovered.size()));
  for (const auto& e : r.recovered) {
    put_be64(out, e.j);
    if (e.rho.size() != p.m)
      throw std::invalid_argument("encode_published: bad entry width");
    for (const auto& v : e.rho) append(out, fq.encode(v));
  }
  return out;
}

inline PublishedResult decode_published(const ProtocolParams& p,
                                        const Bytes& b) {
  const Group& grp = group();
  const auto& fq = grp.scalar_field();
  const size_t sw = fq.encoded_width();
  const size_t ew = grp.element_width();
  PublishedResult r;
  size_t off = 0;
  r.y = parse_vec64(b, off);
  r.u_prime_2 = parse_id_set(b, off);
  auto take = [&](size_t width) {
    if (off + width > b.size())
      throw std::invalid_argument("decode_published: truncated");
    Bytes chunk(b.begin() + off, b.begin() + off + width);
    off += width;
    return chunk;
  };
  uint32_t alive = get_be32(b, off);
  for (uint32_t idx = 0; idx < alive; idx++) {
    PublishedResult::AliveEntry e;
    e.j = get_be64(b, off);
    for (size_t c = 0; c < p.m; c++) e.rho.push_back(fq.decode(take(sw)));
    e.rho_signature = get_blob(b, off);
    for (size_t c = 0; c < p.m; c++) e.commitment.push_back(take(ew));
    e.commitment_signature = get_blob(b, off);
    r.alive.push_back(std::move(e));
  }
  uint32_t recovered = get_be32(b, off);
  for (uint32_t idx = 0; idx < recovered; idx++) {
    PublishedResult::RecoveredEntry e;
    e.j = get_be64(b, off);
    for (size_t c = 0; c < p.m; c++) e.rho.push_back(fq.decode(take(sw)));
    r.recovered.push_back(std::move(e));
  }
  if (off != b.size())
    throw std::invalid_argument("decode_published: trailing bytes");
  return r;
}

inline nlohmann::json published_to_json(const PublishedResult& r) {
  const auto& fq = group().scalar_field();
  nlohmann::json j;
  j["y"] = nlohmann::json::array();
  for (uint64_t v : r.y) j["y"].push_back(std::to_string(v));
  j["u_prime_2"] = r.u_prime_2;
  j["alive"] = nlohmann::json::array();
  for (const auto& e : r.alive) {
    nlohmann::json je;
    je["member"] = e.j;
    je["rho"] = nlohmann::json::array();
    for (const auto& v : e.rho) je["rho"].push_back(to_hex(fq.encode(v)));
    je["rho_signature"] = to_hex(e.rho_signature);
    je["commitment"] = nlohmann::json::array();
    for (const auto& c : e.commitment) je["commitment"].push_back(to_hex(c));
    je["commitment_signature"] = to_hex(e.commitment_signature);
    j["alive"].push_back(std::move(je));
  }
  j["recovered"] = nlohmann::json::array();
  for (const auto& e : r.recovered) {
    nlohmann::json je;
    je["member"] = e.j;
    je["rho"] = nlohmann::json::array();
    for (const auto& v : e.rho) je["rho"].push_back(to_hex(fq.encode(v)));
    j["recovered"].push_back(std::move(je));
  }
  return j;
}

inline PublishedResult published_from_json(const nlohmann::json& j) {
  const auto& fq = group().scalar_field();
  PublishedResult r;
  for (const auto& v : j.at("y"))
    r.y.push_back(std::stoull(v.get<std::string>()));
  r.u_prime_2 = j.at("u_prime_2").get<std::vector<uint64_t>>();
  for (const auto& je : j.at("alive")) {
    PublishedResult::AliveEntry e;
    e.j = je.at("member").get<uint64_t>();
    for (const auto& v : je.at("rho"))
      e.rho.push_back(fq.decode(from_hex(v.get<std::string>())));
    e.rho_signature = from_hex(je.at("rho_signature").get<std::string>());
    for (const auto& c : je.at("commitment"))
      e.commitment.push_back(from_hex(c.get<std::string>()));
    e.commitment_signature =
        from_hex(je.at("commitment_signature").get<std::string>());
    r.alive.push_back(std::move(e));
  }
  for (const auto& je : j.at("recovered")) {
    PublishedResult::RecoveredEntry e;
    e.j = je.at("member").get<uint64_t>();
    for (const auto& v : je.at("rho"))
      e.rho.push_back(fq.decode(from_hex(v.get<std::string>())));
    r.recovered.push_back(std::move(e));
  }
  return r;
}

}  // namespace secagg

#endif  // SECAGG_PROTOCOL_HPP
