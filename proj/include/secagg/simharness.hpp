#ifndef SECAGG_SIMHARNESS_HPP
#define SECAGG_SIMHARNESS_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "secagg/protocol.hpp"
#include "secagg/selection.hpp"

namespace secagg {

// ---------------------------------------------------------------------------
// Server adversary strategies. Every strategy perturbs only what the server
// sends (or publishes); honest-party code is never modified.

enum class Adversary {
  kHonest,
  kDropMessages,     // withhold all server->target deliveries
  kEquivocateKdrop,  // announce two dropout sets to disjoint backup halves
  kInflateU2,        // announce contributor ids that never sent input
  kShrinkU2,         // announce fewer contributors than arrived (below alpha*n)
  kTamperOutput,     // publish y + delta on component 0
  kSubstituteCommitment,  // publish one altered aggregate commitment
  kTamperRho,             // publish one altered blinding-randomness sum
};

inline const char* adversary_name(Adversary a) {
  switch (a) {
    case Adversary::kHonest: return "honest";
    case Adversary::kDropMessages: return "drop-messages";
    case Adversary::kEquivocateKdrop: return "equivocate-kdrop";
    case Adversary::kInflateU2: return "inflate-u2";
    case Adversary::kShrinkU2: return "shrink-u2";
    case Adversary::kTamperOutput: return "tamper-output";
    case Adversary::kSubstituteCommitment: return "substitute-commitment";
    case Adversary::kTamperRho: return "tamper-rho";
  }
  throw std::invalid_argument("adversary_name: bad value");
}

inline Adversary adversary_from_name(std::string s) {
  for (char& c : s)
    if (c == '_') c = '-';  // accept snake_case spellings too
  for (int v = 0; v <= int(Adversary::kTamperRho); v++)
    if (adversary_name(Adversary(v)) == s) return Adversary(v);
  throw std::invalid_argument("unknown adversary strategy: " + s);
}

// ---------------------------------------------------------------------------
// Scenario: the complete deterministic description of one execution.

struct Scenario {
  ProtocolParams params;
  Bytes master_seed;
  uint64_t beacon_round = 0;
  // Explicit n x m input matrix; empty means inputs are derived from
  // master_seed (uniform residues).
  std::vector<std::vector<uint64_t>> inputs;
  std::map<uint64_t, uint8_t> dropout_round;  // party -> first offline round
  std::set<uint64_t> corrupt;  // colluding party ids; may include kServerId
  Adversary adversary = Adversary::kHonest;
  std::vector<uint64_t> adversary_targets;  // strategy-specific party ids
  uint64_t adversary_delta = 1;             // tamper-output offset

  // Throws on structural errors; returns human-readable warnings for
  // stress configurations (rate budgets exceeded), which are legal.
  std::vector<std::string> validate() const {
    params.validate();
    if (master_seed.empty())
      throw std::invalid_argument("scenario: empty master_seed");
    if (!inputs.empty()) {
      if (inputs.size() != params.n)
        throw std::invalid_argument("scenario: inputs must have n rows");
      for (const auto& row : inputs)
        if (row.size() != params.m)
          throw std::invalid_argument("scenario: input rows must have m entries");
    }
    for (const auto& [i, r] : dropout_round) {
      if (i >= params.n)
        throw std::invalid_argument("scenario: dropout id out of range");
      if (r < 1 || r > 6)
        throw std::invalid_argument("scenario: dropout round outside [1,6]");
    }
    for (uint64_t i : corrupt)
      if (i >= params.n && i != kServerId)
        throw std::invalid_argument("scenario: corrupt id out of range");
    for (uint64_t i : adversary_targets)
      if (i >= params.n)
        throw std::invalid_argument("scenario: adversary target out of range");
    std::vector<std::string> warnings;
    size_t corrupt_users = corrupt.size() - corrupt.count(kServerId);
    if (double(corrupt_users) > params.gamma * double(params.n))
      warnings.push_back("corrupt users exceed gamma * n");
    if (double(dropout_round.size()) > params.delta * double(params.n))
      warnings.push_back("dropouts exceed delta * n");
    if (adversary != Adversary::kHonest && !corrupt.count(kServerId))
      warnings.push_back("adversarial strategy with server not in corrupt set");
    return warnings;
  }
};

inline nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json j;
  j["params"] = params_to_json(s.params);
  j["master_seed"] = to_hex(s.master_seed);
  j["beacon_round"] = s.beacon_round;
  if (!s.inputs.empty()) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : s.inputs) {
      nlohmann::json r = nlohmann::json::array();
      for (uint64_t v : row) r.push_back(std::to_string(v));
      rows.push_back(std::move(r));
    }
    j["inputs"] = std::move(rows);
  }
  nlohmann::json drops = nlohmann::json::object();
  for (const auto& [i, r] : s.dropout_round) drops[std::to_string(i)] = r;
  j["dropout_round"] = std::move(drops);
  nlohmann::json corr = nlohmann::json::array();
  for (uint64_t i : s.corrupt)
    corr.push_back(i == kServerId ? "server" : std::to_string(i));
  j["corrupt"] = std::move(corr);
  j["adversary"] = adversary_name(s.adversary);
  if (!s.adversary_targets.empty())
    j["adversary_targets"] = s.adversary_targets;
  j["adversary_delta"] = std::to_string(s.adversary_delta);
  return j;
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  s.params = params_from_json(j.at("params"));
  s.master_seed = from_hex(j.at("master_seed").get<std::string>());
  s.beacon_round = j.value("beacon_round", uint64_t(0));
  if (j.contains("inputs")) {
    for (const auto& row : j.at("inputs")) {
      std::vector<uint64_t> r;
      for (const auto& v : row) r.push_back(std::stoull(v.get<std::string>()));
      s.inputs.push_back(std::move(r));
    }
  }
  if (j.contains("dropout_round"))
    for (const auto& [key, val] : j.at("dropout_round").items())
      s.dropout_round[std::stoull(key)] = val.get<uint8_t>();
  if (j.contains("corrupt"))
    for (const auto& v : j.at("corrupt"))
      s.corrupt.insert(v.is_string() && v.get<std::string>() == "server"
                           ? kServerId
                           : v.is_string() ? std::stoull(v.get<std::string>())
                                           : v.get<uint64_t>());
  if (j.contains("adversary"))
    s.adversary = adversary_from_name(j.at("adversary").get<std::string>());
  if (j.contains("adversary_targets"))
    s.adversary_targets = j.at("adversary_targets").get<std::vector<uint64_t>>();
  if (j.contains("adversary_delta"))
    s.adversary_delta = std::stoull(j.at("adversary_delta").get<std::string>());
  return s;
}

// ---------------------------------------------------------------------------
// Randomness beacon. Executions draw the committee seed from here; the
// default derives it from the scenario seed, but the interface admits an
// external beacon.

class Beacon {
 public:
  virtual ~Beacon() = default;
  virtual Bytes value(uint64_t round_index) const = 0;
};

class SeededBeacon : public Beacon {
 public:
  explicit SeededBeacon(Bytes seed) : seed_(std::move(seed)) {}
  Bytes value(uint64_t round_index) const override {
    Bytes in = to_bytes("secagg.beacon.v1");
    append(in, seed_);
    append(in, be64(round_index));
    return sha256(in);
  }

 private:
  Bytes seed_;
};

// ---------------------------------------------------------------------------
// Per-party accounting and the execution result.

struct PartyStats {
  uint64_t messages_sent = 0;
  uint64_t messages_received = 0;
  uint64_t bytes_sent = 0;
  uint64_t bytes_received = 0;
  uint32_t rounds_online = 6;
  bool is_committee = false;
  uint32_t backup_for = 0;  // number of neighborhoods containing this party
};

struct ExecutionResult {
  std::optional<Abort> abort;  // first honest abort (lowest party id)
  std::optional<std::vector<uint64_t>> output;
  std::optional<PublishedResult> published;
  std::vector<uint64_t> expected_sum;  // plain sum over actual contributors
  std::vector<uint64_t> committee;
  std::vector<std::vector<uint64_t>> neighborhoods;
  std::vector<uint64_t> u_prime_2;  // contributors the server actually saw
  std::vector<uint64_t> k_drop;     // committee members with no round-3 reply
  uint32_t recoveries = 0;
  bool share_mismatch = false;  // extra shares disagreed with reconstruction
  std::map<uint64_t, uint32_t> harvested;  // declared-dropped -> shares obtained
  std::map<uint64_t, VerifyResult> verdicts;  // honest users (lisa-plus)
  std::vector<PartyStats> party_stats;
  PartyStats server_stats;
  std::vector<Message> transcript;

  bool completed() const { return output.has_value(); }
};

struct EngineOptions {
  bool keep_transcript = true;
  bool verify_outputs = true;  // run user-side checks in lisa-plus mode
  // Precomputed party keys (must match the scenario seed and n); campaigns
  // pass these to avoid rederiving the PKI every round.
  std::shared_ptr<const std::vector<PartyKeys>> preset_keys;
};

// ---------------------------------------------------------------------------
// Key derivation for the simulated PKI: every party's keys follow
// deterministically from the scenario seed, snapshotted before round 1.

inline PartyKeys derive_party_keys(const Bytes& master_seed, uint64_t id) {
  Bytes ps = derive_seed(master_seed, "party", id);
  PartyKeys k;
  k.mask = ka_gen(derive_seed(ps, "keys.mask"));
  k.committee = ka_gen(derive_seed(ps, "keys.committee"));
  k.sig = ds_gen(derive_seed(ps, "keys.sig"));
  return k;
}

// ---------------------------------------------------------------------------
// Corruption / dropout sampling: exactly floor(gamma*n) corrupt users and
// floor(delta*n) dropped users, uniformly chosen, dropout rounds uniform on
// [2,5].

inline std::pair<std::set<uint64_t>, std::map<uint64_t, uint8_t>>
sample_corruptions_and_dropouts(const Bytes& master_seed, uint64_t n,
                                double gamma, double delta) {
  if (!(gamma >= 0.0 && gamma < 1.0) || !(delta >= 0.0 && delta < 1.0))
    throw std::invalid_argument("sample: rates must lie in [0,1)");
  uint64_t n_corrupt = uint64_t(gamma * double(n));
  uint64_t n_dropped = uint64_t(delta * double(n));
  std::vector<uint64_t> universe(n);
  for (uint64_t i = 0; i < n; i++) universe[i] = i;
  std::set<uint64_t> corrupt;
  for (uint64_t i :
       select(derive_seed(master_seed, "sample.corrupt"), universe, n_corrupt))
    corrupt.insert(i);
  std::map<uint64_t, uint8_t> dropout;
  PrgStream rounds(derive_seed(master_seed, "sample.rounds"));
  for (uint64_t i :
       select(derive_seed(master_seed, "sample.dropout"), universe, n_dropped))
    dropout[i] = uint8_t(2 + rounds.below(4));
  return {std::move(corrupt), std::move(dropout)};
}

// Committee members that drop before completing key sharing (round 2) leave
// nothing to recover and force an abort. Campaign and correctness runs
// therefore move committee dropouts to round 3 or later; with `exact` every
// committee dropout lands on round 3, so each one exercises recovery.
inline void clamp_committee_dropout_rounds(
    std::map<uint64_t, uint8_t>& dropout_round,
    const std::vector<uint64_t>& committee, bool exact = false) {
  for (uint64_t j : committee) {
    auto it = dropout_round.find(j);
    if (it == dropout_round.end()) continue;
    if (exact)
      it->second = 3;
    else if (it->second < 3)
      it->second = 3;
  }
}

// ---------------------------------------------------------------------------
// The engine: six synchronous rounds, star topology. Parties within a round
// step in ascending id order; the first honest abort (by party id) ends the
// execution after the round completes.

class Engine {
 public:
  explicit Engine(Scenario scenario, EngineOptions options = {},
                  std::shared_ptr<const Beacon> beacon = nullptr)
      : s_(std::move(scenario)),
        opt_(options),
        beacon_(beacon ? std::move(beacon)
                       : std::make_shared<SeededBeacon>(s_.master_seed)) {
    warnings_ = s_.validate();
  }

  const std::vector<std::string>& warnings() const { return warnings_; }

  ExecutionResult run() {
    const ProtocolParams& p = s_.params;
    res_ = ExecutionResult{};
    res_.party_stats.assign(p.n, PartyStats{});
    for (const auto& [i, r] : s_.dropout_round)
      res_.party_stats[i].rounds_online = r - 1;

    if (opt_.preset_keys && opt_.preset_keys->size() == p.n) {
      keys_ = opt_.preset_keys;
    } else {
      auto fresh = std::make_shared<std::vector<PartyKeys>>();
      fresh->reserve(p.n);
      for (uint64_t i = 0; i < p.n; i++)
        fresh->push_back(derive_party_keys(s_.master_seed, i));
      keys_ = std::move(fresh);
    }
    dir_ = PublicDirectory{};
    for (uint64_t i = 0; i < p.n; i++) {
      dir_.mask_pk.push_back(key(i).mask.pk);
      dir_.committee_pk.push_back(key(i).committee.pk);
      dir_.sig_pk.push_back(key(i).sig.pk);
    }

    round1();
    if (!halted()) round2();
    if (!halted()) round3();
    if (!halted() && !skip_recovery_) round4();
    if (!halted() && !skip_recovery_) round5();
    if (!halted()) round6();
    return std::move(res_);
  }

 private:
  const PartyKeys& key(uint64_t i) const { return (*keys_)[i]; }

  bool offline(uint64_t i, uint8_t round) const {
    auto it = s_.dropout_round.find(i);
    return it != s_.dropout_round.end() && round >= it->second;
  }

  bool corrupt(uint64_t i) const { return s_.corrupt.count(i) > 0; }

  bool drop_target(uint64_t i) const {
    return s_.adversary == Adversary::kDropMessages &&
           std::count(s_.adversary_targets.begin(), s_.adversary_targets.end(),
                      i) > 0;
  }

  bool halted() const { return res_.abort.has_value(); }

  void record_abort(const Abort& a) {
    if (!res_.abort || a.party < res_.abort->party) res_.abort = a;
  }

  // Sends always count against the sender; delivery requires the receiver to
  // be online (the server is always online).
  bool send(Message m) {
    size_t sz = m.wire_size();
    bump(m.sender, true, sz);
    bool delivered =
        m.receiver == kServerId || !offline(m.receiver, m.round);
    if (delivered) bump(m.receiver, false, sz);
    if (opt_.keep_transcript) res_.transcript.push_back(std::move(m));
    return delivered;
  }

  void bump(uint64_t id, bool sent, size_t sz) {
    PartyStats& st =
        id == kServerId ? res_.server_stats : res_.party_stats[id];
    if (sent) {
      st.messages_sent++;
      st.bytes_sent += sz;
    } else {
      st.messages_received++;
      st.bytes_received += sz;
    }
  }

  std::vector<uint64_t> input_for(uint64_t i) {
    if (!s_.inputs.empty()) {
      std::vector<uint64_t> x = s_.inputs[i];
      for (auto& v : x) v = mod_reduce(v, s_.params.modulus);
      return x;
    }
    return prg_expand(derive_seed(s_.master_seed, "inputs", i), s_.params.m,
                      s_.params.modulus);
  }

  void round1() {
    const ProtocolParams& p = s_.params;
    beacon_bytes_ = beacon_->value(s_.beacon_round);
    BeaconSeed q{beacon_bytes_, s_.beacon_round};
    res_.committee = committee(q, p.n, p.k);
    for (uint64_t j : res_.committee) {
      res_.neighborhoods.push_back(neighborhood(q, j, p.n, p.ell));
      res_.party_stats[j].is_committee = true;
    }
    for (const auto& l : res_.neighborhoods)
      for (uint64_t i : l) res_.party_stats[i].backup_for++;
    got_beacon_.assign(p.n, false);
    for (uint64_t i = 0; i < p.n; i++) {
      if (drop_target(i)) continue;
      bool ok = send(Message{1, MsgType::kBeacon, kServerId, i, beacon_bytes_});
      if (ok && !offline(i, 1)) got_beacon_[i] = true;
    }
  }

  void round2() {
    const ProtocolParams& p = s_.params;
    bool plus = p.mode == Mode::kIntegrity;
    held_shares_.clear();
    r3in_ = CommitteeRound3In{};
    enc_rand_by_member_.clear();
    masked_.clear();
    for (uint64_t i = 0; i < p.n; i++) {
      if (!got_beacon_[i] || offline(i, 2)) continue;
      auto out = user_round2(p, i, input_for(i), key(i), res_.committee,
                             dir_, derive_seed(s_.master_seed, "round2", i));
      send(Message{2, MsgType::kMaskedInput, i, kServerId,
                   encode_vec64(out.masked.values)});
      if (!drop_target(i)) masked_.push_back(std::move(out.masked));
      if (plus) {
        Bytes payload = commitment_concat(out.bundle->commitments);
        put_blob(payload, out.bundle->signature);
        put_be32(payload, uint32_t(out.bundle->enc_rand_shares.size()));
        for (const auto& [j, ct] : out.bundle->enc_rand_shares) {
          put_be64(payload, j);
          put_blob(payload, ct);
        }
        send(Message{2, MsgType::kCommitment, i, kServerId,
                     std::move(payload)});
        if (!drop_target(i)) {
          r3in_.commitments[i] = out.bundle->commitments;
          r3in_.commitment_sigs[i] = out.bundle->signature;
          for (const auto& [j, ct] : out.bundle->enc_rand_shares)
            enc_rand_by_member_[j][i] = ct;
        }
      }
      // Committee members share their committee secret in the same round.
      if (res_.party_stats[i].is_committee) {
        size_t pos = size_t(std::find(res_.committee.begin(),
                                      res_.committee.end(), i) -
                            res_.committee.begin());
        auto shares =
            committee_round2(p, i, key(i), res_.neighborhoods[pos], dir_,
                             derive_seed(s_.master_seed, "keyshare", i));
        for (const auto& es : shares) {
          Bytes up = be64(es.to);
          put_blob(up, es.ciphertext);
          send(Message{2, MsgType::kEncryptedKeyShare, i, kServerId, up});
          if (drop_target(es.to)) continue;
          Bytes down = be64(es.from);
          put_blob(down, es.ciphertext);
          bool ok = send(Message{2, MsgType::kEncryptedKeyShare, kServerId,
                                 es.to, std::move(down)});
          if (ok) held_shares_[es.to][es.from] = es.ciphertext;
        }
      }
    }
    for (const auto& mv : masked_) res_.u_prime_2.push_back(mv.sender);
    std::sort(res_.u_prime_2.begin(), res_.u_prime_2.end());

    announced_u2_ = res_.u_prime_2;
    if (s_.adversary == Adversary::kShrinkU2) {
      size_t cap = size_t(std::ceil(p.alpha * double(p.n)));
      cap = cap > 0 ? cap - 1 : 0;
      if (announced_u2_.size() > cap) announced_u2_.resize(cap);
    } else if (s_.adversary == Adversary::kInflateU2) {
      for (uint64_t extra : s_.adversary_targets)
        if (!std::count(announced_u2_.begin(), announced_u2_.end(), extra))
          announced_u2_.push_back(extra);
      std::sort(announced_u2_.begin(), announced_u2_.end());
    }

    res_.expected_sum.assign(p.m, 0);
    for (uint64_t i : res_.u_prime_2)
      mod_add_in(res_.expected_sum, input_for(i), p.modulus);
  }

  void round3() {
    const ProtocolParams& p = s_.params;
    bool plus = p.mode == Mode::kIntegrity;
    blindings_.clear();
    integrity_.clear();
    std::vector<uint64_t> alive;
    for (uint64_t j : res_.committee) {
      if (drop_target(j) || !got_beacon_[j]) continue;
      Bytes payload = canonical_id_set(announced_u2_);
      CommitteeRound3In in;
      if (plus) {
        put_be32(payload, uint32_t(announced_u2_.size()));
        for (uint64_t i : announced_u2_) {
          put_be64(payload, i);
          auto ci = r3in_.commitments.find(i);
          if (ci != r3in_.commitments.end()) {
            payload.push_back(1);
            append(payload, commitment_concat(ci->second));
            put_blob(payload, r3in_.commitment_sigs[i]);
            put_blob(payload, enc_rand_by_member_[j][i]);
            in.commitments[i] = ci->second;
            in.commitment_sigs[i] = r3in_.commitment_sigs[i];
            in.enc_rand_shares[i] = enc_rand_by_member_[j][i];
          } else {
            payload.push_back(0);  // server holds nothing for this id
          }
        }
      }
      bool ok = send(Message{3, MsgType::kU2Announce, kServerId, j,
                             std::move(payload)});
      if (!ok || offline(j, 3)) continue;
      auto out = committee_round3(p, j, key(j), announced_u2_, dir_, in);
      if (!out.ok()) {
        if (!corrupt(j)) record_abort(out.abort());
        continue;
      }
      send(Message{3, MsgType::kPartialBlinding, j, kServerId,
                   encode_vec64(out.value().blinding.values)});
      blindings_[j] = std::move(out.value().blinding.values);
      alive.push_back(j);
      if (plus) {
        auto& integ = *out.value().integrity;
        Bytes rp;
        const auto& fq = group().scalar_field();
        for (const auto& v : integ.rho) append(rp, fq.encode(v));
        put_blob(rp, integ.rho_signature);
        append(rp, commitment_concat(integ.aggregate_commitment));
        put_blob(rp, integ.aggregate_signature);
        send(Message{3, MsgType::kRhoSigma, j, kServerId, std::move(rp)});
        integrity_[j] = std::move(integ);
      }
    }
    if (halted()) return;
    for (uint64_t j : res_.committee)
      if (!blindings_.count(j)) res_.k_drop.push_back(j);
    std::sort(res_.k_drop.begin(), res_.k_drop.end());
    skip_recovery_ =
        res_.k_drop.empty() && s_.adversary != Adversary::kEquivocateKdrop;
  }

  // The dropout set each backup is told about. With signatures in play the
  // server must equivocate: backups at even sorted positions see the true
  // set plus the victim, the rest see the true set, and colluding backups
  // sign both. Semi-honest mode has no consistency mechanism to evade, so
  // the server simply lies to everyone.
  std::vector<uint64_t> declared_drop_for(uint64_t backup,
                                          const std::vector<uint64_t>& all) {
    if (s_.adversary != Adversary::kEquivocateKdrop) return res_.k_drop;
    if (s_.params.mode != Mode::kSemiHonest) {
      size_t pos = size_t(std::find(all.begin(), all.end(), backup) -
                          all.begin());
      if (pos % 2 == 1) return res_.k_drop;
    }
    std::vector<uint64_t> forged = res_.k_drop;
    for (uint64_t v : equivocation_victims())
      if (!std::count(forged.begin(), forged.end(), v)) forged.push_back(v);
    std::sort(forged.begin(), forged.end());
    return forged;
  }

  // Victims default to the first honest committee member still alive.
  std::vector<uint64_t> equivocation_victims() {
    if (!s_.adversary_targets.empty()) return s_.adversary_targets;
    for (uint64_t j : res_.committee)
      if (blindings_.count(j) && !corrupt(j)) return {j};
    return {};
  }

  std::vector<uint64_t> all_backups() const {
    std::set<uint64_t> b;
    for (const auto& l : res_.neighborhoods) b.insert(l.begin(), l.end());
    return std::vector<uint64_t>(b.begin(), b.end());
  }

  void round4() {
    const ProtocolParams& p = s_.params;
    acks_.clear();
    auto backups = all_backups();
    for (uint64_t i : backups) {
      if (drop_target(i)) continue;
      std::vector<uint64_t> declared = declared_drop_for(i, backups);
      bool ok = send(Message{4, MsgType::kKdrop, kServerId, i,
                             canonical_id_set(declared)});
      if (!ok || offline(i, 4) || !got_beacon_[i]) continue;
      if (corrupt(i) && s_.adversary == Adversary::kEquivocateKdrop) {
        // Colluding backups acknowledge every variant the server fabricates.
        for (bool forged : {false, true}) {
          std::vector<uint64_t> variant =
              forged ? declared_drop_for(backups[0], backups) : res_.k_drop;
          Bytes sig = ds_sign(key(i).sig.sk, canonical_id_set(variant));
          acks_[canonical_id_set(variant)][i] = sig;
        }
        Bytes payload;
        put_blob(payload, acks_[canonical_id_set(declared)][i]);
        send(Message{4, MsgType::kAck, i, kServerId, std::move(payload)});
        continue;
      }
      auto out = backup_round4(p, i, key(i), declared);
      if (!out.ok()) {
        if (!corrupt(i)) record_abort(out.abort());
        continue;
      }
      acks_[canonical_id_set(declared)][i] = out.value();
      Bytes payload;
      put_blob(payload, out.value());
      send(Message{4, MsgType::kAck, i, kServerId, std::move(payload)});
    }
  }

  void round5() {
    const ProtocolParams& p = s_.params;
    shares_for_.clear();
    auto backups = all_backups();
    for (uint64_t i : backups) {
      if (drop_target(i)) continue;
      std::vector<uint64_t> declared = declared_drop_for(i, backups);
      if (declared.empty()) continue;
      bool holds_any = false;
      for (uint64_t j : declared)
        if (held_shares_.count(i) && held_shares_[i].count(j))
          holds_any = true;
      if (!holds_any) continue;
      Bytes canon = canonical_id_set(declared);
      DropDeclaration decl;
      decl.k_drop = declared;
      decl.signatures = acks_[canon];
      Bytes payload = canon;
      put_be32(payload, uint32_t(decl.signatures.size()));
      for (const auto& [signer, sig] : decl.signatures) {
        put_be64(payload, signer);
        put_blob(payload, sig);
      }
      bool ok = send(Message{5, MsgType::kAckBundle, kServerId, i,
                             std::move(payload)});
      if (!ok || offline(i, 5) || !got_beacon_[i]) continue;

      std::vector<ReleasedShare> released;
      if (corrupt(i) && s_.adversary == Adversary::kEquivocateKdrop) {
        // Colluding backups surrender held shares without any quorum check.
        const auto& fq = group().scalar_field();
        for (uint64_t j : declared) {
          auto held = held_shares_[i].find(j);
          if (held == held_shares_[i].end()) continue;
          Bytes aead_key = ka_derive("enc", key(i).mask.sk, dir_.mask_pk[j]);
          auto plain = ae_decrypt(aead_key, ae_nonce(2, j, i), held->second);
          if (!plain) continue;
          size_t off = 0;
          uint32_t index = get_be32(*plain, off);
          released.push_back(ReleasedShare{
              j, Share{index, fq.decode(Bytes(plain->begin() + 4,
                                              plain->end()))}});
        }
      } else {
        auto out = backup_round5(p, i, key(i), decl, res_.neighborhoods,
                                 held_shares_[i], dir_);
        if (!out.ok()) {
          if (!corrupt(i)) record_abort(out.abort());
          continue;
        }
        released = std::move(out.value());
      }
      for (const auto& rs : released) {
        Bytes payload2 = be64(rs.j);
        put_be32(payload2, rs.share.index);
        append(payload2, group().scalar_field().encode(rs.share.value));
        send(Message{5, MsgType::kShareRelease, i, kServerId,
                     std::move(payload2)});
        shares_for_[rs.j].push_back(rs.share);
        res_.harvested[rs.j]++;
      }
    }
  }

  void round6() {
    const ProtocolParams& p = s_.params;
    bool plus = p.mode == Mode::kIntegrity;
    auto c_agg = aggregate_masked(p, masked_);
    std::vector<std::vector<uint64_t>> blinds;
    for (auto& [j, b] : blindings_) blinds.push_back(b);

    PublishedResult pub;
    pub.u_prime_2 = announced_u2_;
    for (uint64_t j : res_.k_drop) {
      auto& shares = shares_for_[j];
      auto rec = recover_secret(p, shares);
      if (!rec.ok()) {
        record_abort(rec.abort());
        return;
      }
      // Extra shares beyond the reconstruction set must lie on the same
      // polynomial; disagreement means some backup released a false share.
      std::vector<Share> base(shares.begin(), shares.begin() + p.t);
      for (size_t e = p.t; e < shares.size(); e++)
        if (ss_interpolate(group().scalar_field(), base, shares[e].index) !=
            shares[e].value)
          res_.share_mismatch = true;
      res_.recoveries++;
      blinds.push_back(recompute_blinding(p, rec.value(), announced_u2_, dir_));
      if (plus) {
        auto rho = recover_rho(p, rec.value(), j, announced_u2_,
                               enc_rand_by_member_[j], dir_);
        if (!rho.ok()) {
          record_abort(rho.abort());
          return;
        }
        pub.recovered.push_back({j, std::move(rho.value())});
      }
    }
    pub.y = finalize_output(p, c_agg, blinds);
    if (plus)
      for (auto& [j, integ] : integrity_)
        pub.alive.push_back({j, integ.rho, integ.rho_signature,
                             integ.aggregate_commitment,
                             integ.aggregate_signature});

    apply_publish_tampering(pub);

    Bytes payload = encode_published(p, pub);
    for (uint64_t i = 0; i < p.n; i++) {
      if (drop_target(i)) continue;
      bool ok = send(Message{6, MsgType::kPublish, kServerId, i, payload});
      if (!ok || offline(i, 6) || corrupt(i)) continue;
      if (plus && opt_.verify_outputs)
        res_.verdicts[i] = user_verify_output(p, pub, dir_.sig_pk);
    }
    res_.output = pub.y;
    res_.published = std::move(pub);
  }

  void apply_publish_tampering(PublishedResult& pub) {
    const ProtocolParams& p = s_.params;
    switch (s_.adversary) {
      case Adversary::kTamperOutput:
        if (!pub.y.empty())
          pub.y[0] = mod_add(pub.y[0], s_.adversary_delta, p.modulus);
        break;
      case Adversary::kSubstituteCommitment:
        // One altered aggregate commitment: verifiers see disagreement among
        // the published copies before any signature check.
        if (!pub.alive.empty() && !pub.alive[0].commitment.empty()) {
          const Group& grp = group();
          mpz_class c = grp.decode_element(pub.alive[0].commitment[0]);
          pub.alive[0].commitment[0] =
              grp.encode_element(grp.mul(c, grp.g()));
        }
        break;
      case Adversary::kTamperRho:
        if (!pub.alive.empty() && !pub.alive[0].rho.empty())
          pub.alive[0].rho[0] =
              group().scalar_field().add(pub.alive[0].rho[0], 1);
        break;
      default:
        break;
    }
  }

  Scenario s_;
  EngineOptions opt_;
  std::shared_ptr<const Beacon> beacon_;
  std::vector<std::string> warnings_;

  ExecutionResult res_;
  std::shared_ptr<const std::vector<PartyKeys>> keys_;
  PublicDirectory dir_;
  Bytes beacon_bytes_;
  std::vector<bool> got_beacon_;
  std::vector<MaskedVector> masked_;
  std::vector<uint64_t> announced_u2_;
  CommitteeRound3In r3in_;
  std::map<uint64_t, std::map<uint64_t, Bytes>> enc_rand_by_member_;
  std::map<uint64_t, std::map<uint64_t, Bytes>> held_shares_;  // backup -> j
  std::map<uint64_t, std::vector<uint64_t>> blindings_;
  std::map<uint64_t, CommitteeIntegrityOut> integrity_;
  std::map<Bytes, std::map<uint64_t, Bytes>> acks_;  // canonical set -> sigs
  std::map<uint64_t, std::vector<Share>> shares_for_;
  bool skip_recovery_ = false;
};

inline ExecutionResult run_scenario(const Scenario& s,
                                    EngineOptions options = {}) {
  Engine engine(s, options);
  return engine.run();
}

// ---------------------------------------------------------------------------
// Transcript files: newline-delimited JSON, scenario first, then one line
// per message in send order.

inline std::string transcript_to_ndjson(const Scenario& s,
                                        const std::vector<Message>& transcript) {
  std::string out = scenario_to_json(s).dump();
  out.push_back('\n');
  for (const auto& m : transcript) {
    out += message_to_json(m).dump();
    out.push_back('\n');
  }
  return out;
}

inline std::pair<Scenario, std::vector<Message>> transcript_from_ndjson(
    const std::string& text) {
  std::pair<Scenario, std::vector<Message>> out;
  size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    if (first) {
      out.first = scenario_from_json(j);
      first = false;
    } else {
      out.second.push_back(message_from_json(j));
    }
  }
  if (first) throw std::invalid_argument("transcript: missing scenario line");
  return out;
}

}  // namespace secagg

#endif  // SECAGG_SIMHARNESS_HPP
