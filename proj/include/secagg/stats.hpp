#ifndef SECAGG_STATS_HPP
#define SECAGG_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "secagg/simharness.hpp"

namespace secagg {

// ---------------------------------------------------------------------------
// Summary statistics over a sample.

struct SummaryStat {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation
  double min = 0.0;
  double max = 0.0;
};

inline SummaryStat summarize(const std::vector<double>& xs) {
  SummaryStat s;
  if (xs.empty()) return s;
  double sum = 0.0;
  s.min = xs[0];
  s.max = xs[0];
  for (double x : xs) {
    sum += x;
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  s.mean = sum / double(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / double(xs.size() - 1));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Expansion factor: bytes a regular user exchanges relative to an insecure
// baseline where the user uploads its m-vector and downloads the aggregate,
// both in the same fixed-width wire encoding.

inline uint64_t baseline_user_bytes(uint64_t m) {
  return 2 * (Message::kHeaderSize + 4 + 8 * m);
}

// Mean over users that held no special role this execution and stayed
// online throughout (dropouts exchange a fraction of the traffic and say
// nothing about steady-state cost); falls back to all users when every
// party was committee or backup.
inline double expansion_factor(const ExecutionResult& r,
                               const ProtocolParams& p) {
  uint64_t total = 0, count = 0;
  for (const auto& st : r.party_stats) {
    if (st.is_committee || st.backup_for > 0 || st.rounds_online < 6) continue;
    total += st.bytes_sent + st.bytes_received;
    count++;
  }
  if (count == 0) {
    for (const auto& st : r.party_stats) {
      total += st.bytes_sent + st.bytes_received;
      count++;
    }
  }
  return double(total) / double(count) / double(baseline_user_bytes(p.m));
}

// ---------------------------------------------------------------------------
// Campaign: R protocol rounds under one long-term PKI, a fresh beacon value
// and freshly sampled corruption/dropout sets per round.

struct RoundRow {
  uint64_t round = 0;
  uint32_t committee_dropouts = 0;
  uint32_t recoveries = 0;
  uint64_t messages = 0;  // all messages sent that round (users + server)
  uint64_t bytes = 0;
  bool completed = false;
};

struct CampaignReport {
  ProtocolParams params;
  uint32_t rounds = 0;
  SummaryStat committee_selections;  // per user, over the whole campaign
  SummaryStat backup_selections;
  SummaryStat recoveries_per_round;
  std::vector<uint32_t> recovery_ecdf;  // sorted per-round recovery counts
  SummaryStat messages_per_user;        // sent + received, campaign totals
  SummaryStat bytes_per_user;
  double per_round_mean_messages = 0.0;  // messages_per_user.mean / rounds
  double expansion = 0.0;                // mean per-round expansion factor
  uint32_t completed_rounds = 0;
  std::vector<RoundRow> rows;
};

struct CampaignOptions {
  // Move committee dropouts to round 3 so each one exercises recovery
  // instead of aborting the round (a round-2 committee dropout leaves
  // nothing to reconstruct).
  bool clamp_committee_dropouts = true;
  Adversary adversary = Adversary::kHonest;
};

inline CampaignReport run_campaign(const ProtocolParams& params,
                                   uint32_t rounds, const Bytes& master_seed,
                                   CampaignOptions opt = {}) {
  if (rounds < 1) throw std::invalid_argument("run_campaign: rounds >= 1");
  params.validate();
  const bool debug = []() {
    const char* v = std::getenv("SECAGG_LOG");
    return v && std::string_view(v) == "debug";
  }();

  auto keys = std::make_shared<std::vector<PartyKeys>>();
  keys->reserve(params.n);
  for (uint64_t i = 0; i < params.n; i++)
    keys->push_back(derive_party_keys(master_seed, i));

  CampaignReport rep;
  rep.params = params;
  rep.rounds = rounds;
  std::vector<double> committee_counts(params.n, 0.0);
  std::vector<double> backup_counts(params.n, 0.0);
  std::vector<double> msg_totals(params.n, 0.0);
  std::vector<double> byte_totals(params.n, 0.0);
  std::vector<double> recoveries;
  double expansion_sum = 0.0;
  SeededBeacon beacon(master_seed);

  for (uint64_t r = 0; r < rounds; r++) {
    Scenario s;
    s.params = params;
    s.master_seed = derive_seed(master_seed, "campaign.round", r);
    s.beacon_round = r;
    s.adversary = opt.adversary;
    auto [corrupt, dropout] = sample_corruptions_and_dropouts(
        s.master_seed, params.n, params.gamma, params.delta);
    if (opt.clamp_committee_dropouts) {
      BeaconSeed q{beacon.value(r), r};
      clamp_committee_dropout_rounds(
          dropout, committee(q, params.n, params.k), /*exact=*/true);
    }
    s.corrupt = std::move(corrupt);
    s.dropout_round = std::move(dropout);

    EngineOptions eopt;
    eopt.keep_transcript = false;
    eopt.verify_outputs = false;
    // Party keys follow the campaign seed, not the per-round seed.
    eopt.preset_keys = keys;
    Engine engine(s, eopt, std::make_shared<SeededBeacon>(master_seed));
    ExecutionResult res = engine.run();

    RoundRow row;
    row.round = r;
    row.committee_dropouts = uint32_t(res.k_drop.size());
    row.recoveries = res.recoveries;
    row.completed = res.completed();
    for (uint64_t i = 0; i < params.n; i++) {
      const PartyStats& st = res.party_stats[i];
      committee_counts[i] += st.is_committee ? 1.0 : 0.0;
      backup_counts[i] += double(st.backup_for);
      msg_totals[i] += double(st.messages_sent + st.messages_received);
      byte_totals[i] += double(st.bytes_sent + st.bytes_received);
      row.messages += st.messages_sent;
      row.bytes += st.bytes_sent;
    }
    row.messages += res.server_stats.messages_sent;
    row.bytes += res.server_stats.bytes_sent;
    recoveries.push_back(double(res.recoveries));
    expansion_sum += expansion_factor(res, params);
    if (res.completed()) rep.completed_rounds++;
    rep.rows.push_back(row);
    if (debug)
      std::fprintf(stderr, "round %llu: drops=%u recoveries=%u messages=%llu\n",
                   (unsigned long long)r, row.committee_dropouts,
                   row.recoveries, (unsigned long long)row.messages);
  }

  rep.committee_selections = summarize(committee_counts);
  rep.backup_selections = summarize(backup_counts);
  rep.recoveries_per_round = summarize(recoveries);
  for (double v : recoveries) rep.recovery_ecdf.push_back(uint32_t(v));
  std::sort(rep.recovery_ecdf.begin(), rep.recovery_ecdf.end());
  rep.messages_per_user = summarize(msg_totals);
  rep.bytes_per_user = summarize(byte_totals);
  rep.per_round_mean_messages = rep.messages_per_user.mean / double(rounds);
  rep.expansion = expansion_sum / double(rounds);
  return rep;
}

// ---------------------------------------------------------------------------
// Report emission. CSV: one row per (round, metric), then a summary block;
// RFC-4180 quoting.

inline std::string csv_quote(const std::string& field) {
  bool needs = field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string campaign_report_to_csv(const CampaignReport& rep) {
  std::string out = "section,round,metric,value\r\n";
  auto row = [&](const std::string& section, const std::string& round,
                 const std::string& metric, const std::string& value) {
    out += csv_quote(section) + "," + csv_quote(round) + "," +
           csv_quote(metric) + "," + csv_quote(value) + "\r\n";
  };
  for (const auto& r : rep.rows) {
    std::string idx = std::to_string(r.round);
    row("round", idx, "committee_dropouts", std::to_string(r.committee_dropouts));
    row("round", idx, "recoveries", std::to_string(r.recoveries));
    row("round", idx, "messages", std::to_string(r.messages));
    row("round", idx, "bytes", std::to_string(r.bytes));
    row("round", idx, "completed", r.completed ? "1" : "0");
  }
  auto stat = [&](const std::string& name, const SummaryStat& s) {
    row("summary", "", name + "_mean", format_double(s.mean));
    row("summary", "", name + "_sd", format_double(s.sd));
    row("summary", "", name + "_min", format_double(s.min));
    row("summary", "", name + "_max", format_double(s.max));
  };
  row("summary", "", "rounds", std::to_string(rep.rounds));
  row("summary", "", "completed_rounds", std::to_string(rep.completed_rounds));
  stat("committee_selections", rep.committee_selections);
  stat("backup_selections", rep.backup_selections);
  stat("recoveries_per_round", rep.recoveries_per_round);
  stat("messages_per_user", rep.messages_per_user);
  stat("bytes_per_user", rep.bytes_per_user);
  row("summary", "", "per_round_mean_messages",
      format_double(rep.per_round_mean_messages));
  row("summary", "", "expansion_factor", format_double(rep.expansion));
  return out;
}

inline nlohmann::json summary_to_json(const SummaryStat& s) {
  return {{"mean", s.mean}, {"sd", s.sd}, {"min", s.min}, {"max", s.max}};
}

inline nlohmann::json campaign_report_to_json(const CampaignReport& rep) {
  nlohmann::json j;
  j["params"] = params_to_json(rep.params);
  j["rounds"] = rep.rounds;
  j["completed_rounds"] = rep.completed_rounds;
  j["committee_selections"] = summary_to_json(rep.committee_selections);
  j["backup_selections"] = summary_to_json(rep.backup_selections);
  j["recoveries_per_round"] = summary_to_json(rep.recoveries_per_round);
  j["recovery_ecdf"] = rep.recovery_ecdf;
  j["messages_per_user"] = summary_to_json(rep.messages_per_user);
  j["bytes_per_user"] = summary_to_json(rep.bytes_per_user);
  j["per_round_mean_messages"] = rep.per_round_mean_messages;
  j["expansion_factor"] = rep.expansion;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"round", r.round},
                    {"committee_dropouts", r.committee_dropouts},
                    {"recoveries", r.recoveries},
                    {"messages", r.messages},
                    {"bytes", r.bytes},
                    {"completed", r.completed}});
  }
  j["per_round"] = std::move(rows);
  return j;
}

}  // namespace secagg

#endif  // SECAGG_STATS_HPP
