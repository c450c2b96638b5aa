#include <gtest/gtest.h>

#include <cmath>

#include "common.hpp"
#include "oracles.hpp"
#include "secagg/stats.hpp"

using namespace secagg;

namespace {

TEST(Summarize, HandComputedMoments) {
  SummaryStat s = summarize({2, 4, 4, 4, 5, 5, 7, 9});
  EXPECT_DOUBLE_EQ(s.mean, 5.0);
  EXPECT_NEAR(s.sd, std::sqrt(32.0 / 7.0), 1e-12);
  EXPECT_DOUBLE_EQ(s.min, 2.0);
  EXPECT_DOUBLE_EQ(s.max, 9.0);
  SummaryStat one = summarize({3.5});
  EXPECT_DOUBLE_EQ(one.mean, 3.5);
  EXPECT_DOUBLE_EQ(one.sd, 0.0);
  SummaryStat none = summarize({});
  EXPECT_DOUBLE_EQ(none.mean, 0.0);
  EXPECT_DOUBLE_EQ(none.sd, 0.0);
}

TEST(Baseline, TwoMessagesOfHeaderPlusResidues) {
  // a plain run costs one upload and one download of m residues each
  EXPECT_EQ(baseline_user_bytes(3), 2 * (Message::kHeaderSize + 4 + 24));
  EXPECT_EQ(baseline_user_bytes(8) - baseline_user_bytes(3), 2 * 8 * 5u);
}

TEST(Expansion, RegularUserOverheadShrinksWithVectorLength) {
  // Fixed protocol parameters, growing vectors: the additive per-round
  // overhead (beacon, key shares seen by backups are excluded by the
  // regular-user filter; committee blinding traffic is not user traffic)
  // washes out and the ratio falls toward 1.
  double prev = std::numeric_limits<double>::infinity();
  for (uint64_t m : {8u, 256u, 4096u}) {
    ProtocolParams p = testbed::desk_params(Mode::kSemiHonest);
    p.n = 60;  // leaves users that are neither committee nor backup
    p.m = m;
    p.validate();
    Scenario s;
    s.params = p;
    s.master_seed = sha256(to_bytes("expansion-" + std::to_string(m)));
    s.beacon_round = 1;
    ExecutionResult r = run_scenario(s, EngineOptions{.keep_transcript = false});
    ASSERT_TRUE(r.completed());
    double e = expansion_factor(r, p);
    EXPECT_GT(e, 1.0) << m;
    EXPECT_LT(e, prev) << m;
    prev = e;
  }
  EXPECT_LT(prev, 1.2);
}

TEST(Campaign, SelectionMeansAreExact) {
  // Every round selects exactly k committee members and k*ell backup slots,
  // so the per-user means are R*k/n and R*k*ell/n regardless of randomness.
  ProtocolParams p = testbed::desk_params(Mode::kSemiHonest);
  const uint32_t R = 12;
  CampaignReport rep = run_campaign(p, R, sha256(to_bytes("means")));
  EXPECT_DOUBLE_EQ(rep.committee_selections.mean,
                   double(R) * double(p.k) / double(p.n));
  EXPECT_DOUBLE_EQ(rep.backup_selections.mean,
                   double(R) * double(p.k) * double(p.ell) / double(p.n));
  EXPECT_EQ(rep.rounds, R);
  ASSERT_EQ(rep.rows.size(), R);
  // row index doubles as the beacon round
  for (uint32_t r = 0; r < R; r++) EXPECT_EQ(rep.rows[r].round, r);
}

TEST(Campaign, QuietWhenNobodyLeaves) {
  ProtocolParams p = testbed::desk_params(Mode::kSemiHonest);
  p.gamma = 0.0;
  p.delta = 0.0;
  p.validate();
  CampaignReport rep = run_campaign(p, 5, sha256(to_bytes("quiet")));
  EXPECT_EQ(rep.completed_rounds, 5u);
  EXPECT_DOUBLE_EQ(rep.recoveries_per_round.mean, 0.0);
  EXPECT_DOUBLE_EQ(rep.recoveries_per_round.max, 0.0);
  for (const RoundRow& row : rep.rows) {
    EXPECT_TRUE(row.completed);
    EXPECT_EQ(row.committee_dropouts, 0u);
    EXPECT_EQ(row.recoveries, 0u);
    EXPECT_GT(row.messages, 0u);
    EXPECT_GT(row.bytes, 0u);
  }
  for (uint32_t c : rep.recovery_ecdf) EXPECT_EQ(c, 0u);
  EXPECT_GT(rep.expansion, 1.0);
  EXPECT_NEAR(rep.per_round_mean_messages, rep.messages_per_user.mean / 5.0,
              1e-12);
}

TEST(Campaign, RecoveriesMatchCommitteeDropoutsRowWise) {
  // With committee dropouts pinned to the post-sharing round, every dropped
  // member of a completed round is recovered, no more and no fewer.
  ProtocolParams p = testbed::desk_params(Mode::kSemiHonest);
  p.delta = 0.2;
  p.validate();
  const uint32_t R = 40;
  CampaignReport rep = run_campaign(p, R, sha256(to_bytes("rowwise")));
  ASSERT_EQ(rep.rows.size(), R);
  ASSERT_EQ(rep.recovery_ecdf.size(), R);
  uint32_t completed = 0;
  double dropped_mean = 0.0;
  for (const RoundRow& row : rep.rows) {
    if (!row.completed) continue;
    completed++;
    EXPECT_EQ(row.recoveries, row.committee_dropouts);
    dropped_mean += row.committee_dropouts;
  }
  EXPECT_EQ(completed, rep.completed_rounds);
  EXPECT_GE(completed, R - 8);  // small-committee aborts are rare but legal
  dropped_mean /= double(completed);
  // per round the dropped-committee count is HG(n, floor(delta*n), k):
  // mean k*d/n = 1.0, sd ~ 0.795; 4 sigma of the mean over ~R rounds
  EXPECT_NEAR(dropped_mean, 1.0, 4.0 * 0.795 / std::sqrt(double(completed)));
  // ecdf is the sorted per-round recovery counts
  for (size_t i = 1; i < rep.recovery_ecdf.size(); i++)
    EXPECT_LE(rep.recovery_ecdf[i - 1], rep.recovery_ecdf[i]);
}

TEST(Campaign, ReportSerializationIsDeterministic) {
  ProtocolParams p = testbed::desk_params(Mode::kSemiHonest);
  Bytes seed = sha256(to_bytes("serialize"));
  CampaignReport a = run_campaign(p, 6, seed);
  CampaignReport b = run_campaign(p, 6, seed);
  std::string csv_a = campaign_report_to_csv(a);
  EXPECT_EQ(csv_a, campaign_report_to_csv(b));
  EXPECT_EQ(campaign_report_to_json(a).dump(), campaign_report_to_json(b).dump());
  EXPECT_NE(csv_a, campaign_report_to_csv(
                       run_campaign(p, 6, sha256(to_bytes("other")))));
  EXPECT_EQ(csv_a.rfind("section,round,metric,value\r\n", 0), 0u);
  // every line is a 4-field record
  size_t lines = 0;
  for (size_t pos = 0; (pos = csv_a.find("\r\n", pos)) != std::string::npos;
       pos += 2)
    lines++;
  EXPECT_GE(lines, size_t(6 + 1));

  nlohmann::json j = campaign_report_to_json(a);
  EXPECT_EQ(j.at("rounds").get<uint32_t>(), 6u);
  EXPECT_EQ(j.at("per_round").size(), 6u);
  EXPECT_EQ(j.at("params").at("n").get<uint64_t>(), p.n);
  EXPECT_TRUE(j.contains("expansion_factor"));
  EXPECT_TRUE(j.contains("recovery_ecdf"));
  for (const char* key : {"committee_selections", "backup_selections",
                          "recoveries_per_round", "messages_per_user",
                          "bytes_per_user"}) {
    const auto& s = j.at(key);
    double mn = s.at("min").get<double>();
    double mean = s.at("mean").get<double>();
    double mx = s.at("max").get<double>();
    EXPECT_LE(mn, mean) << key;
    EXPECT_LE(mean, mx) << key;
    EXPECT_GE(s.at("sd").get<double>(), 0.0) << key;
  }
}

TEST(Campaign, RejectsDegenerateRequests) {
  ProtocolParams p = testbed::desk_params(Mode::kSemiHonest);
  EXPECT_THROW(run_campaign(p, 0, sha256(to_bytes("zero"))),
               std::invalid_argument);
  p.t = p.ell + 1;  // invalid parameters surface before any round runs
  EXPECT_THROW(run_campaign(p, 1, sha256(to_bytes("bad"))),
               std::invalid_argument);
}

TEST(CsvQuote, DelimitersAndQuotesAreEscaped) {
  EXPECT_EQ(csv_quote("plain"), "plain");
  EXPECT_EQ(csv_quote("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_quote("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_quote("line\nbreak"), "\"line\nbreak\"");
}

}  // namespace
