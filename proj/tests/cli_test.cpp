#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "common.hpp"
#include "secagg/simharness.hpp"

// SECAGG_CLI_PATH and SECAGG_SCENARIO_DIR come from the build definition.

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using secagg::Mode;
using secagg::params_to_json;

const std::string& tmp_dir() {
  static std::string d = [] {
    fs::path p = fs::temp_directory_path() /
                 ("secagg_cli_test_" + std::to_string(getpid()));
    fs::create_directories(p);
    return p.string();
  }();
  return d;
}

std::string tmp_path(const std::string& name) {
  static int counter = 0;
  return tmp_dir() + "/" + std::to_string(counter++) + "_" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string scenario_file(const std::string& name) {
  return std::string(SECAGG_SCENARIO_DIR) + "/" + name;
}

struct CmdResult {
  int code = -1;
  std::string out;
  std::string err;
};

CmdResult run_cli(const std::string& args) {
  std::string out_path = tmp_path("stdout");
  std::string err_path = tmp_path("stderr");
  std::string cmd = std::string(SECAGG_CLI_PATH) + " " + args + " > " +
                    out_path + " 2> " + err_path;
  int status = std::system(cmd.c_str());
  CmdResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

TEST(Plan, PinnedLargeScaleParameters) {
  CmdResult r = run_cli(
      "plan --n 1000000 --gamma 0.33 --delta 0.33 --eta 20 --lambda 40 "
      "--mode semi-honest");
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  EXPECT_EQ(j.at("params").at("k").get<uint64_t>(), 351u);
  EXPECT_EQ(j.at("params").at("ell").get<uint64_t>(), 499u);
  EXPECT_EQ(j.at("params").at("t").get<uint64_t>(), 260u);
  EXPECT_EQ(j.at("params").at("c_tilde").get<uint64_t>(), 185u);
  EXPECT_TRUE(j.contains("bounds"));
}

TEST(Plan, InfeasibleRatesFailCleanly) {
  CmdResult r = run_cli(
      "plan --n 100 --gamma 0.1 --delta 0.1 --eta 20 --lambda 20 "
      "--mode malicious");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("no feasible"), std::string::npos) << r.err;
}

TEST(Usage, BadInvocationsExitOne) {
  EXPECT_EQ(run_cli("").code, 1);
  EXPECT_EQ(run_cli("frobnicate").code, 1);
  EXPECT_EQ(run_cli("plan --gamma 0.1 --delta 0.1").code, 1);  // --n missing
  EXPECT_EQ(run_cli("run").code, 1);  // neither --scenario nor --replay
  EXPECT_EQ(run_cli("run --scenario a.json --replay b.ndjson").code, 1);
  EXPECT_EQ(run_cli("run --scenario " + tmp_path("missing.json")).code, 1);
  EXPECT_EQ(run_cli("--help").code, 0);
  EXPECT_EQ(run_cli("plan --help").code, 0);
}

TEST(Run, HonestScenarioProducesVerifiableResult) {
  std::string result = tmp_path("result.json");
  std::string keys = tmp_path("keys.json");
  std::string transcript = tmp_path("transcript.ndjson");
  CmdResult r = run_cli("run --scenario " + scenario_file("honest_small.json") +
                        " --result-out " + result + " --keys-out " + keys +
                        " --transcript-out " + transcript);
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  EXPECT_TRUE(j.at("completed").get<bool>());
  EXPECT_TRUE(j.at("abort").is_null());
  EXPECT_EQ(j.at("output"), j.at("expected_sum"));
  EXPECT_EQ(j.at("committee").size(), 5u);
  EXPECT_FALSE(j.at("published").is_null());
  EXPECT_EQ(json::parse(slurp(result)), j);

  json jk = json::parse(slurp(keys));
  EXPECT_EQ(jk.at("n").get<uint64_t>(), 20u);
  EXPECT_EQ(jk.at("sig_pk").size(), 20u);

  // transcript: scenario line first, then message lines
  std::istringstream lines(slurp(transcript));
  std::string first;
  ASSERT_TRUE(std::getline(lines, first));
  EXPECT_TRUE(json::parse(first).contains("params"));

  CmdResult v = run_cli("verify --result " + result + " --committee-keys " +
                        keys);
  EXPECT_EQ(v.code, 0) << v.err;
  json jv = json::parse(v.out);
  EXPECT_TRUE(jv.at("accepted").get<bool>());
}

TEST(Run, ModeOverrideDropsIntegrityLayer) {
  CmdResult r = run_cli("run --scenario " + scenario_file("honest_small.json") +
                        " --mode semi-honest");
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  EXPECT_TRUE(j.at("completed").get<bool>());
  // the masked sum is still published, but without integrity attachments
  EXPECT_EQ(j.at("published").at("alive").size(), 0u);
  EXPECT_EQ(j.at("output"), j.at("expected_sum"));
}

TEST(Run, DropoutScenarioRecovers) {
  CmdResult r = run_cli("run --scenario " +
                        scenario_file("dropout_recovery.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  EXPECT_TRUE(j.at("completed").get<bool>());
  EXPECT_EQ(j.at("recoveries").get<uint32_t>(), 1u);
  EXPECT_EQ(j.at("k_drop").size(), 1u);
}

TEST(Run, AbortScenariosExitTwo) {
  CmdResult shrink = run_cli("run --scenario " +
                             scenario_file("abort_shrink.json"));
  EXPECT_EQ(shrink.code, 2);
  EXPECT_NE(shrink.err.find("abort: too-few-inputs (round 3)"),
            std::string::npos)
      << shrink.err;
  json js = json::parse(shrink.out);
  EXPECT_FALSE(js.at("completed").get<bool>());
  EXPECT_EQ(js.at("abort").at("reason").get<std::string>(), "too-few-inputs");

  CmdResult equiv = run_cli("run --scenario " +
                            scenario_file("equivocation.json"));
  EXPECT_EQ(equiv.code, 2);
  json je = json::parse(equiv.out);
  EXPECT_EQ(je.at("abort").at("reason").get<std::string>(),
            "insufficient-acks");
  EXPECT_EQ(je.at("abort").at("round").get<int>(), 5);
}

TEST(Run, ReplayAcceptsFaithfulAndRejectsEditedTranscripts) {
  std::string transcript = tmp_path("replay.ndjson");
  ASSERT_EQ(run_cli("run --scenario " + scenario_file("honest_small.json") +
                    " --transcript-out " + transcript)
                .code,
            0);
  CmdResult ok = run_cli("run --replay " + transcript);
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_NE(ok.out.find("replay ok"), std::string::npos);

  // swap two message lines: every line stays well-formed, bytes differ
  std::vector<std::string> lines;
  std::istringstream in(slurp(transcript));
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  ASSERT_GT(lines.size(), 3u);
  std::swap(lines[1], lines[2]);
  std::string edited;
  for (const auto& l : lines) edited += l + "\n";
  std::string edited_path = tmp_path("edited.ndjson");
  spit(edited_path, edited);
  CmdResult bad = run_cli("run --replay " + edited_path);
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("replay mismatch"), std::string::npos) << bad.err;
}

TEST(Verify, TamperedOutputRejected) {
  std::string result = tmp_path("result.json");
  std::string keys = tmp_path("keys.json");
  ASSERT_EQ(run_cli("run --scenario " + scenario_file("honest_small.json") +
                    " --result-out " + result + " --keys-out " + keys)
                .code,
            0);
  json j = json::parse(slurp(result));
  uint64_t modulus = 1000003;
  uint64_t y0 = std::stoull(j.at("published").at("y")[0].get<std::string>());
  j["published"]["y"][0] = std::to_string((y0 + 1) % modulus);
  std::string tampered = tmp_path("tampered.json");
  spit(tampered, j.dump());
  CmdResult v = run_cli("verify --result " + tampered + " --committee-keys " +
                        keys);
  EXPECT_EQ(v.code, 2);
  json jv = json::parse(v.out);
  EXPECT_FALSE(jv.at("accepted").get<bool>());
  EXPECT_EQ(jv.at("reason").get<std::string>(), "commitment-mismatch");
}

TEST(Verify, PlainModeResultIsRejectedNotErrored) {
  // a semi-honest run publishes the sum without integrity attachments, so
  // verification fails its first check rather than erroring out
  std::string result = tmp_path("plain_result.json");
  std::string keys = tmp_path("plain_keys.json");
  ASSERT_EQ(run_cli("run --scenario " + scenario_file("dropout_recovery.json") +
                    " --result-out " + result + " --keys-out " + keys)
                .code,
            0);
  CmdResult v = run_cli("verify --result " + result + " --committee-keys " +
                        keys);
  EXPECT_EQ(v.code, 2);
  EXPECT_EQ(json::parse(v.out).at("reason").get<std::string>(),
            "committee-alive-count");
}

TEST(Verify, InputProblemsExitOne) {
  // an aborted run never reaches publication
  std::string result = tmp_path("aborted_result.json");
  std::string keys = tmp_path("aborted_keys.json");
  ASSERT_EQ(run_cli("run --scenario " + scenario_file("abort_shrink.json") +
                    " --result-out " + result + " --keys-out " + keys)
                .code,
            2);
  CmdResult v = run_cli("verify --result " + result + " --committee-keys " +
                        keys);
  EXPECT_EQ(v.code, 1);
  EXPECT_NE(v.err.find("no published payload"), std::string::npos) << v.err;

  // key directory with the wrong population size
  std::string lisa_result = tmp_path("lisa_result.json");
  std::string lisa_keys = tmp_path("lisa_keys.json");
  ASSERT_EQ(run_cli("run --scenario " + scenario_file("honest_small.json") +
                    " --result-out " + lisa_result + " --keys-out " +
                    lisa_keys)
                .code,
            0);
  json jk = json::parse(slurp(lisa_keys));
  jk["sig_pk"].erase(jk["sig_pk"].begin());
  std::string short_keys = tmp_path("short_keys.json");
  spit(short_keys, jk.dump());
  CmdResult s = run_cli("verify --result " + lisa_result +
                        " --committee-keys " + short_keys);
  EXPECT_EQ(s.code, 1);
  EXPECT_NE(s.err.find("sig_pk count"), std::string::npos) << s.err;
}

TEST(Campaign, EndToEndWithReports) {
  std::string cfg = tmp_path("params.json");
  spit(cfg, params_to_json(testbed::desk_params(Mode::kSemiHonest)).dump(2));
  std::string csv1 = tmp_path("campaign1.csv");
  std::string csv2 = tmp_path("campaign2.csv");
  std::string rep = tmp_path("campaign.json");
  CmdResult r = run_cli("campaign --config " + cfg +
                        " --rounds 4 --seed cli-test --csv-out " + csv1 +
                        " --json-out " + rep);
  ASSERT_EQ(r.code, 0) << r.err;
  json j = json::parse(r.out);
  EXPECT_EQ(j.at("rounds").get<uint32_t>(), 4u);
  EXPECT_LE(j.at("completed_rounds").get<uint32_t>(), 4u);
  EXPECT_GT(j.at("expansion_factor").get<double>(), 1.0);

  std::string csv = slurp(csv1);
  EXPECT_EQ(csv.rfind("section,round,metric,value\r\n", 0), 0u);
  json jr = json::parse(slurp(rep));
  EXPECT_EQ(jr.at("per_round").size(), 4u);

  ASSERT_EQ(run_cli("campaign --config " + cfg +
                    " --rounds 4 --seed cli-test --csv-out " + csv2)
                .code,
            0);
  EXPECT_EQ(csv, slurp(csv2));  // same seed, same bytes

  EXPECT_EQ(run_cli("campaign --config " + cfg + " --rounds 0 --seed x").code,
            1);
  EXPECT_EQ(run_cli("campaign --config " + cfg +
                    " --rounds 2 --adversary nonsense")
                .code,
            1);
}

}  // namespace
