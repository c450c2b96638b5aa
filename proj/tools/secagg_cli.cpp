// Command-line frontend: parameter planning, single protocol executions,
// multi-round campaigns, and published-result verification.
//
// Exit codes: 0 success / output accepted, 1 usage or input error,
// 2 protocol abort or verification reject.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "secagg/stats.hpp"

namespace {

using namespace secagg;

bool log_debug() {
  const char* v = std::getenv("SECAGG_LOG");
  return v && std::string_view(v) == "debug";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

// --seed accepts a hex string (used verbatim) or free text (hashed).
Bytes seed_from_string(const std::string& s) {
  bool hex = !s.empty() && s.size() % 2 == 0;
  for (char c : s)
    hex = hex && ((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') ||
                  (c >= 'A' && c <= 'F'));
  if (hex) return from_hex(s);
  return sha256(to_bytes("secagg.cli.seed." + s));
}

nlohmann::json result_to_json(const ProtocolParams& p,
                              const ExecutionResult& r) {
  nlohmann::json j;
  j["params"] = params_to_json(p);
  j["completed"] = r.completed();
  if (r.abort) {
    j["abort"] = {{"reason", r.abort->reason},
                  {"round", r.abort->round},
                  {"party", r.abort->party == kServerId
                                ? nlohmann::json("server")
                                : nlohmann::json(r.abort->party)}};
  } else {
    j["abort"] = nullptr;
  }
  auto vec_strings = [](const std::vector<uint64_t>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (uint64_t x : v) a.push_back(std::to_string(x));
    return a;
  };
  j["output"] = r.output ? vec_strings(*r.output) : nlohmann::json(nullptr);
  j["expected_sum"] = vec_strings(r.expected_sum);
  j["committee"] = r.committee;
  j["u_prime_2"] = r.u_prime_2;
  j["k_drop"] = r.k_drop;
  j["recoveries"] = r.recoveries;
  j["share_mismatch"] = r.share_mismatch;
  j["published"] =
      r.published ? published_to_json(*r.published) : nlohmann::json(nullptr);
  return j;
}

int cmd_plan(uint64_t n, double gamma, double delta, uint32_t eta,
             uint32_t lambda, const std::string& mode, bool exact, uint64_t m,
             const std::string& modulus, double alpha) {
  ProtocolParams base;
  base.n = n;
  base.m = m;
  base.modulus = modulus_from_string(modulus);
  base.gamma = gamma;
  base.delta = delta;
  base.alpha = alpha;
  base.eta = eta;
  base.lambda = lambda;
  base.mode = mode_from_name(mode);
  ProtocolParams planned = plan_params(base, exact);
  nlohmann::json out;
  out["params"] = params_to_json(planned);
  out["bounds"] = bound_report_to_json(bound_report(planned, exact));
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_run(const std::string& scenario_path, const std::string& replay_path,
            const std::string& mode_override,
            const std::string& transcript_out, const std::string& result_out,
            const std::string& keys_out) {
  if (!replay_path.empty()) {
    std::string saved = read_file(replay_path);
    auto [scenario, messages] = transcript_from_ndjson(saved);
    ExecutionResult r = run_scenario(scenario);
    std::string fresh = transcript_to_ndjson(scenario, r.transcript);
    if (fresh != saved) {
      std::cerr << "replay mismatch: transcript differs from " << replay_path
                << "\n";
      return 2;
    }
    std::cout << "replay ok: " << messages.size() << " messages, "
              << fresh.size() << " bytes\n";
    return 0;
  }

  Scenario s = scenario_from_json(nlohmann::json::parse(read_file(scenario_path)));
  if (!mode_override.empty()) s.params.mode = mode_from_name(mode_override);
  s.params.validate();
  for (const std::string& w : s.validate())
    std::cerr << "warning: " << w << "\n";

  EngineOptions opt;
  opt.keep_transcript = !transcript_out.empty() || log_debug();
  ExecutionResult r = run_scenario(s, opt);

  if (!transcript_out.empty())
    write_file(transcript_out, transcript_to_ndjson(s, r.transcript));
  if (!keys_out.empty()) {
    nlohmann::json jk;
    jk["n"] = s.params.n;
    nlohmann::json pks = nlohmann::json::array();
    for (uint64_t i = 0; i < s.params.n; i++)
      pks.push_back(to_hex(derive_party_keys(s.master_seed, i).sig.pk));
    jk["sig_pk"] = std::move(pks);
    write_file(keys_out, jk.dump(2) + "\n");
  }
  nlohmann::json out = result_to_json(s.params, r);
  if (!result_out.empty()) write_file(result_out, out.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  if (r.abort) {
    std::cerr << "abort: " << r.abort->reason << " (round "
              << unsigned(r.abort->round) << ")\n";
    return 2;
  }
  return 0;
}

int cmd_campaign(const std::string& config_path, uint32_t rounds,
                 const std::string& seed, const std::string& adversary,
                 bool no_clamp, const std::string& csv_out,
                 const std::string& json_out) {
  ProtocolParams p =
      params_from_json(nlohmann::json::parse(read_file(config_path)));
  CampaignOptions opt;
  opt.clamp_committee_dropouts = !no_clamp;
  opt.adversary = adversary_from_name(adversary);
  CampaignReport rep = run_campaign(p, rounds, seed_from_string(seed), opt);
  if (!csv_out.empty()) write_file(csv_out, campaign_report_to_csv(rep));
  if (!json_out.empty())
    write_file(json_out, campaign_report_to_json(rep).dump(2) + "\n");
  nlohmann::json summary;
  summary["rounds"] = rep.rounds;
  summary["completed_rounds"] = rep.completed_rounds;
  summary["committee_selections_mean"] = rep.committee_selections.mean;
  summary["backup_selections_mean"] = rep.backup_selections.mean;
  summary["recoveries_per_round_mean"] = rep.recoveries_per_round.mean;
  summary["messages_per_user_mean"] = rep.messages_per_user.mean;
  summary["expansion_factor"] = rep.expansion;
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_verify(const std::string& result_path, const std::string& keys_path) {
  nlohmann::json jr = nlohmann::json::parse(read_file(result_path));
  if (!jr.contains("published") || jr.at("published").is_null())
    throw std::runtime_error(
        "result has no published payload (produced by a lisa-plus run?)");
  ProtocolParams p = params_from_json(jr.at("params"));
  PublishedResult pub = published_from_json(jr.at("published"));
  nlohmann::json jk = nlohmann::json::parse(read_file(keys_path));
  std::vector<Bytes> sig_pk;
  for (const auto& h : jk.at("sig_pk")) sig_pk.push_back(from_hex(h.get<std::string>()));
  if (sig_pk.size() != p.n)
    throw std::runtime_error("sig_pk count does not match n");
  VerifyResult v = user_verify_output(p, pub, sig_pk);
  nlohmann::json out{{"accepted", v.accepted}, {"reason", v.reason}};
  std::cout << out.dump(2) << "\n";
  return v.accepted ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single-server secure-aggregation toolkit"};
  app.require_subcommand(1);

  // plan
  uint64_t plan_n = 0, plan_m = 1;
  double plan_gamma = 0.0, plan_delta = 0.0, plan_alpha = 0.5;
  uint32_t plan_eta = 20, plan_lambda = 40;
  std::string plan_mode = "semi-honest", plan_modulus = "4294967296";
  bool plan_exact = false;
  auto* plan = app.add_subcommand("plan", "derive committee parameters");
  plan->add_option("--n", plan_n, "number of users")->required();
  plan->add_option("--gamma", plan_gamma, "corruption rate")->required();
  plan->add_option("--delta", plan_delta, "dropout rate")->required();
  plan->add_option("--eta", plan_eta, "correctness parameter (bits)");
  plan->add_option("--lambda", plan_lambda, "security parameter (bits)");
  plan->add_option("--mode", plan_mode, "semi-honest|malicious|lisa-plus");
  plan->add_flag("--exact", plan_exact, "plan with exact tails, not bounds");
  plan->add_option("--m", plan_m, "input vector length");
  plan->add_option("--modulus", plan_modulus, "mask modulus (decimal)");
  plan->add_option("--alpha", plan_alpha, "minimum contributor fraction");

  // run
  std::string run_scenario_path, run_replay, run_mode, run_transcript,
      run_result, run_keys;
  auto* run = app.add_subcommand("run", "execute one scenario");
  auto* scen_opt = run->add_option("--scenario", run_scenario_path,
                                   "scenario JSON file");
  auto* replay_opt = run->add_option(
      "--replay", run_replay, "re-run a saved transcript, check byte-identity");
  scen_opt->excludes(replay_opt);
  run->add_option("--mode", run_mode, "override scenario mode");
  run->add_option("--transcript-out", run_transcript, "write NDJSON transcript");
  run->add_option("--result-out", run_result, "write result JSON");
  run->add_option("--keys-out", run_keys, "write signature directory JSON");

  // campaign
  std::string camp_config, camp_seed = "campaign", camp_adversary = "honest",
              camp_csv, camp_json;
  uint32_t camp_rounds = 0;
  bool camp_no_clamp = false;
  auto* camp = app.add_subcommand("campaign", "run R rounds, collect stats");
  camp->add_option("--config", camp_config, "parameter JSON file")->required();
  camp->add_option("--rounds", camp_rounds, "number of rounds")->required();
  camp->add_option("--seed", camp_seed, "campaign seed (hex or free text)");
  camp->add_option("--adversary", camp_adversary, "per-round server strategy");
  camp->add_flag("--no-clamp", camp_no_clamp,
                 "keep sampled committee dropout rounds (round-2 drops abort)");
  camp->add_option("--csv-out", camp_csv, "write per-round CSV");
  camp->add_option("--json-out", camp_json, "write report JSON");

  // verify
  std::string ver_result, ver_keys;
  auto* ver = app.add_subcommand("verify", "check a published result");
  ver->add_option("--result", ver_result, "result JSON from run")->required();
  ver->add_option("--committee-keys", ver_keys, "signature directory JSON")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (plan->parsed())
      return cmd_plan(plan_n, plan_gamma, plan_delta, plan_eta, plan_lambda,
                      plan_mode, plan_exact, plan_m, plan_modulus, plan_alpha);
    if (run->parsed()) {
      if (run_scenario_path.empty() && run_replay.empty()) {
        std::cerr << "run: need --scenario or --replay\n";
        return 1;
      }
      return cmd_run(run_scenario_path, run_replay, run_mode, run_transcript,
                     run_result, run_keys);
    }
    if (camp->parsed())
      return cmd_campaign(camp_config, camp_rounds, camp_seed, camp_adversary,
                          camp_no_clamp, camp_csv, camp_json);
    if (ver->parsed()) return cmd_verify(ver_result, ver_keys);
  } catch (const std::exception& e) {
    std::cerr << app.get_subcommands().front()->get_name() << ": " << e.what()
              << "\n";
    return 1;
  }
  return 1;
}
