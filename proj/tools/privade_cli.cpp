#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "privade/audit/detection.hpp"
#include "privade/common/errors.hpp"
#include "privade/fixtures/synthetic.hpp"
#include "privade/market/script.hpp"
#include "privade/numerics/model_io.hpp"
#include "privade/protocol/engine.hpp"
#include "privade/protocol/replay.hpp"
#include "privade/scoring/oracle.hpp"

namespace {

using namespace privade;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitRejected = 1;  // protocol abort, rejected tx, inconsistent transcript
constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;

struct Inputs {
  std::string fixture;
  std::string model;
  std::string dataset;
  std::string config;
  std::optional<std::uint64_t> seed;
};

void add_input_flags(CLI::App* cmd, Inputs& in) {
  cmd->add_option("--fixture", in.fixture, "Fixture directory (model.pvdm, dataset.pvdd, config.json)");
  cmd->add_option("--model", in.model, "Model file (.pvdm)");
  cmd->add_option("--dataset", in.dataset, "Dataset file (.pvdd)");
  cmd->add_option("--config", in.config, "Run config JSON");
  cmd->add_option("--seed", in.seed, "Override the config seed");
}

fixtures::Fixture resolve(const Inputs& in, bool need_data = true) {
  auto missing = [](const std::string& what) {
    throw CLI::ValidationError(what, "required (directly or through --fixture)");
  };
  auto pick = [&](const std::string& flag, const std::string& file) -> std::string {
    if (!flag.empty()) return flag;
    if (!in.fixture.empty()) return in.fixture + "/" + file;
    return {};
  };
  std::string model = pick(in.model, "model.pvdm");
  std::string dataset = pick(in.dataset, "dataset.pvdd");
  std::string config = pick(in.config, "config.json");
  for (const auto& path : {model, dataset, config}) {
    if (!path.empty() && !std::filesystem::exists(path)) throw CLI::ValidationError(path, "no such file");
  }
  fixtures::Fixture f;
  if (model.empty()) missing("--model");
  f.model = numerics::load_model(model);
  if (need_data) {
    if (dataset.empty()) missing("--dataset");
    f.data = selection::load_dataset(dataset);
  }
  if (!config.empty()) f.config = protocol::RunConfig::load(config);
  if (in.seed) f.config.seed = *in.seed;
  return f;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

int cmd_run(const Inputs& in, const std::string& transport, const std::string& adversary,
            const std::string& transcript_out) {
  auto f = resolve(in);
  if (transport == "socket") f.config.transport = protocol::Transport::Socket;
  if (transport == "inproc") f.config.transport = protocol::Transport::InProcess;
  auto adv = protocol::parse_adversary(adversary);
  auto r = protocol::run_privade({f.model, 0}, {f.data}, f.config, adv);
  if (!transcript_out.empty()) r.transcript.save(transcript_out);
  std::cerr << "run: " << r.summary() << " (" << r.transcript.frames.size() << " frames, " << r.seconds << " s)\n";
  emit(r.to_json());
  if (!r.success) {
    std::cerr << r.summary() << "\n";
    return kExitRejected;
  }
  return kExitOk;
}

json plan_json(const audit::AuditPlan& p) {
  auto exact = audit::detection_probability_exact(p);
  auto frac = audit::audit_fraction(p);
  return {{"N", p.N}, {"L", p.L}, {"m", p.m}, {"s", p.s}, {"rho", p.rho},
          {"detection", audit::detection_probability(p)},
          {"detection_exact", exact.str()},
          {"audited_fraction", audit::to_decimal(frac, 6)},
          {"audited_fraction_exact", frac.str()}};
}

int cmd_plan_audit(std::size_t N, std::size_t L, double rho, double target) {
  auto p = audit::plan_audit(N, L, rho, target);
  json j = plan_json(p);
  j["target"] = target;
  emit(j);
  return kExitOk;
}

int cmd_detect(std::size_t N, std::size_t L, double rho, std::size_t m, std::size_t s, std::size_t trials,
               std::uint64_t seed) {
  audit::AuditPlan p{N, L, m, s, rho};
  audit::validate(p);
  json j = plan_json(p);
  if (trials > 0) {
    Drbg rng(seed);
    j["monte_carlo"] = {{"trials", trials}, {"seed", seed}, {"rate", audit::simulate_detection(p, trials, rng)}};
  }
  emit(j);
  return kExitOk;
}

int cmd_score_oracle(const Inputs& in, const std::string& transcript) {
  auto f = resolve(in);
  scoring::OracleOptions opt{f.config.scoring, f.config.projection_dim, {}};
  if (f.config.projection_dim > 0) {
    if (transcript.empty()) {
      throw CLI::ValidationError("--transcript", "projection_dim > 0 needs the selection seed of a recorded run");
    }
    auto seed = protocol::transcript_selection_seed(protocol::Transcript::load(transcript));
    if (!seed) fail(ErrorCode::MalformedTranscript, "transcript has no completed coin flip");
    opt.projection_seed = *seed;
  }
  auto r = scoring::score_multi_oracle(f.model, f.data, f.config.k, opt);
  emit({{"report", r.report.to_json()}, {"representatives", r.rep}});
  return kExitOk;
}

int cmd_market_demo(const std::string& script, const std::string& log_out) {
  auto result = market::run_script(market::load_script(script));
  if (!log_out.empty()) {
    std::ofstream out(log_out);
    if (!out) fail(ErrorCode::Io, "cannot write " + log_out);
    out << result.log_ndjson();
  }
  emit(result.to_json());
  if (result.rejected) {
    std::cerr << "tx " << result.rejected->index << " (" << result.rejected->kind
              << ") rejected: " << result.rejected->reason << "\n";
    return kExitRejected;
  }
  return kExitOk;
}

int cmd_gen_fixture(const std::string& kind, std::size_t n, std::size_t k, std::uint64_t seed,
                    const std::string& out) {
  auto f = fixtures::make_fixture(kind, n, k, seed);
  fixtures::save_fixture(f, out);
  emit({{"kind", kind},
        {"dir", out},
        {"model", f.model.name()},
        {"parameters", f.model.param_count()},
        {"points", f.data.size()},
        {"classes", f.data.num_classes},
        {"config", f.config.to_json()}});
  return kExitOk;
}

int cmd_replay(const std::string& transcript, const Inputs& in) {
  protocol::RunConfig cfg;
  std::string config = !in.config.empty() ? in.config : in.fixture.empty() ? "" : in.fixture + "/config.json";
  if (!config.empty()) cfg = protocol::RunConfig::load(config);
  if (in.seed) cfg.seed = *in.seed;
  auto v = protocol::transcript_replay(protocol::Transcript::load(transcript), cfg);
  emit(v.to_json());
  return v.consistent ? kExitOk : kExitRejected;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-party dataset scoring simulator"};
  app.require_subcommand(1);

  Inputs run_in;
  std::string transport, adversary = "none", transcript_out;
  auto* run = app.add_subcommand("run", "Run the scoring protocol between the model owner and the data owner");
  add_input_flags(run, run_in);
  run->add_option("--transport", transport, "inproc or socket")->check(CLI::IsMember({"inproc", "socket"}));
  run->add_option("--adversary", adversary, "Scripted deviation (see list-adversaries)");
  run->add_option("--transcript-out", transcript_out, "Write the hub transcript here");

  std::size_t N = 0, L = 0, m = 0, s = 0, trials = 0;
  double rho = 0.0, target = 0.0;
  std::uint64_t mc_seed = 1;
  auto* plan = app.add_subcommand("plan-audit", "Cheapest cut-and-choose plan reaching a detection target");
  plan->add_option("N", N, "Audited points")->required();
  plan->add_option("L", L, "Layers per point")->required();
  plan->add_option("rho", rho, "Corrupted fraction")->required()->check(CLI::Range(0.0, 1.0));
  plan->add_option("target", target, "Detection target")->required()->check(CLI::Range(0.0, 1.0));

  auto* detect = app.add_subcommand("detect", "Detection probability of an audit plan");
  detect->add_option("N", N)->required();
  detect->add_option("L", L)->required();
  detect->add_option("rho", rho)->required()->check(CLI::Range(0.0, 1.0));
  detect->add_option("m", m)->required();
  detect->add_option("s", s)->required();
  detect->add_option("--trials", trials, "Monte-Carlo trials of the worst-case adversary");
  detect->add_option("--seed", mc_seed);

  Inputs oracle_in;
  std::string oracle_transcript;
  auto* oracle = app.add_subcommand("score-oracle", "Cleartext scoring without the protocol");
  add_input_flags(oracle, oracle_in);
  oracle->add_option("--transcript", oracle_transcript, "Take the projection seed from this transcript");

  std::string script, log_out;
  auto* market_cmd = app.add_subcommand("market-demo", "Apply a marketplace tx script");
  market_cmd->add_option("script", script, "NDJSON script")->required()->check(CLI::ExistingFile);
  market_cmd->add_option("--log-out", log_out, "Write the per-tx log as NDJSON");

  std::string kind = "digits", out;
  std::size_t n = 200, k = 20;
  std::uint64_t gen_seed = 1;
  auto* gen = app.add_subcommand("gen-fixture", "Write a synthetic model, dataset and config");
  gen->add_option("--kind", kind, "gaussians, digits, lenet-xs, lenet5, cnn5 or mlp:i:h:c");
  gen->add_option("--n", n, "Points")->check(CLI::PositiveNumber);
  gen->add_option("--k", k, "Representatives")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed);
  gen->add_option("--out", out, "Output directory")->required();

  Inputs replay_in;
  std::string transcript;
  auto* replay = app.add_subcommand("replay", "Re-verify the public part of a transcript");
  replay->add_option("transcript", transcript)->required()->check(CLI::ExistingFile);
  replay->add_option("--config", replay_in.config);
  replay->add_option("--fixture", replay_in.fixture);
  replay->add_option("--seed", replay_in.seed);

  auto* list = app.add_subcommand("list-adversaries", "Print the deviation catalogue");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_in, transport, adversary, transcript_out);
    if (*plan) return cmd_plan_audit(N, L, rho, target);
    if (*detect) return cmd_detect(N, L, rho, m, s, trials, mc_seed);
    if (*oracle) return cmd_score_oracle(oracle_in, oracle_transcript);
    if (*market_cmd) return cmd_market_demo(script, log_out);
    if (*gen) return cmd_gen_fixture(kind, n, k, gen_seed, out);
    if (*replay) return cmd_replay(transcript, replay_in);
    if (*list) {
      json names = json::array();
      for (auto a : protocol::adversary_catalogue()) names.push_back(protocol::to_string(a));
      emit(names);
      return kExitOk;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitUsage;
}
