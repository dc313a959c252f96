// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "privade/audit/cnczk.hpp"
#include "privade/audit/cp.hpp"
#include "privade/audit/detection.hpp"
#include "privade/commit/commitment.hpp"
#include "privade/commit/merkle.hpp"
#include "privade/common/errors.hpp"
#include "privade/fixtures/synthetic.hpp"
#include "privade/market/ledger.hpp"
#include "privade/market/script.hpp"
#include "privade/numerics/architectures.hpp"
#include "privade/numerics/model_io.hpp"
#include "privade/protocol/engine.hpp"
#include "privade/protocol/reference.hpp"
#include "privade/scoring/oracle.hpp"
#include "privade/selection/projection.hpp"
#include "privade/split/split_model.hpp"

using namespace privade;
using numerics::FixedScalar;
using numerics::FixedTensor;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances and budgets.
constexpr double kMcBand = 0.02;
constexpr double kMcFloor = 0.03;
constexpr double kC1Seconds = 30;
constexpr double kC3Seconds = 300;
constexpr double kC4Seconds = 600;
constexpr double kJlShare = 0.95;

const std::string kFixtures = PRIVADE_FIXTURES;

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Hypergeometric tail P[X >= at_least] for `draws` from `n` items with `bad` marked, in long double.
long double hyper_tail(std::size_t n, std::size_t bad, std::size_t draws, std::size_t at_least) {
  auto lc = [](long double a, long double b) { return std::lgamma(a + 1) - std::lgamma(b + 1) - std::lgamma(a - b + 1); };
  long double total = 0;
  for (std::size_t x = at_least; x <= std::min(bad, draws); ++x) {
    if (draws - x > n - bad) continue;
    total += std::exp(lc(bad, x) + lc(n - bad, draws - x) - lc(n, draws));
  }
  return total;
}

long double detection_oracle(std::size_t N, std::size_t L, std::size_t m, std::size_t s, std::size_t K) {
  long double total = 0;
  for (std::size_t x = 0; x <= std::min(K, m); ++x) {
    long double p = hyper_tail(N, K, m, x) - hyper_tail(N, K, m, x + 1);
    total += p * (1 - std::pow(static_cast<long double>(L - s) / L, static_cast<long double>(x)));
  }
  return total;
}

Check criterion1() {
  Check c;
  auto t0 = Clock::now();
  audit::AuditPlan plan{100, 10, 25, 6, 0.10};
  auto exact = audit::detection_probability_exact(plan);
  double bound = audit::detection_probability(plan);
  c.require(exact > audit::Rational(4, 5), "exact bound not above 4/5");
  c.require(std::abs(bound - static_cast<double>(detection_oracle(100, 10, 25, 6, 10))) < 1e-12,
            "bound disagrees with the lgamma oracle");
  Drbg rng(101);
  double mc = audit::simulate_detection(plan, 100000, rng);
  c.require(std::abs(mc - bound) <= kMcBand, "Monte-Carlo outside the band");
  c.require(mc >= bound - kMcFloor, "Monte-Carlo below bound - 0.03");
  double secs = seconds_since(t0);
  c.require(secs < kC1Seconds, "runtime over budget");
  char buf[200];
  std::snprintf(buf, sizeof buf, "bound=%s (%.6f) mc=%.5f over 1e5 trials, %.2f s", audit::to_decimal(exact, 8).c_str(),
                bound, mc, secs);
  if (c.ok) c.detail = buf;
  else c.detail += std::string("; ") + buf;
  return c;
}

Check criterion2() {
  Check c;
  auto frac = audit::audit_fraction({100, 10, 25, 6, 0.10});
  c.require(frac == audit::Rational(3, 20), "audited fraction is " + frac.str());
  c.require(25 * 6 == 150, "m*s");
  if (c.ok) c.detail = "m*s/(N*L) = " + frac.str();
  return c;
}

Check criterion3() {
  Check c;
  auto t0 = Clock::now();
  Drbg rng(303);
  auto archs = numerics::architecture_names();
  std::size_t equal = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    const std::string& arch = archs[i % archs.size()];
    std::size_t n = 100 + rng.uniform(901);
    std::size_t k = 10 + rng.uniform(41);
    auto f = fixtures::make_fixture(arch, n, k, 1000 + i);
    auto r = protocol::run_privade({f.model, 0}, {f.data}, f.config);
    std::string tag = arch + " n=" + std::to_string(n) + " k=" + std::to_string(k);
    c.require(r.success && r.report.has_value(), "run aborted on " + tag);
    if (!r.report) continue;
    scoring::OracleOptions opt{f.config.scoring, f.config.projection_dim, {}};
    auto oracle = scoring::score_multi_oracle(f.model, f.data, f.config.k, opt);
    auto split = protocol::prepare_split({f.model, 0}, f.config);
    auto ref = protocol::f_score_reference(split, f.data, f.config, *r.selection_seed);
    bool same = r.report->phi.raw() == oracle.report.phi.raw() && ref.report && ref.report->phi.raw() == r.report->phi.raw();
    c.require(same, "phi differs on " + tag);
    equal += same ? 1 : 0;
  }
  double secs = seconds_since(t0);
  c.require(secs < kC3Seconds, "runtime over budget");
  if (c.ok) c.detail = std::to_string(equal) + "/50 bit-exact, " + std::to_string(static_cast<int>(secs)) + " s";
  return c;
}

// 2-D points: the first `covered` sit 0.01 apart and form the representative
// set, the rest lie far away from all of them.
struct CpWorld {
  std::vector<FixedTensor> xs;
  std::vector<commit::Commitment> com;
  std::vector<Bytes> r;
  selection::RepresentativeSet rep;
  FixedScalar d = FixedScalar::from_raw(65);
};

CpWorld cp_world(std::size_t n, std::size_t uncovered, Drbg& rng) {
  CpWorld w;
  auto pp = commit::setup_com(128);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v = i < n - uncovered ? std::vector<double>{0.01 * i, 0.0} : std::vector<double>{0.01 * i, 50.0};
    w.xs.push_back(FixedTensor::from_doubles({2}, v));
    auto o = commit::commit(pp, w.xs.back().serialize(), rng);
    w.com.push_back(o.com);
    w.r.push_back(o.randomness);
    if (i < n - uncovered) w.rep.indices.push_back(i);
  }
  return w;
}

double cp_reject_rate(const CpWorld& w, std::size_t challenges, double delta, std::size_t trials, Drbg& rng) {
  auto pp = commit::setup_com(128);
  std::size_t rejected = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    auto out = audit::cp_run(rng, pp, w.com, {&w.xs, &w.r}, w.rep, challenges, w.d, delta);
    rejected += out.verdict.accepted ? 0 : 1;
  }
  return static_cast<double>(rejected) / trials;
}

numerics::Model ten_layer_block(Drbg& rng) {
  std::vector<numerics::Layer> ls;
  for (std::size_t l = 0; l < 10; ++l) {
    auto spec = l % 2 == 0 ? numerics::LayerSpec::linear(6, 6) : numerics::LayerSpec::relu();
    ls.emplace_back(spec, numerics::random_params(spec, rng));
  }
  return numerics::Model("block", {6}, ls);
}

Check criterion4() {
  Check c;
  auto t0 = Clock::now();

  // Scripted deviations against a zero-tolerance, full-audit configuration.
  auto f = fixtures::make_fixture("digits", 200, 20, 5);
  f.config.delta = 0.0;
  f.config.audit_b = protocol::AuditRequest{};
  f.config.audit_c = protocol::AuditRequest{};
  std::size_t aborted = 0;
  for (auto adv : protocol::adversary_catalogue()) {
    auto r = protocol::run_privade({f.model, 0}, {f.data}, f.config, adv);
    bool ok = !r.success && r.abort.has_value() && !r.report && !r.alice.report && !r.bob.report;
    c.require(ok, std::string("no abort for ") + protocol::to_string(adv));
    aborted += ok ? 1 : 0;
  }

  // Non-representative set: 30% uncovered, delta = 0.05, 20 challenges.
  Drbg rng(404);
  auto world = cp_world(1000, 300, rng);
  std::size_t required = audit::cp_required(20, 0.05);
  double cp_bound = static_cast<double>(hyper_tail(1000, 300, 20, 20 - required + 1));
  double cp_rate = cp_reject_rate(world, 20, 0.05, 10000, rng);
  c.require(cp_rate >= cp_bound - kMcFloor, "CP catch rate below the bound");

  // CnCZK: one corrupted transition on each of 10 points of a 10-layer block.
  auto pp = commit::setup_com(128);
  auto block = ten_layer_block(rng);
  std::vector<FixedTensor> inputs;
  for (std::size_t i = 0; i < 100; ++i) {
    std::vector<double> v(6);
    for (auto& x : v) x = 2 * rng.uniform01() - 1;
    inputs.push_back(FixedTensor::from_doubles({6}, v));
  }
  auto trace = split::full_trace(block, inputs);
  for (auto p : choose_distinct(rng, 100, 10)) {
    std::size_t level = 1 + rng.uniform(10);
    trace.levels[level][p].raw()[0] += 3 * numerics::kOneRaw;
    for (std::size_t l = level + 1; l <= 10; ++l) trace.levels[l][p] = block.layer(l - 1).forward(trace.levels[l - 1][p]);
  }
  auto committed = audit::cnczk_commit_given_trace(block, trace, audit::Variant::HiddenWeights);
  auto wcom = commit::commit(pp, view(committed.pub.weights_root->digest), rng);
  auto v = audit::verifier_view(block, audit::Variant::HiddenWeights, 100);
  v.public_inputs = &inputs;
  v.weights_commitment = wcom.com;
  v.weights_commitment_randomness = wcom.randomness;
  std::size_t caught = 0;
  const std::size_t trials = 10000;
  for (std::size_t t = 0; t < trials; ++t) {
    auto ch = audit::cnczk_challenge(rng, 100, 10, 25, 6);
    caught += audit::cnczk_verify(pp, committed.pub, ch, audit::cnczk_prove(committed, ch), v).accepted ? 0 : 1;
  }
  double cz_rate = static_cast<double>(caught) / trials;
  double cz_bound = audit::detection_probability({100, 10, 25, 6, 0.10});
  c.require(cz_rate >= cz_bound - kMcFloor, "CnCZK catch rate below the bound");

  double secs = seconds_since(t0);
  c.require(secs < kC4Seconds, "runtime over budget");
  char buf[240];
  std::snprintf(buf, sizeof buf, "%zu/20 aborted; CP caught %.4f (bound %.4f); CnCZK caught %.4f (bound %.4f); %.0f s",
                aborted, cp_rate, cp_bound, cz_rate, cz_bound, secs);
  if (c.ok) c.detail = buf;
  else c.detail += std::string("; ") + buf;
  return c;
}

Check criterion5() {
  Check c;
  const std::size_t n = 1000;
  const double delta = 0.1;
  std::size_t challenges = audit::cp_sample_size(n, delta, 2.0);
  c.require(challenges == 139, "|I| = " + std::to_string(challenges));
  Drbg rng(505);
  // Just over delta*n points uncovered.
  auto world = cp_world(n, 101, rng);
  double zero_tol = cp_reject_rate(world, challenges, 0.0, 10000, rng);
  double fig4 = cp_reject_rate(world, challenges, delta, 2000, rng);
  double target = 1.0 - 1.0 / n;
  c.require(zero_tol >= target, "zero-tolerance verifier rejects only " + std::to_string(zero_tol));
  char buf[200];
  std::snprintf(buf, sizeof buf, "|I|=%zu, zero-tolerance reject rate %.4f >= %.3f (threshold rule at delta: %.3f)",
                challenges, zero_tol, target, fig4);
  if (c.ok) c.detail = buf;
  else c.detail += std::string("; ") + buf;
  return c;
}

Check criterion6() {
  Check c;
  auto pp = commit::setup_com(128);
  Drbg rng(606);
  auto random_leaves = [&](std::size_t n) {
    std::vector<Bytes> leaves;
    for (std::size_t i = 0; i < n; ++i) leaves.push_back(rng.bytes(1 + rng.uniform(48)));
    return leaves;
  };
  std::size_t opened = 0;
  for (std::size_t n = 1; n <= 64; ++n) {
    auto leaves = random_leaves(n);
    auto tree = commit::mt_commit(pp, leaves);
    for (std::size_t i = 0; i < n; ++i) {
      c.require(commit::mt_verify(pp, tree.root(), i, leaves[i], commit::mt_open(tree, i)), "honest path rejected");
      ++opened;
    }
  }

  std::size_t false_accepts = 0;
  for (int t = 0; t < 100000; ++t) {
    if (t % 2 == 0) {
      std::size_t n = 1 + rng.uniform(16);
      auto leaves = random_leaves(n);
      auto tree = commit::mt_commit(pp, leaves);
      std::size_t i = rng.uniform(n);
      auto path = commit::mt_open(tree, i);
      Bytes leaf = leaves[i];
      auto root = tree.root();
      std::size_t index = i;
      switch (rng.uniform(4)) {
        case 0: leaf[rng.uniform(leaf.size())] ^= static_cast<std::uint8_t>(1u << rng.uniform(8)); break;
        case 1: path.steps[rng.uniform(path.steps.size())].sibling[rng.uniform(32)] ^= 1; break;
        case 2: root.digest[rng.uniform(32)] ^= static_cast<std::uint8_t>(1u << rng.uniform(8)); break;
        default: index = (i + 1 + rng.uniform(std::max<std::size_t>(n, 2) - 1)) % std::max<std::size_t>(n, 2);
      }
      false_accepts += commit::mt_verify(pp, root, index, leaf, path) ? 1 : 0;
    } else {
      Bytes m = rng.bytes(1 + rng.uniform(32));
      auto o = commit::commit(pp, m, rng);
      Bytes r = o.randomness;
      if (rng.next_bit()) m[rng.uniform(m.size())] ^= static_cast<std::uint8_t>(1u << rng.uniform(8));
      else r[rng.uniform(r.size())] ^= static_cast<std::uint8_t>(1u << rng.uniform(8));
      false_accepts += commit::open(pp, o.com, m, r) ? 1 : 0;
    }
  }
  c.require(false_accepts == 0, std::to_string(false_accepts) + " false accepts");

  // Same message twice gives different digests; digest bytes look uniform.
  Bytes m0(32, 0x00);
  std::vector<double> hist(256, 0);
  bool distinct = true;
  for (int t = 0; t < 4000; ++t) {
    auto a = commit::commit(pp, m0, rng).com;
    auto b = commit::commit(pp, m0, rng).com;
    distinct = distinct && !(a == b);
    for (auto byte : a.digest) hist[byte] += 1;
  }
  double expected = 4000.0 * 32 / 256, chi = 0;
  for (double h : hist) chi += (h - expected) * (h - expected) / expected;
  c.require(distinct, "repeated commitment digest");
  c.require(chi < 360, "digest byte histogram chi2 " + std::to_string(chi));
  if (c.ok) {
    c.detail = std::to_string(opened) + " paths verified, 0/100000 tamper accepts, hiding chi2 " +
               std::to_string(static_cast<int>(chi));
  }
  return c;
}

Check criterion7() {
  Check c;
  Bytes seed(32, 0x5a);
  for (const auto& name : numerics::architecture_names()) {
    Drbg rng(707);
    auto m = numerics::build_architecture(name, rng);
    auto s = split::split_model(m, m.split->cut_bc, seed);
    for (int t = 0; t < 100; ++t) {
      FixedTensor x(m.input_shape());
      for (auto& v : x.raw()) v = static_cast<std::int32_t>(rng.uniform(numerics::kOneRaw));
      c.require(split::forward_split(s, x) == m.forward(x), "split forward differs on " + name);
    }
  }
  auto xs = numerics::load_model(kFixtures + "/lenet-xs/model.pvdm");
  auto l5 = numerics::load_model(kFixtures + "/lenet5/model.pvdm");
  c.require(xs.param_count() == 3968, "lenet-xs has " + std::to_string(xs.param_count()));
  c.require(l5.param_count() == 61706, "lenet5 has " + std::to_string(l5.param_count()));
  if (c.ok) c.detail = "3 architectures x 100 inputs bit-exact; fixture params 3968 / 61706";
  return c;
}

Check criterion8() {
  Check c;
  Digest seed{};
  seed[0] = 8;
  auto R = selection::ProjectionMatrix::from_seed(seed, 64, 784);
  Drbg rng(808);
  std::size_t within = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> a(784), b(784);
    for (auto& v : a) v = rng.uniform01();
    for (auto& v : b) v = rng.uniform01();
    auto x = FixedTensor::from_doubles({784}, a);
    auto y = FixedTensor::from_doubles({784}, b);
    auto px = selection::jl_project(R, x);
    auto py = selection::jl_project(R, y);
    double orig = 0, proj = 0;
    for (std::size_t i = 0; i < 784; ++i) {
      double d = std::ldexp(static_cast<double>(x.raw()[i]) - y.raw()[i], -16);
      orig += d * d;
    }
    for (std::size_t j = 0; j < 64; ++j) {
      double d = std::ldexp(static_cast<double>(px[j] - py[j]), -32);
      proj += d * d;
    }
    double ratio = proj / orig;
    within += ratio >= 0.5 && ratio <= 1.5 ? 1 : 0;
  }
  c.require(within >= kJlShare * 1000, std::to_string(within) + "/1000 within [0.5, 1.5]");
  if (c.ok) c.detail = std::to_string(within) + "/1000 ratios within [0.5, 1.5]";
  return c;
}

Check criterion9() {
  using namespace market;
  Check c;
  Drbg rng(909);
  const std::vector<std::string> who = {"alice", "bob", "carol"};
  std::size_t applied = 0;
  for (int seq = 0; seq < 10000; ++seq) {
    LedgerState s;
    s.accounts = {{"alice", 1000}, {"bob", 1000}, {"carol", 500}};
    const Amount total = s.total_value();
    for (int step = 0; step < 12; ++step) {
      const std::string& a = who[rng.uniform(3)];
      const std::string& b = who[rng.uniform(3)];
      Amount amt = static_cast<Amount>(rng.uniform(300));
      std::string id = "x" + std::to_string(rng.uniform(4));
      std::string key = to_hex(Drbg(rng.uniform(3)).bytes(32));
      LedgerTx tx;
      tx.signer = a;
      switch (rng.uniform(6)) {
        case 0: tx = {TxKind::Escrow, a, {{"escrow_id", id}, {"counterparty", b}, {"amount", amt}}}; break;
        case 1:
          tx = {TxKind::Slash, a, {{"escrow_id", id}, {"evidence", {{"seq", 9}, {"verdict", "violation"}}}}};
          break;
        case 2: tx = {TxKind::Release, a, {{"escrow_id", id}, {"completed_seq", 23}}}; break;
        case 3:
          tx = {TxKind::PostHashlock, a,
                {{"lock_id", id}, {"hash", hash_hex(key)}, {"payee", b}, {"amount", amt},
                 {"deadline", s.height + 1 + rng.uniform(4)}}};
          break;
        case 4: tx = {TxKind::RevealKey, a, {{"lock_id", id}, {"key", key}}}; break;
        default: tx = {TxKind::Advance, a, {{"blocks", rng.uniform(3)}}};
      }
      try {
        apply_tx(s, tx);
        ++applied;
      } catch (const Error&) {
      }
      bool solvent = std::all_of(s.accounts.begin(), s.accounts.end(), [](const auto& kv) { return kv.second >= 0; });
      c.require(solvent && s.total_value() == total, "value not conserved");
    }
  }

  auto honest = run_script(load_script(kFixtures + "/market/honest.ndjson"));
  c.require(!honest.rejected && honest.conserved() && honest.state.balance("bob") == 1250 &&
                honest.state.locks.at("data-key").status == LockStatus::Settled,
            "honest script did not settle");
  auto withheld = run_script(load_script(kFixtures + "/market/withheld_key.ndjson"));
  c.require(withheld.conserved() && withheld.state.locks.at("data-key").status == LockStatus::Refunded &&
                withheld.state.balance("alice") == 1000,
            "withheld-key script did not refund");

  LedgerState s;
  s.accounts = {{"alice", 100}, {"bob", 100}};
  apply_tx(s, {TxKind::Escrow, "bob", {{"escrow_id", "e"}, {"counterparty", "alice"}, {"amount", 40}}});
  apply_tx(s, {TxKind::PostHashlock, "bob",
               {{"lock_id", "f"}, {"hash", hash_hex("00")}, {"deadline", 3}, {"purpose", "fairness"}, {"escrow_id", "e"}}});
  advance(s, 3);
  c.require(fairness_hook(s, "f") == FairnessOutcome::Slashed && s.balance("alice") == 140, "fairness hook did not slash");
  if (c.ok) c.detail = "1e4 sequences (" + std::to_string(applied) + " applied txs) conserved; scripts and fairness hook ok";
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Check()>>> criteria = {
      {"detection bound and Monte-Carlo", criterion1},
      {"audit budget 15%", criterion2},
      {"protocol equals oracle on 50 fixtures", criterion3},
      {"adversary catalogue and catch rates", criterion4},
      {"CP sample-size law", criterion5},
      {"commitment and Merkle properties", criterion6},
      {"split equivalence and parameter counts", criterion7},
      {"JL distortion", criterion8},
      {"ledger conservation", criterion9},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %zu %s: %s\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].first, c.detail.c_str());
    std::fflush(stdout);
    failed += c.ok ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
