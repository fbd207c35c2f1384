#include "diot/di_ot.hpp"

#include <cmath>
#include <set>

#include "doctest.h"

using namespace diot;
using namespace diot::di_ot;
using proto::ChallengeType;
using proto::TestTag;
using qsim::Basis;

namespace {

proto::ProtocolConfig small_cfg() {
  proto::ProtocolConfig cfg;
  cfg.n = 192;
  cfg.l = 2;
  cfg.domain_bits = 3;
  cfg.threshold = 0.05;
  return cfg;
}

}  // namespace

TEST_CASE("honest composed runs do not abort and deliver s_c") {
  auto cfg = small_cfg();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    auto res = run_protocol4_honest(cfg, rng);
    CHECK_FALSE(res.outcome.aborted);
    CHECK(res.failed_fraction == 0.0);
    const auto& want = res.outcome.choice_bit ? *res.outcome.s1 : *res.outcome.s0;
    CHECK(*res.outcome.receiver_output == want);
    CHECK(res.transcript.leakage.empty());
  }
}

TEST_CASE("usable-round bookkeeping") {
  auto cfg = small_cfg();
  Rng rng(42);
  auto res = run_protocol4_honest(cfg, rng);

  std::set<int> i_set(res.outcome.set_i.begin(), res.outcome.set_i.end());
  for (int idx : res.outcome.set_i_tilde) {
    CHECK(i_set.count(idx) == 1);  // I-tilde inside I
    const auto& rec = res.rounds[static_cast<std::size_t>(idx)];
    CHECK(rec.t == TestTag::Generate);
    CHECK(rec.rt == proto::RoundType::Bell);
    CHECK(rec.in_override_set);
  }
  // Partition by the sender's question basis.
  std::set<int> union_check;
  for (int idx : res.outcome.set_i_tilde_0) union_check.insert(idx);
  for (int idx : res.outcome.set_i_tilde_1) union_check.insert(idx);
  CHECK(union_check.size() == res.outcome.set_i_tilde.size());
}

TEST_CASE("usable-round count concentrates at the exact product rate") {
  // P(round usable) = P(ct=b) * P(both thetas Hadamard) * override_prob
  //                 * P(generate) = 1/2 * 1/4 * q * 1/2.
  auto cfg = small_cfg();
  cfg.n = 256;
  const double p_usable = 0.5 * 0.25 * cfg.override_prob * 0.5;
  const int trials = 60;
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < trials; ++seed) {
    Rng rng(seed + 500);
    total += static_cast<double>(run_protocol4_honest(cfg, rng).outcome.set_i_tilde.size());
  }
  const double mean = total / trials;
  const double expect = cfg.n * p_usable;
  const double sigma = std::sqrt(cfg.n * p_usable * (1 - p_usable) / trials);
  CHECK(std::abs(mean - expect) < 5.0 * sigma);
}

TEST_CASE("abort fires exactly when the failed fraction strictly exceeds the threshold") {
  // Synthetic device: honest on type a, random answers on type b, so test
  // rounds fail at a rate far above any sane threshold.
  struct RandomAnswers : selftest::DeviceStrategy {
    entcf::EvalOracle ka, kb;
    Rng rng{0};
    int chosen_b[2] = {0, 0};
    std::uint32_t chosen_x[2] = {0, 0};
    void begin_round(const entcf::EvalOracle& a, const entcf::EvalOracle& b, Rng& r) override {
      ka = a;
      kb = b;
      rng = r.split(1);
      for (int s = 0; s < 2; ++s) {
        chosen_b[s] = rng.bit();
        chosen_x[s] = rng.bits(a.domain_bits());
      }
    }
    std::uint32_t commitment(selftest::Component c) override {
      const int s = static_cast<int>(c);
      return (s == 0 ? ka : kb).eval(chosen_b[s], chosen_x[s]);
    }
    std::uint32_t preimage_response(selftest::Component c) override {
      const int s = static_cast<int>(c);
      return (static_cast<std::uint32_t>(chosen_b[s]) << ka.domain_bits()) | chosen_x[s];
    }
    std::uint32_t phase_response(selftest::Component) override { return rng.bits(ka.domain_bits()); }
    selftest::Answer answer(selftest::Component, qsim::Basis) override {
      return {rng.bit(), rng.bit()};
    }
  };

  auto cfg = small_cfg();
  cfg.n = 256;
  SUBCASE("cheating device aborts") {
    int aborts = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      SenderPolicy sender;
      ReceiverPolicy receiver;
      RandomAnswers device;
      Rng rng(seed + 900);
      auto res = run_protocol4(cfg, sender, receiver, device, rng, 0);
      if (res.outcome.aborted) ++aborts;
    }
    CHECK(aborts == 10);
  }

  SUBCASE("threshold comparison is strict") {
    SenderPolicy sender;
    ReceiverPolicy receiver;
    RandomAnswers device;
    Rng rng(901);
    auto res = run_protocol4(cfg, sender, receiver, device, rng, 0);
    REQUIRE(res.outcome.aborted);
    // Re-run with the threshold set exactly at the observed fraction: a tie
    // must not abort.
    auto cfg2 = cfg;
    cfg2.threshold = res.failed_fraction;
    SenderPolicy sender2;
    ReceiverPolicy receiver2;
    RandomAnswers device2;
    Rng rng2(901);
    auto res2 = run_protocol4(cfg2, sender2, receiver2, device2, rng2, 0);
    CHECK(res2.failed_fraction == res.failed_fraction);
    CHECK_FALSE(res2.outcome.aborted);
  }
}

TEST_CASE("sender messages never carry the receiver-side state basis or early trapdoors") {
  auto cfg = small_cfg();
  Rng rng(77);
  auto res = run_protocol4_honest(cfg, rng);
  bool saw_generate_set = false;
  for (const auto& m : res.transcript.messages) {
    if (m.step == "generate_set") {
      saw_generate_set = true;
      // Trapdoors appear here and only for usable rounds.
      for (auto& [k, v] : m.payload["trapdoor_b"].items()) {
        const int idx = std::stoi(k);
        CHECK(std::find(res.outcome.set_i_tilde.begin(), res.outcome.set_i_tilde.end(), idx) !=
              res.outcome.set_i_tilde.end());
      }
      continue;
    }
    if (m.from != "sender") continue;
    const std::string dumped = m.payload.dump();
    CHECK(dumped.find("theta_b") == std::string::npos);
    CHECK(dumped.find("trapdoor") == std::string::npos);
    CHECK(dumped.find("family") == std::string::npos);
  }
  CHECK(saw_generate_set);
}

TEST_CASE("correction op follows the basis tables") {
  auto cfg = small_cfg();
  Rng rng(91);
  auto res = run_protocol4_honest(cfg, rng);
  REQUIRE_FALSE(res.outcome.aborted);
  for (int idx : res.outcome.set_i_tilde) {
    const auto& rec = res.rounds[static_cast<std::size_t>(idx)];
    // Computational sender questions and Hadamard receiver questions carry
    // no correction, whatever the hardcore bits are.
    if (*rec.x == Basis::Computational) CHECK(compute_correction(rec, Side::Sender) == 0);
    if (*rec.y == Basis::Hadamard) CHECK(compute_correction(rec, Side::Receiver) == 0);
    if (*rec.x == Basis::Hadamard)
      CHECK(compute_correction(rec, Side::Sender) == rec.key_a.hardcore_bit(rec.c_a, *rec.d_a));
    if (*rec.y == Basis::Computational)
      CHECK(compute_correction(rec, Side::Receiver) == rec.key_b.hardcore_bit(rec.c_b, *rec.d_b));
  }
}

TEST_CASE("device components only ever see their own questions and answers") {
  // The measurement-basis input and the resulting output stay between each
  // component and the party holding it.
  auto cfg = small_cfg();
  Rng rng(92);
  auto res = run_protocol4_honest(cfg, rng);
  for (const auto& m : res.transcript.messages) {
    if (m.to == "device_b" || m.from == "device_b") {
      CHECK_FALSE(m.payload.contains("x"));
      CHECK_FALSE(m.payload.contains("a"));
      if (m.from == "device_b") CHECK((m.to == "receiver"));
      if (m.to == "device_b") CHECK((m.from == "receiver"));
    }
    if (m.to == "device_a" || m.from == "device_a") {
      CHECK_FALSE(m.payload.contains("y"));
      CHECK_FALSE(m.payload.contains("b"));
      if (m.from == "device_a") CHECK((m.to == "sender"));
      if (m.to == "device_a") CHECK((m.from == "sender"));
    }
  }
}

TEST_CASE("override set membership implies a type-b round") {
  auto cfg = small_cfg();
  Rng rng(31);
  auto res = run_protocol4_honest(cfg, rng);
  for (int idx : res.outcome.set_i)
    CHECK(res.rounds[static_cast<std::size_t>(idx)].ct() == ChallengeType::B);
}

TEST_CASE("composed transcripts are deterministic in the seed") {
  auto cfg = small_cfg();
  cfg.n = 64;
  auto run = [&cfg](std::uint64_t seed) {
    Rng rng(seed);
    return run_protocol4_honest(cfg, rng).transcript.dump();
  };
  CHECK(run(3) == run(3));
  CHECK(run(3) != run(4));
}

TEST_CASE("matched-basis usable rounds satisfy the corrected-bit identity") {
  auto cfg = small_cfg();
  Rng rng(55);
  auto res = run_protocol4_honest(cfg, rng);
  REQUIRE_FALSE(res.outcome.aborted);
  for (int idx : res.outcome.set_i_tilde) {
    const auto& rec = res.rounds[static_cast<std::size_t>(idx)];
    if (*rec.x != *rec.y) continue;
    const int v_alpha = rec.key_a.hardcore_bit(rec.c_a, *rec.d_a);
    const int v_beta = rec.key_b.hardcore_bit(rec.c_b, *rec.d_b);
    const int w_alpha = *rec.x == Basis::Hadamard ? v_alpha : 0;
    const int w_beta = *rec.y == Basis::Computational ? v_beta : 0;
    CHECK((*rec.a_bit ^ w_alpha) == (*rec.b_bit ^ w_beta));
  }
}
