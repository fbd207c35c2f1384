#include "diot/di_ot.hpp"

#include <stdexcept>

namespace diot::di_ot {

using proto::ChallengeType;
using proto::json;
using proto::RoundType;
using proto::TestTag;
using qsim::Basis;

std::pair<Basis, Basis> SenderPolicy::state_bases(int, Rng& rng) {
  return {qsim::basis_from_bit(rng.bit()), qsim::basis_from_bit(rng.bit())};
}

ChallengeType SenderPolicy::challenge_type(int, Rng& rng) {
  return rng.bit() ? ChallengeType::B : ChallengeType::A;
}

std::pair<Basis, Basis> SenderPolicy::questions(int, Rng& rng) {
  return {qsim::basis_from_bit(rng.bit()), qsim::basis_from_bit(rng.bit())};
}

TestTag SenderPolicy::test_tag(int, RoundType rt, Rng& rng) {
  if (rt != RoundType::Bell) return TestTag::Test;
  return rng.bit() ? TestTag::Generate : TestTag::Test;
}

std::pair<hashing::HashFunction, hashing::HashFunction> SenderPolicy::hashes(int n, int l,
                                                                             Rng& rng) {
  auto f0 = hashing::sample_hash(n, l, rng);
  auto f1 = hashing::sample_hash(n, l, rng);
  return {std::move(f0), std::move(f1)};
}

std::pair<Basis, Basis> ScriptedSenderPolicy::state_bases(int round, Rng& rng) {
  return script_.fixed_state_bases ? *script_.fixed_state_bases
                                   : SenderPolicy::state_bases(round, rng);
}

ChallengeType ScriptedSenderPolicy::challenge_type(int round, Rng& rng) {
  return script_.fixed_challenge_type ? *script_.fixed_challenge_type
                                      : SenderPolicy::challenge_type(round, rng);
}

std::pair<Basis, Basis> ScriptedSenderPolicy::questions(int round, Rng& rng) {
  return script_.fixed_questions ? *script_.fixed_questions : SenderPolicy::questions(round, rng);
}

TestTag ScriptedSenderPolicy::test_tag(int round, RoundType rt, Rng& rng) {
  if (rt == RoundType::Bell && script_.fixed_bell_tag) return *script_.fixed_bell_tag;
  return SenderPolicy::test_tag(round, rt, rng);
}

bool ReceiverPolicy::override_basis(int, double override_prob, Rng& rng) {
  return rng.uniform() < override_prob;
}

int compute_correction(const proto::RoundRecord& rec, Side side) {
  if (side == Side::Sender) {
    if (!rec.d_a || !rec.x) throw std::invalid_argument("compute_correction: incomplete record");
    if (*rec.x != Basis::Hadamard) return 0;
    return rec.key_a.hardcore_bit(rec.c_a, *rec.d_a);
  }
  if (!rec.d_b || !rec.y) throw std::invalid_argument("compute_correction: incomplete record");
  if (*rec.y != Basis::Computational) return 0;
  return rec.key_b.hardcore_bit(rec.c_b, *rec.d_b);
}

namespace {

std::string hexv(std::uint32_t value, int width) {
  return bits::to_hex(bits::from_value(value, width));
}

json published_round_payload(const proto::RoundRecord& rec, int m) {
  json p;
  p["c_b"] = hexv(rec.c_b, m + 2);
  if (rec.ct() == ChallengeType::A) {
    p["z_b"] = hexv(*rec.z_b, m + 1);
  } else {
    p["d_b"] = hexv(*rec.d_b, m);
    p["y"] = qsim::basis_bit(*rec.y);
    p["b"] = *rec.b_bit;
    p["h_b"] = *rec.h_b;
  }
  return p;
}

}  // namespace

RunResult run_protocol4(const proto::ProtocolConfig& cfg, SenderPolicy& sender,
                        ReceiverPolicy& receiver, selftest::DeviceStrategy& device, Rng& rng,
                        int choice_bit) {
  const int n = cfg.n;
  const int m = cfg.domain_bits;
  RunResult result;
  auto& tr = result.transcript;
  tr.protocol = "ot4";
  tr.config = proto::config_to_json(cfg);

  Rng sender_rng = rng.split(1);
  Rng receiver_rng = rng.split(2);

  const Basis choice_basis = qsim::basis_from_bit(choice_bit);
  auto& rounds = result.rounds;
  rounds.reserve(static_cast<std::size_t>(n));
  json sender_priv_rounds = json::array();
  json receiver_priv_rounds = json::array();

  // --- Data generation: n single-verifier self-test rounds with override ---
  for (int i = 0; i < n; ++i) {
    Rng srng = sender_rng.split(static_cast<std::uint64_t>(i));
    Rng rrng = receiver_rng.split(static_cast<std::uint64_t>(i));
    Rng drng = rng.split(3).split(static_cast<std::uint64_t>(i));

    proto::RoundRecord rec;
    rec.index = i;
    auto [ta, tb] = sender.state_bases(i, srng);
    rec.theta_a = ta;
    rec.theta_b = tb;
    rec.key_a = entcf::keygen(ta, m, srng);
    rec.key_b = entcf::keygen(tb, m, srng);
    rec.ct_a = rec.ct_b = sender.challenge_type(i, srng);

    tr.add("keys_to_device_a", "sender", "device_a", i, {{"key_id", rec.key_a.key_id()}, {"m", m}});
    tr.add("key_b_to_receiver", "sender", "receiver", i, {{"key_id", rec.key_b.key_id()}, {"m", m}});
    tr.add("keys_to_device_b", "receiver", "device_b", i, {{"key_id", rec.key_b.key_id()}, {"m", m}});

    device.begin_round(rec.key_a.oracle(), rec.key_b.oracle(), drng);
    rec.c_a = device.commitment(selftest::Component::A);
    rec.c_b = device.commitment(selftest::Component::B);
    tr.add("commitment_a", "device_a", "sender", i, {{"c_a", hexv(rec.c_a, m + 2)}});
    tr.add("commitment_b", "device_b", "receiver", i, {{"c_b", hexv(rec.c_b, m + 2)}});

    tr.add("challenge_type", "sender", "receiver", i,
           {{"ct", rec.ct() == ChallengeType::A ? "a" : "b"}});
    tr.add("ct_to_device_a", "sender", "device_a", i,
           {{"ct", rec.ct() == ChallengeType::A ? "a" : "b"}});
    tr.add("ct_to_device_b", "receiver", "device_b", i,
           {{"ct", rec.ct() == ChallengeType::A ? "a" : "b"}});

    if (rec.ct() == ChallengeType::A) {
      rec.z_a = device.preimage_response(selftest::Component::A);
      rec.z_b = device.preimage_response(selftest::Component::B);
      tr.add("preimage_a", "device_a", "sender", i, {{"z_a", hexv(*rec.z_a, m + 1)}});
      tr.add("preimage_b", "device_b", "receiver", i, {{"z_b", hexv(*rec.z_b, m + 1)}});
    } else {
      rec.d_a = device.phase_response(selftest::Component::A);
      rec.d_b = device.phase_response(selftest::Component::B);
      tr.add("phase_a", "device_a", "sender", i, {{"d_a", hexv(*rec.d_a, m)}});
      tr.add("phase_b", "device_b", "receiver", i, {{"d_b", hexv(*rec.d_b, m)}});

      auto [x, y_sent] = sender.questions(i, srng);
      rec.x = x;
      rec.y_sent = y_sent;
      tr.add("question_y", "sender", "receiver", i, {{"y", qsim::basis_bit(y_sent)}});

      rec.in_override_set = receiver.override_basis(i, cfg.override_prob, rrng);
      rec.y = rec.in_override_set ? choice_basis : y_sent;
      tr.add("question_to_device_a", "sender", "device_a", i, {{"x", qsim::basis_bit(x)}});
      tr.add("question_to_device_b", "receiver", "device_b", i,
             {{"y", qsim::basis_bit(*rec.y)}});

      auto ans_a = device.answer(selftest::Component::A, x);
      rec.a_bit = ans_a.bit;
      rec.h_a = ans_a.h;
      tr.add("answer_a", "device_a", "sender", i, {{"a", ans_a.bit}, {"h_a", ans_a.h}});
      auto ans_b = device.answer(selftest::Component::B, *rec.y);
      rec.b_bit = ans_b.bit;
      rec.h_b = ans_b.h;
      tr.add("answer_b", "device_b", "receiver", i, {{"b", ans_b.bit}, {"h_b", ans_b.h}});
    }

    for (const auto& leak : device.leakage_log()) tr.leakage.push_back(leak);
    device.clear_leakage();

    // Step 2: round type.
    rec.rt = proto::classify_round(rec);
    rounds.push_back(std::move(rec));
  }

  // Step 3: test/generate assignment, sent to the receiver.
  {
    BitString tags;
    for (auto& rec : rounds) {
      Rng srng = sender_rng.split(static_cast<std::uint64_t>(rec.index), 7);
      rec.t = sender.test_tag(rec.index, rec.rt, srng);
      tags.push_back(rec.t == TestTag::Generate ? 1 : 0);
    }
    tr.add("test_assignment", "sender", "receiver", -1, {{"generate_flags", bits::to_hex(tags)}});
  }

  // Step 4: the receiver reveals the override set and its stored data for
  // test rounds outside it.
  json published = json::object();
  for (auto& rec : rounds) {
    if (rec.in_override_set) result.outcome.set_i.push_back(rec.index);
    if (rec.t == TestTag::Test && !rec.in_override_set)
      published[std::to_string(rec.index)] = published_round_payload(rec, m);
  }
  tr.add("override_set", "receiver", "sender", -1, {{"indices", result.outcome.set_i}});
  tr.add("test_data", "receiver", "sender", -1, {{"rounds", published}});

  int failed = 0;
  for (auto& rec : rounds) {
    if (rec.t != TestTag::Test || rec.in_override_set) continue;
    rec.w = selftest::winning_check(rec);
    ++result.published_tests;
    if (rec.w == proto::Verdict::Fail) ++failed;
  }
  result.failed_fraction =
      result.published_tests > 0 ? static_cast<double>(failed) / result.published_tests : 0.0;

  // Step 5: abort on strictly exceeding the threshold; ties pass.
  const bool abort = result.failed_fraction > cfg.threshold;
  tr.add("abort_decision", "sender", "public", -1,
         {{"aborted", abort},
          {"failed_fraction", result.failed_fraction},
          {"published_tests", result.published_tests}});
  result.outcome.aborted = abort;
  result.outcome.choice_bit = choice_bit;

  // Private sections are recorded even on abort, for replay.
  for (const auto& rec : rounds) {
    json sp;
    sp["theta_a"] = qsim::basis_bit(rec.theta_a);
    sp["theta_b"] = qsim::basis_bit(rec.theta_b);
    sp["key_a"] = bits::bytes_to_hex(rec.key_a.serialize());
    sp["key_b"] = bits::bytes_to_hex(rec.key_b.serialize());
    sp["ct"] = rec.ct() == ChallengeType::A ? "a" : "b";
    sp["c_a"] = hexv(rec.c_a, m + 2);
    if (rec.z_a) sp["z_a"] = hexv(*rec.z_a, m + 1);
    if (rec.d_a) sp["d_a"] = hexv(*rec.d_a, m);
    if (rec.x) sp["x"] = qsim::basis_bit(*rec.x);
    if (rec.y_sent) sp["y_sent"] = qsim::basis_bit(*rec.y_sent);
    if (rec.a_bit) sp["a"] = *rec.a_bit;
    if (rec.h_a) sp["h_a"] = *rec.h_a;
    sender_priv_rounds.push_back(std::move(sp));

    json rp;
    rp["c_b"] = hexv(rec.c_b, m + 2);
    if (rec.z_b) rp["z_b"] = hexv(*rec.z_b, m + 1);
    if (rec.d_b) rp["d_b"] = hexv(*rec.d_b, m);
    if (rec.y) rp["y_used"] = qsim::basis_bit(*rec.y);
    if (rec.b_bit) rp["b"] = *rec.b_bit;
    if (rec.h_b) rp["h_b"] = *rec.h_b;
    rp["override"] = rec.in_override_set;
    receiver_priv_rounds.push_back(std::move(rp));
  }
  tr.private_data["sender"] = {{"rounds", std::move(sender_priv_rounds)}};
  tr.private_data["receiver"] =
      json{{"rounds", std::move(receiver_priv_rounds)}, {"choice_bit", choice_bit}};

  if (abort) {
    tr.outcome = {{"aborted", true}};
    return result;
  }

  // Step 6: usable rounds and the receiver-side trapdoors.
  json trapdoors = json::object();
  for (const auto& rec : rounds) {
    if (!(rec.in_override_set && rec.t == TestTag::Generate)) continue;
    result.outcome.set_i_tilde.push_back(rec.index);
    trapdoors[std::to_string(rec.index)] = bits::bytes_to_hex(rec.key_b.serialize());
  }
  tr.add("generate_set", "sender", "public", -1,
         {{"indices", result.outcome.set_i_tilde}, {"trapdoor_b", trapdoors}});

  // Steps 7-8: corrections on the sender side, hashing, announcement.
  Rng hash_rng = sender_rng.split(0xf00d);
  auto [f0, f1] = sender.hashes(n, cfg.l, hash_rng);
  json x_announce = json::object();
  BitString in0, in1;
  for (const auto& rec : rounds) {
    if (!(rec.in_override_set && rec.t == TestTag::Generate)) continue;
    const int k = *rec.a_bit ^ compute_correction(rec, Side::Sender);
    if (*rec.x == Basis::Computational) {
      result.outcome.set_i_tilde_0.push_back(rec.index);
      in0.push_back(static_cast<std::uint8_t>(k));
    } else {
      result.outcome.set_i_tilde_1.push_back(rec.index);
      in1.push_back(static_cast<std::uint8_t>(k));
    }
    x_announce[std::to_string(rec.index)] = qsim::basis_bit(*rec.x);
  }
  tr.add("bases_and_hashes", "sender", "public", -1,
         {{"x", x_announce}, {"f0", f0.serialize()}, {"f1", f1.serialize()}});
  result.outcome.s0 = f0.apply(in0);
  result.outcome.s1 = f1.apply(in1);

  // Step 9: receiver output from its own corrections.
  BitString in_c;
  for (const auto& rec : rounds) {
    if (!(rec.in_override_set && rec.t == TestTag::Generate)) continue;
    if (qsim::basis_bit(*rec.x) != choice_bit) continue;  // keep I-tilde_c only
    // The receiver works from the published trapdoor blob.
    auto rec_view = rec;
    rec_view.key_b = entcf::KeyPair::deserialize(rec.key_b.serialize());
    in_c.push_back(static_cast<std::uint8_t>(*rec.b_bit ^ compute_correction(rec_view, Side::Receiver)));
  }
  result.outcome.receiver_output = (choice_bit ? f1 : f0).apply(in_c);

  json outcome;
  outcome["aborted"] = false;
  outcome["s0"] = bits::to_hex(*result.outcome.s0);
  outcome["s1"] = bits::to_hex(*result.outcome.s1);
  outcome["receiver_output"] = bits::to_hex(*result.outcome.receiver_output);
  outcome["choice_bit"] = choice_bit;
  outcome["i_tilde"] = result.outcome.set_i_tilde;
  tr.outcome = std::move(outcome);
  return result;
}

RunResult run_protocol4_honest(const proto::ProtocolConfig& cfg, Rng& rng) {
  SenderPolicy sender;
  ReceiverPolicy receiver;
  selftest::HonestDevice device;
  Rng run_rng = rng.split(0x9474);
  const int c = rng.bit();
  return run_protocol4(cfg, sender, receiver, device, run_rng, c);
}

}  // namespace diot::di_ot
