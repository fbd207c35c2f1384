#include "diot/bell_ot.hpp"

#include <stdexcept>

namespace diot::bell_ot {

using proto::json;

LabelPolicy uniform_labels() {
  return [](int, Rng& rng) { return qsim::BellLabel{rng.bit(), rng.bit()}; };
}

LabelPolicy fixed_labels(qsim::BellLabel label) {
  return [label](int, Rng&) { return label; };
}

std::vector<qsim::Basis> SenderPolicy::bases(int n, Rng& rng) {
  std::vector<qsim::Basis> x(static_cast<std::size_t>(n));
  for (auto& b : x) b = qsim::basis_from_bit(rng.bit());
  return x;
}

std::pair<hashing::HashFunction, hashing::HashFunction> SenderPolicy::hashes(int n, int l,
                                                                             Rng& rng) {
  auto f0 = hashing::sample_hash(n, l, rng);
  auto f1 = hashing::sample_hash(n, l, rng);
  return {std::move(f0), std::move(f1)};
}

ScriptedSender::ScriptedSender(std::vector<qsim::Basis> bases, hashing::HashFunction f0,
                               hashing::HashFunction f1)
    : bases_(std::move(bases)), f0_(std::move(f0)), f1_(std::move(f1)) {}

std::vector<qsim::Basis> ScriptedSender::bases(int n, Rng&) {
  if (static_cast<int>(bases_.size()) != n)
    throw std::invalid_argument("ScriptedSender: basis script length mismatch");
  return bases_;
}

std::pair<hashing::HashFunction, hashing::HashFunction> ScriptedSender::hashes(int, int, Rng&) {
  return {f0_, f1_};
}

ReceiverContext::ReceiverContext(int n, int choice_bit, const BitString& v_beta,
                                 std::vector<qsim::StateVector>* states, Rng* rng)
    : n_(n), choice_bit_(choice_bit), v_beta_(v_beta), states_(states),
      measured_(static_cast<std::size_t>(n), false), rng_(rng) {}

int ReceiverContext::measure(int round, qsim::Basis basis) {
  auto idx = static_cast<std::size_t>(round);
  if (round < 0 || round >= n_) throw std::out_of_range("ReceiverContext::measure: bad round");
  if (measured_[idx]) throw std::logic_error("ReceiverContext::measure: qubit already consumed");
  auto r = qsim::measure_qubit((*states_)[idx], 1, basis, rng_->uniform());
  (*states_)[idx] = std::move(r.post);
  measured_[idx] = true;
  return r.outcome;
}

int ReceiverContext::unmeasured_count() const {
  int count = 0;
  for (bool m : measured_)
    if (!m) ++count;
  return count;
}

void HonestReceiver::quantum_phase(ReceiverContext& ctx, Rng&) {
  const auto y = qsim::basis_from_bit(ctx.choice_bit());
  outcomes_.clear();
  for (int i = 0; i < ctx.n(); ++i)
    outcomes_.push_back(static_cast<std::uint8_t>(ctx.measure(i, y)));
}

BitString HonestReceiver::finish(ReceiverContext& ctx, const std::vector<qsim::Basis>& x,
                                 const hashing::HashFunction& f0,
                                 const hashing::HashFunction& f1, Rng&) {
  const auto y = qsim::basis_from_bit(ctx.choice_bit());
  BitString input;
  for (int i = 0; i < ctx.n(); ++i) {
    if (x[static_cast<std::size_t>(i)] != y) continue;  // keep only the matching partition
    const int w = receiver_correction(y, ctx.v_beta()[static_cast<std::size_t>(i)]);
    input.push_back(static_cast<std::uint8_t>(outcomes_[static_cast<std::size_t>(i)] ^ w));
  }
  return (ctx.choice_bit() ? f1 : f0).apply(input);
}

proto::json HonestReceiver::private_record() const {
  return {{"b", bits::to_hex(outcomes_)}};
}

int sender_correction(qsim::Basis x, int v_alpha) {
  return x == qsim::Basis::Hadamard ? v_alpha : 0;
}

int receiver_correction(qsim::Basis y, int v_beta) {
  return y == qsim::Basis::Computational ? v_beta : 0;
}

RunResult run_protocol1(const proto::ProtocolConfig& cfg, SenderPolicy& sender,
                        ReceiverStrategy& receiver, const LabelPolicy& labels, Rng& rng,
                        std::optional<int> storage_capacity) {
  const int n = cfg.n;
  Rng device_rng = rng.split(1);
  Rng sender_rng = rng.split(2);
  Rng receiver_rng = rng.split(3);
  Rng measure_rng = rng.split(4);

  proto::Transcript tr;
  tr.protocol = "ot1";
  tr.config = proto::config_to_json(cfg);

  // Step 1: the dealer prepares the labelled Bell pairs.
  std::vector<qsim::BellLabel> lbl(static_cast<std::size_t>(n));
  std::vector<qsim::StateVector> states;
  states.reserve(static_cast<std::size_t>(n));
  BitString v_alpha, v_beta;
  for (int i = 0; i < n; ++i) {
    lbl[static_cast<std::size_t>(i)] = labels(i, device_rng);
    states.push_back(qsim::make_bell(lbl[static_cast<std::size_t>(i)]));
    v_alpha.push_back(static_cast<std::uint8_t>(lbl[static_cast<std::size_t>(i)].v_alpha));
    v_beta.push_back(static_cast<std::uint8_t>(lbl[static_cast<std::size_t>(i)].v_beta));
  }
  tr.add("labels_sender", "device", "sender", -1, {{"v_alpha", bits::to_hex(v_alpha)}});
  tr.add("labels_receiver", "device", "receiver", -1, {{"v_beta", bits::to_hex(v_beta)}});

  // Step 2: the receiver acts on its halves (honest: measure everything now).
  const int c = receiver_rng.bit();
  ReceiverContext ctx(n, c, v_beta, &states, &measure_rng);
  receiver.quantum_phase(ctx, receiver_rng);

  // Step 3: the sender measures in uniformly random bases.
  const auto x = sender.bases(n, sender_rng);
  BitString a;
  for (int i = 0; i < n; ++i) {
    auto r = qsim::measure_qubit(states[static_cast<std::size_t>(i)], 0,
                                 x[static_cast<std::size_t>(i)], measure_rng.uniform());
    states[static_cast<std::size_t>(i)] = std::move(r.post);
    a.push_back(static_cast<std::uint8_t>(r.outcome));
  }

  // Storage checkpoint: right before the bases are announced.
  const int capacity = storage_capacity.value_or(n);
  if (ctx.unmeasured_count() > capacity)
    throw std::runtime_error("run_protocol1: receiver exceeds the storage bound at announce time");

  // Step 4: announce bases and hash functions, output s_0 and s_1.
  auto [f0, f1] = sender.hashes(n, cfg.l, sender_rng);
  BitString xbits;
  for (auto b : x) xbits.push_back(static_cast<std::uint8_t>(qsim::basis_bit(b)));
  tr.add("bases_announce", "sender", "public", -1, {{"x", bits::to_hex(xbits)}});
  tr.add("hash_announce", "sender", "public", -1,
         {{"f0", f0.serialize()}, {"f1", f1.serialize()}});

  BitString in0, in1;
  for (int i = 0; i < n; ++i) {
    const auto xi = x[static_cast<std::size_t>(i)];
    const int k = a[static_cast<std::size_t>(i)] ^
                  sender_correction(xi, v_alpha[static_cast<std::size_t>(i)]);
    (xi == qsim::Basis::Computational ? in0 : in1).push_back(static_cast<std::uint8_t>(k));
  }
  proto::OtOutcome out;
  out.aborted = false;  // no step of this protocol can abort
  out.choice_bit = c;
  out.s0 = f0.apply(in0);
  out.s1 = f1.apply(in1);
  for (int i = 0; i < n; ++i)
    (x[static_cast<std::size_t>(i)] == qsim::Basis::Computational ? out.set_i_tilde_0
                                                                  : out.set_i_tilde_1)
        .push_back(i);
  out.set_i_tilde.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.set_i_tilde[static_cast<std::size_t>(i)] = i;

  // Step 5: the receiver produces its output.
  out.receiver_output = receiver.finish(ctx, x, f0, f1, receiver_rng);

  json priv;
  priv["sender"] = {{"a", bits::to_hex(a)}};
  priv["receiver"] = receiver.private_record();
  priv["receiver"]["choice_bit"] = c;
  tr.private_data = std::move(priv);
  json outcome;
  outcome["aborted"] = out.aborted;
  outcome["s0"] = bits::to_hex(*out.s0);
  outcome["s1"] = bits::to_hex(*out.s1);
  outcome["receiver_output"] = bits::to_hex(*out.receiver_output);
  outcome["choice_bit"] = c;
  tr.outcome = std::move(outcome);
  return {std::move(out), std::move(tr)};
}

}  // namespace diot::bell_ot
