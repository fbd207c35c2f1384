#include "diot/adversary.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace diot::adversary {

using proto::ChallengeType;
using proto::json;
using qsim::Basis;

Estimate binomial_estimate(int successes, int trials, double z) {
  Estimate e;
  e.successes = successes;
  e.trials = trials;
  e.value = trials > 0 ? static_cast<double>(successes) / trials : 0.0;
  const double sigma = trials > 0 ? std::sqrt(e.value * (1.0 - e.value) / trials) : 0.0;
  e.ci_low = std::max(0.0, e.value - z * sigma);
  e.ci_high = std::min(1.0, e.value + z * sigma);
  return e;
}

namespace {

json estimate_to_json(const Estimate& e) {
  return {{"value", e.value},
          {"ci_low", e.ci_low},
          {"ci_high", e.ci_high},
          {"successes", e.successes},
          {"trials", e.trials}};
}

json relations_to_json(const proto::RelationCheck& rc) {
  return {{"storage_relation_ok", rc.storage_relation_ok},
          {"storage_slack", rc.storage_slack},
          {"parameter_relation_ok", rc.parameter_relation_ok},
          {"parameter_slack", rc.parameter_slack},
          {"violated", rc.violated}};
}

}  // namespace

json StorageAttackReport::to_json() const {
  return {{"config", config_echo},
          {"relations", relations_to_json(relations)},
          {"both_strings", estimate_to_json(both_strings)},
          {"other_string", estimate_to_json(other_string)},
          {"seed", seed}};
}

// --- Unbounded storage --------------------------------------------------------

BitString UnboundedReceiver::finish(bell_ot::ReceiverContext& ctx,
                                    const std::vector<Basis>& x, const hashing::HashFunction& f0,
                                    const hashing::HashFunction& f1, Rng&) {
  // Copy the announced bases, measure, and correct as if y_i = x_i.
  BitString in0, in1;
  for (int i = 0; i < ctx.n(); ++i) {
    const Basis xi = x[static_cast<std::size_t>(i)];
    const int b = ctx.measure(i, xi);
    const int k = b ^ bell_ot::receiver_correction(xi, ctx.v_beta()[static_cast<std::size_t>(i)]);
    (xi == Basis::Computational ? in0 : in1).push_back(static_cast<std::uint8_t>(k));
  }
  s0_ = f0.apply(in0);
  s1_ = f1.apply(in1);
  return ctx.choice_bit() ? *s1_ : *s0_;
}

StorageAttackReport unbounded_receiver_attack(const proto::ProtocolConfig& cfg, int trials,
                                              std::uint64_t seed) {
  StorageAttackReport report;
  report.config_echo = proto::config_to_json(cfg);
  report.relations = proto::check_parameter_relations(cfg, cfg.n);
  report.seed = seed;
  int both = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng = Rng(seed).split(static_cast<std::uint64_t>(t));
    bell_ot::SenderPolicy sender;
    UnboundedReceiver receiver;
    auto res = bell_ot::run_protocol1(cfg, sender, receiver, bell_ot::uniform_labels(), rng);
    if (receiver.guessed_s0() == res.outcome.s0 && receiver.guessed_s1() == res.outcome.s1) ++both;
  }
  report.both_strings = binomial_estimate(both, trials);
  return report;
}

// --- Bounded storage ------------------------------------------------------------

BoundedReceiver::BoundedReceiver(int capacity, MeasurePolicy policy)
    : capacity_(capacity), policy_(policy) {}

int BoundedReceiver::effective_choice_bit(int honest_choice) const {
  return policy_ == MeasurePolicy::Computational ? 0 : honest_choice;
}

void BoundedReceiver::quantum_phase(bell_ot::ReceiverContext& ctx, Rng& rng) {
  const int n = ctx.n();
  guessed_bases_.assign(static_cast<std::size_t>(n), Basis::Computational);
  outcomes_.assign(static_cast<std::size_t>(n), 0);
  stored_.assign(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    if (i < capacity_) {
      stored_[static_cast<std::size_t>(i)] = true;  // keep until the bases appear
      continue;
    }
    const Basis guess =
        policy_ == MeasurePolicy::RandomBases ? qsim::basis_from_bit(rng.bit()) : Basis::Computational;
    guessed_bases_[static_cast<std::size_t>(i)] = guess;
    outcomes_[static_cast<std::size_t>(i)] = ctx.measure(i, guess);
  }
}

BitString BoundedReceiver::finish(bell_ot::ReceiverContext& ctx, const std::vector<Basis>& x,
                                  const hashing::HashFunction& f0,
                                  const hashing::HashFunction& f1, Rng&) {
  BitString in0, in1;
  for (int i = 0; i < ctx.n(); ++i) {
    const Basis xi = x[static_cast<std::size_t>(i)];
    int b;
    if (stored_[static_cast<std::size_t>(i)]) {
      b = ctx.measure(i, xi);  // stored qubits get the right basis
    } else {
      b = outcomes_[static_cast<std::size_t>(i)];  // uncorrelated when the guess missed
    }
    const int k = b ^ bell_ot::receiver_correction(xi, ctx.v_beta()[static_cast<std::size_t>(i)]);
    (xi == Basis::Computational ? in0 : in1).push_back(static_cast<std::uint8_t>(k));
  }
  s0_ = f0.apply(in0);
  s1_ = f1.apply(in1);
  return ctx.choice_bit() ? *s1_ : *s0_;
}

StorageAttackReport bounded_receiver_attack(const proto::ProtocolConfig& cfg, int capacity,
                                            MeasurePolicy policy, int trials, std::uint64_t seed) {
  StorageAttackReport report;
  report.config_echo = proto::config_to_json(cfg);
  report.relations = proto::check_parameter_relations(cfg, cfg.n);
  report.seed = seed;
  int both = 0, other = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng = Rng(seed).split(static_cast<std::uint64_t>(t));
    bell_ot::SenderPolicy sender;
    BoundedReceiver receiver(capacity, policy);
    auto res =
        bell_ot::run_protocol1(cfg, sender, receiver, bell_ot::uniform_labels(), rng, capacity);
    const int c_eff = receiver.effective_choice_bit(res.outcome.choice_bit);
    const auto& s_other = c_eff ? res.outcome.s0 : res.outcome.s1;
    const auto& guess_other = c_eff ? receiver.guessed_s0() : receiver.guessed_s1();
    if (guess_other == s_other) ++other;
    if (receiver.guessed_s0() == res.outcome.s0 && receiver.guessed_s1() == res.outcome.s1) ++both;
  }
  report.both_strings = binomial_estimate(both, trials);
  report.other_string = binomial_estimate(other, trials);
  return report;
}

// --- Classical devices -----------------------------------------------------------

namespace {

class ClassicalDevice : public selftest::DeviceStrategy {
 public:
  explicit ClassicalDevice(ClassicalKind kind) : kind_(kind) {}

  void begin_round(const entcf::EvalOracle& key_a, const entcf::EvalOracle& key_b,
                   Rng& rng) override {
    oracle_[0] = key_a;
    oracle_[1] = key_b;
    rng_ = rng.split(0xc1a55);
    for (int s = 0; s < 2; ++s) {
      chosen_b_[s] = rng_.bit();
      chosen_x_[s] = rng_.bits(oracle_[s].domain_bits());
      h_[s] = rng_.bit();
    }
    shared_guess_ = rng_.bit();  // classical hidden variable shared at preparation
  }

  std::uint32_t commitment(selftest::Component comp) override {
    const int s = static_cast<int>(comp);
    return oracle_[s].eval(chosen_b_[s], chosen_x_[s]);
  }

  std::uint32_t preimage_response(selftest::Component comp) override {
    const int s = static_cast<int>(comp);
    const int m = oracle_[s].domain_bits();
    if (kind_ == ClassicalKind::RandomAnswers) return rng_.bits(m + 1);
    return (static_cast<std::uint32_t>(chosen_b_[s]) << m) | chosen_x_[s];
  }

  std::uint32_t phase_response(selftest::Component comp) override {
    return rng_.bits(oracle_[static_cast<int>(comp)].domain_bits());
  }

  selftest::Answer answer(selftest::Component comp, Basis question) override {
    const int s = static_cast<int>(comp);
    if (kind_ != ClassicalKind::BestKnown) return {rng_.bit(), rng_.bit()};
    // Pass the coordinates an injective key pins (own preimage bit corrected
    // by the self-chosen h); guess the rest with the shared bit.
    const Basis pinned = comp == selftest::Component::A ? Basis::Computational : Basis::Hadamard;
    if (question == pinned) return {chosen_b_[s] ^ h_[s], h_[s]};
    return {shared_guess_, h_[s]};
  }

 private:
  ClassicalKind kind_;
  entcf::EvalOracle oracle_[2];
  Rng rng_{0};
  int chosen_b_[2] = {0, 0};
  std::uint32_t chosen_x_[2] = {0, 0};
  int h_[2] = {0, 0};
  int shared_guess_ = 0;
};

}  // namespace

std::unique_ptr<selftest::DeviceStrategy> classical_device_strategy(ClassicalKind kind) {
  return std::make_unique<ClassicalDevice>(kind);
}

json ClassicalDeviceReport::to_json() const {
  return {{"bell_matched_failure", estimate_to_json(bell_matched_failure)},
          {"type_a_pass", estimate_to_json(type_a_pass)},
          {"overall_failure", estimate_to_json(overall_failure)},
          {"checked_bell_rounds", checked_bell_rounds}};
}

ClassicalDeviceReport measure_classical_device(ClassicalKind kind,
                                               const proto::ProtocolConfig& cfg,
                                               int target_checked_bell_rounds,
                                               std::uint64_t seed) {
  auto device = classical_device_strategy(kind);
  ClassicalDeviceReport report;
  int bell_checked = 0, bell_failed = 0;
  int type_a = 0, type_a_passed = 0;
  int total = 0, failed = 0;
  Rng root(seed);
  for (std::uint64_t i = 0; bell_checked < target_checked_bell_rounds; ++i) {
    Rng rng = root.split(i);
    auto rec = selftest::run_selftest_round(selftest::VerifierMode::SingleVerifier, cfg, *device,
                                            rng);
    ++total;
    if (rec.w == proto::Verdict::Fail) ++failed;
    if (rec.ct() == ChallengeType::A) {
      ++type_a;
      if (rec.w == proto::Verdict::Pass) ++type_a_passed;
    }
    if (rec.rt == proto::RoundType::Bell && rec.x && rec.y && *rec.x == *rec.y) {
      ++bell_checked;
      if (rec.w == proto::Verdict::Fail) ++bell_failed;
    }
  }
  report.bell_matched_failure = binomial_estimate(bell_failed, bell_checked);
  report.type_a_pass = binomial_estimate(type_a_passed, type_a);
  report.overall_failure = binomial_estimate(failed, total);
  report.checked_bell_rounds = bell_checked;
  return report;
}

json AbortReport::to_json() const {
  return {{"abort_rate", estimate_to_json(abort_rate)},
          {"relations", relations_to_json(relations)}};
}

AbortReport protocol4_abort_rate(ClassicalKind kind, const proto::ProtocolConfig& cfg, int trials,
                                 std::uint64_t seed) {
  AbortReport report;
  report.relations = proto::check_parameter_relations(cfg, cfg.n);
  int aborts = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng = Rng(seed).split(static_cast<std::uint64_t>(t));
    di_ot::SenderPolicy sender;
    di_ot::ReceiverPolicy receiver;
    auto device = classical_device_strategy(kind);
    const int c = rng.bit();
    auto res = di_ot::run_protocol4(cfg, sender, receiver, *device, rng, c);
    if (res.outcome.aborted) ++aborts;
  }
  report.abort_rate = binomial_estimate(aborts, trials);
  return report;
}

// --- Correction guessing ----------------------------------------------------------

json CorrectionGuessReport::to_json() const {
  return {{"input_guess", estimate_to_json(input_guess)},
          {"expected_rate", expected_rate},
          {"hash_guess", estimate_to_json(hash_guess)}};
}

CorrectionGuessReport protocol4_correction_guess(const proto::ProtocolConfig& cfg, int trials,
                                                 std::uint64_t seed) {
  CorrectionGuessReport report;
  int input_hits = 0, hash_hits = 0, usable_trials = 0;
  double expected_sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    Rng rng = Rng(seed).split(static_cast<std::uint64_t>(t));
    di_ot::SenderPolicy sender;
    di_ot::ReceiverPolicy receiver;
    selftest::HonestDevice device;
    const int c = rng.bit();
    auto res = di_ot::run_protocol4(cfg, sender, receiver, device, rng, c);
    if (res.outcome.aborted) continue;
    ++usable_trials;

    // The receiver never holds usable data for the unchosen partition: its
    // device answered in the choice basis on every usable round, so each
    // corrected bit of the other string must be guessed outright.
    const auto& other_set = c ? res.outcome.set_i_tilde_0 : res.outcome.set_i_tilde_1;
    BitString truth, guess;
    Rng guess_rng = rng.split(0x9e55);
    for (int idx : other_set) {
      const auto& rec = res.rounds[static_cast<std::size_t>(idx)];
      truth.push_back(static_cast<std::uint8_t>(
          *rec.a_bit ^ di_ot::compute_correction(rec, di_ot::Side::Sender)));
      guess.push_back(static_cast<std::uint8_t>(guess_rng.bit()));
    }
    expected_sum += std::exp2(-static_cast<double>(other_set.size()));
    if (truth == guess) ++input_hits;

    // Hash-level success: the guessed input hashing to the real s_{1-c},
    // using the hash functions announced in the transcript.
    std::optional<hashing::HashFunction> f_other;
    for (const auto& msg : res.transcript.messages)
      if (msg.step == "bases_and_hashes")
        f_other = hashing::HashFunction::deserialize(
            msg.payload.at(c ? "f0" : "f1").get<std::string>());
    const auto& s_other = c ? res.outcome.s0 : res.outcome.s1;
    if (f_other && f_other->apply(guess) == *s_other) ++hash_hits;
  }
  report.input_guess = binomial_estimate(input_hits, usable_trials);
  report.hash_guess = binomial_estimate(hash_hits, usable_trials);
  report.expected_rate = usable_trials > 0 ? expected_sum / usable_trials : 0.0;
  return report;
}

// --- Receiver security ---------------------------------------------------------------

namespace {

// All probabilities in these enumerations are dyadic rationals with well
// under 40 fractional bits; snapping removes double-rounding dust so equal
// distributions compare exactly equal.
double snap(double p) { return std::round(p * 0x1p40) / 0x1p40; }

double tv_distance(const std::map<std::string, double>& p, const std::map<std::string, double>& q) {
  double tv = 0.0;
  for (const auto& [k, v] : p) {
    auto it = q.find(k);
    tv += std::abs(v - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : q)
    if (!p.count(k)) tv += v;
  return tv / 2.0;
}

json tv_to_json(const TvReport& r) {
  return {{"tv_bound", r.tv_bound}, {"per_round", r.per_round}};
}

}  // namespace

json TvReport::to_json() const { return tv_to_json(*this); }

TvReport receiver_security_tv_protocol1(const proto::ProtocolConfig& cfg,
                                        bell_ot::SenderPolicy& script) {
  TvReport report;
  Rng rng(cfg.seed);
  const auto x = script.bases(cfg.n, rng);
  for (int i = 0; i < cfg.n; ++i) {
    std::map<std::string, double> dist[2];
    for (int c = 0; c < 2; ++c) {
      const Basis y = qsim::basis_from_bit(c);
      for (int va = 0; va < 2; ++va)
        for (int vb = 0; vb < 2; ++vb) {
          auto probs = qsim::outcome_distribution(qsim::make_bell({va, vb}),
                                                  {x[static_cast<std::size_t>(i)], y});
          for (std::size_t s = 0; s < 4; ++s) {
            if (probs[s] <= 0.0) continue;
            const int a = static_cast<int>((s >> 1) & 1);
            // Sender sees its label share and its own outcome only.
            std::ostringstream key;
            key << va << ':' << a;
            dist[c][key.str()] += snap(0.25 * probs[s]);
          }
        }
      for (auto& [k, v] : dist[c]) v = snap(v);
    }
    report.per_round.push_back(tv_distance(dist[0], dist[1]));
    report.tv_bound += report.per_round.back();
  }
  return report;
}

TvReport receiver_security_tv_protocol4(const proto::ProtocolConfig& cfg,
                                        const std::vector<P4ScriptRound>& script,
                                        std::uint64_t key_seed) {
  TvReport report;
  const double q = cfg.override_prob;
  Rng key_rng(key_seed);
  for (std::size_t i = 0; i < script.size(); ++i) {
    const auto& sr = script[i];
    auto key_a = entcf::keygen(sr.theta_a, cfg.domain_bits, key_rng);
    auto key_b = entcf::keygen(sr.theta_b, cfg.domain_bits, key_rng);

    std::map<std::string, double> dist[2];
    const bool test_round =
        !(sr.ct == ChallengeType::B && sr.theta_a == Basis::Hadamard &&
          sr.theta_b == Basis::Hadamard && sr.tag_if_bell == proto::TestTag::Generate);

    for (int c = 0; c < 2; ++c) {
      auto add = [&dist, c](const std::string& key, double p) { dist[c][key] += snap(p); };
      if (sr.ct == ChallengeType::A) {
        // No receiver coin: never overridden, published when it is a test round.
        for (const auto& wr :
             selftest::enumerate_honest_round(key_a, key_b, ChallengeType::A, {}, {})) {
          std::ostringstream key;
          key << wr.data.c_a << ':' << *wr.data.z_a;
          if (test_round) key << ":pub:" << wr.data.c_b << ':' << *wr.data.z_b;
          add(key.str(), wr.probability);
        }
      } else {
        // Override branch: the device's B question is the choice basis and
        // nothing on the B side is ever published.
        const Basis y_override = qsim::basis_from_bit(c);
        if (q > 0.0)
          for (const auto& wr : selftest::enumerate_honest_round(key_a, key_b, ChallengeType::B,
                                                                 sr.x, y_override)) {
            std::ostringstream key;
            key << "ov:" << wr.data.c_a << ':' << *wr.data.d_a << ':' << *wr.data.h_a << ':'
                << *wr.data.a_bit;
            add(key.str(), q * wr.probability);
          }
        if (q < 1.0)
          for (const auto& wr : selftest::enumerate_honest_round(key_a, key_b, ChallengeType::B,
                                                                 sr.x, sr.y_sent)) {
            std::ostringstream key;
            key << "pl:" << wr.data.c_a << ':' << *wr.data.d_a << ':' << *wr.data.h_a << ':'
                << *wr.data.a_bit;
            if (test_round)
              key << ":pub:" << wr.data.c_b << ':' << *wr.data.d_b << ':'
                  << qsim::basis_bit(sr.y_sent) << ':' << *wr.data.b_bit << ':' << *wr.data.h_b;
            add(key.str(), (1.0 - q) * wr.probability);
          }
      }
      for (auto& [k, v] : dist[c]) v = snap(v);
    }
    report.per_round.push_back(tv_distance(dist[0], dist[1]));
    report.tv_bound += report.per_round.back();
  }
  return report;
}

// --- Exact sender-security micro-instances ---------------------------------------------

namespace {

// Receiver half of a labelled pair after the sender measured its half.
Eigen::Vector2cd receiver_half(qsim::BellLabel label, Basis x, int a) {
  auto proj = qsim::project_qubit(qsim::make_bell(label), 0, x, a);
  // Qubit 0 is collapsed, so the state factorizes; either slice of the first
  // tensor index carries the receiver qubit. Take the heavier one.
  const auto& amps = proj.post.amps();
  Eigen::Vector2cd top, bottom;
  top << amps[0], amps[1];
  bottom << amps[2], amps[3];
  Eigen::Vector2cd v = top.norm() >= bottom.norm() ? top : bottom;
  v.normalize();
  return v;
}

}  // namespace

double exact_sender_security_micro(int n_prime, int capacity) {
  if (n_prime < 1 || n_prime > 4)
    throw std::invalid_argument("exact_sender_security_micro: n_prime limited to 4");
  if (capacity < 0 || capacity > n_prime)
    throw std::invalid_argument("exact_sender_security_micro: capacity out of range");
  const int n = n_prime;
  const int measured = n - capacity;  // indices [capacity, n) measured in the choice basis
  const std::size_t edim = std::size_t{1} << capacity;

  // Accumulate sub-normalized stored-qubit states per classical block
  // (c, x, f0, f1, s_c, v_beta, r), split by the value of s_{1-c}.
  std::map<std::string, std::array<Eigen::MatrixXcd, 2>> blocks;

  const double p_vx = std::exp2(-2.0 * n) * std::exp2(-n);  // labels and sender bases
  for (int c = 0; c < 2; ++c) {
    const Basis y = qsim::basis_from_bit(c);
    for (std::uint32_t vcode = 0; vcode < (1u << (2 * n)); ++vcode) {
      std::vector<qsim::BellLabel> labels;
      for (int i = 0; i < n; ++i)
        labels.push_back({static_cast<int>((vcode >> (2 * i)) & 1),
                          static_cast<int>((vcode >> (2 * i + 1)) & 1)});
      for (std::uint32_t xcode = 0; xcode < (1u << n); ++xcode) {
        std::vector<Basis> xs;
        for (int i = 0; i < n; ++i) xs.push_back(qsim::basis_from_bit((xcode >> i) & 1));
        for (std::uint32_t acode = 0; acode < (1u << n); ++acode) {
          // Sender outcomes are unbiased regardless of the label.
          const double p_a = std::exp2(-n);
          std::vector<Eigen::Vector2cd> halves;
          for (int i = 0; i < n; ++i)
            halves.push_back(receiver_half(labels[static_cast<std::size_t>(i)],
                                           xs[static_cast<std::size_t>(i)], (acode >> i) & 1));
          // Receiver measurement outcomes on the non-stored qubits.
          for (std::uint32_t rcode = 0; rcode < (1u << measured); ++rcode) {
            double p_r = 1.0;
            for (int j = 0; j < measured; ++j) {
              const auto& h = halves[static_cast<std::size_t>(capacity + j)];
              const int out = (rcode >> j) & 1;
              qsim::StateVector sv(1, {h(0), h(1)});
              p_r *= qsim::project_qubit(sv, 0, y, out).probability;
            }
            if (p_r <= 0.0) continue;
            // Stored-qubit joint pure state.
            Eigen::VectorXcd stored = Eigen::VectorXcd::Ones(1);
            for (int j = 0; j < capacity; ++j) {
              Eigen::VectorXcd next(stored.size() * 2);
              for (Eigen::Index k = 0; k < stored.size(); ++k) {
                next(2 * k) = stored(k) * halves[static_cast<std::size_t>(j)](0);
                next(2 * k + 1) = stored(k) * halves[static_cast<std::size_t>(j)](1);
              }
              stored = std::move(next);
            }

            for (std::uint32_t f0 = 0; f0 < (1u << n); ++f0) {
              for (std::uint32_t f1 = 0; f1 < (1u << n); ++f1) {
                const double p = 0.5 * p_vx * p_a * p_r * std::exp2(-2.0 * n);
                // Corrected string and the two outputs (l = 1 linear hashes).
                int s[2] = {0, 0};
                for (int i = 0; i < n; ++i) {
                  const Basis xi = xs[static_cast<std::size_t>(i)];
                  const int a_i = (acode >> i) & 1;
                  const int k_i =
                      a_i ^ bell_ot::sender_correction(xi, labels[static_cast<std::size_t>(i)].v_alpha);
                  // Partitioned input bit i feeds f_r if x_i matches r.
                  const int part = xi == Basis::Hadamard ? 1 : 0;
                  const std::uint32_t fbits = part ? f1 : f0;
                  // Position within the partition: count earlier same-basis rounds.
                  int pos = 0;
                  for (int jj = 0; jj < i; ++jj)
                    if ((xs[static_cast<std::size_t>(jj)] == Basis::Hadamard ? 1 : 0) == part) ++pos;
                  s[part] ^= k_i & static_cast<int>((fbits >> pos) & 1);
                }
                std::ostringstream key;
                key << c << ':' << xcode << ':' << f0 << ':' << f1 << ':' << s[c] << ':';
                for (int i = 0; i < n; ++i) key << labels[static_cast<std::size_t>(i)].v_beta;
                key << ':' << rcode;
                auto& pair = blocks[key.str()];
                if (pair[0].size() == 0) {
                  pair[0] = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(edim),
                                                   static_cast<Eigen::Index>(edim));
                  pair[1] = pair[0];
                }
                pair[static_cast<std::size_t>(s[1 - c])] += p * (stored * stored.adjoint());
              }
            }
          }
        }
      }
    }
  }

  double distance = 0.0;
  for (const auto& [key, pair] : blocks) {
    Eigen::MatrixXcd diff = pair[0] - pair[1];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff, Eigen::EigenvaluesOnly);
    distance += 0.5 * es.eigenvalues().cwiseAbs().sum();
  }
  return distance;
}

}  // namespace diot::adversary
