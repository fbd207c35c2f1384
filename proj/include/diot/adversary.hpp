#pragma once

#include <optional>
#include <string>
#include <vector>

#include "diot/bell_ot.hpp"
#include "diot/di_ot.hpp"
#include "diot/protocol.hpp"
#include "diot/selftest.hpp"
#include "diot/transcript.hpp"

namespace diot::adversary {

// Point estimate with a normal-approximation binomial confidence interval.
// No experiment reports a bare success rate.
struct Estimate {
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int successes = 0;
  int trials = 0;
};

Estimate binomial_estimate(int successes, int trials, double z = 3.0);

// --- Storage attacks on the direct protocol ----------------------------------

// Stores every qubit until the bases are announced, then measures in the
// announced bases and applies both corrections.
class UnboundedReceiver : public bell_ot::ReceiverStrategy {
 public:
  void quantum_phase(bell_ot::ReceiverContext&, Rng&) override {}
  BitString finish(bell_ot::ReceiverContext& ctx, const std::vector<qsim::Basis>& x,
                   const hashing::HashFunction& f0, const hashing::HashFunction& f1,
                   Rng& rng) override;

  const std::optional<BitString>& guessed_s0() const { return s0_; }
  const std::optional<BitString>& guessed_s1() const { return s1_; }

 private:
  std::optional<BitString> s0_, s1_;
};

enum class MeasurePolicy { RandomBases, Computational };

// Measures all but `capacity` qubits before the announce checkpoint (the
// policy picks the bases), keeps the rest, and completes the attack with the
// announced information. The effective choice bit C' plays the role of the
// extracted choice variable in the sender-security definition: the
// all-computational policy commits to learning string 0, so its C' is 0 and
// the string under test is s_1; the random-bases policy expresses no
// preference and is scored against the honest choice bit.
class BoundedReceiver : public bell_ot::ReceiverStrategy {
 public:
  BoundedReceiver(int capacity, MeasurePolicy policy);
  int effective_choice_bit(int honest_choice) const;
  void quantum_phase(bell_ot::ReceiverContext& ctx, Rng& rng) override;
  BitString finish(bell_ot::ReceiverContext& ctx, const std::vector<qsim::Basis>& x,
                   const hashing::HashFunction& f0, const hashing::HashFunction& f1,
                   Rng& rng) override;

  const std::optional<BitString>& guessed_s0() const { return s0_; }
  const std::optional<BitString>& guessed_s1() const { return s1_; }

 private:
  int capacity_;
  MeasurePolicy policy_;
  std::vector<qsim::Basis> guessed_bases_;
  std::vector<int> outcomes_;
  std::vector<bool> stored_;
  std::optional<BitString> s0_, s1_;
};

struct StorageAttackReport {
  proto::json config_echo;
  proto::RelationCheck relations;
  Estimate both_strings;       // unbounded attack: both s0 and s1 recovered
  Estimate other_string;       // bounded attack: s_{1-C'} guessed correctly
  std::uint64_t seed = 0;
  proto::json to_json() const;
};

StorageAttackReport unbounded_receiver_attack(const proto::ProtocolConfig& cfg, int trials,
                                              std::uint64_t seed);
StorageAttackReport bounded_receiver_attack(const proto::ProtocolConfig& cfg, int capacity,
                                            MeasurePolicy policy, int trials, std::uint64_t seed);

// --- Classical devices ---------------------------------------------------------

enum class ClassicalKind { RandomAnswers, ImageHonestBellRandom, BestKnown };

// Entanglement-free device strategies. All three pick classical preimages at
// prepare time; they differ in how honestly they answer afterwards.
std::unique_ptr<selftest::DeviceStrategy> classical_device_strategy(ClassicalKind kind);

struct ClassicalDeviceReport {
  Estimate bell_matched_failure;  // failure rate on Bell rounds with x == y
  Estimate type_a_pass;           // pass rate on type-a rounds
  Estimate overall_failure;       // failure rate across uniformly drawn rounds
  int checked_bell_rounds = 0;
  proto::json to_json() const;
};

ClassicalDeviceReport measure_classical_device(ClassicalKind kind,
                                               const proto::ProtocolConfig& cfg,
                                               int target_checked_bell_rounds,
                                               std::uint64_t seed);

struct AbortReport {
  Estimate abort_rate;
  proto::RelationCheck relations;
  proto::json to_json() const;
};

AbortReport protocol4_abort_rate(ClassicalKind kind, const proto::ProtocolConfig& cfg, int trials,
                                 std::uint64_t seed);

// --- Composed-protocol correction guessing -------------------------------------

struct CorrectionGuessReport {
  Estimate input_guess;      // exact guess of the missing corrected string
  double expected_rate = 0;  // mean over runs of 2^{-|I-tilde_{1-c}|}
  Estimate hash_guess;       // guessed string hashing to s_{1-c}
  proto::json to_json() const;
};

// Honest-but-curious receiver completing the protocol, then guessing the
// corrected bits of the unchosen partition uniformly.
CorrectionGuessReport protocol4_correction_guess(const proto::ProtocolConfig& cfg, int trials,
                                                 std::uint64_t seed);

// --- Receiver security: exact transcript distributions -------------------------

// Total-variation distance between the sender-visible transcript
// distributions under choice bit 0 and 1, computed by exact enumeration of
// the receiver's coin and the device's quantum branches, round by round.
// Zero means the distributions coincide exactly.
struct TvReport {
  double tv_bound = 0.0;                 // sum of per-round distances
  std::vector<double> per_round;
  proto::json to_json() const;
};

TvReport receiver_security_tv_protocol1(const proto::ProtocolConfig& cfg,
                                        bell_ot::SenderPolicy& script);

struct P4ScriptRound {
  qsim::Basis theta_a, theta_b;
  proto::ChallengeType ct;
  qsim::Basis x, y_sent;
  proto::TestTag tag_if_bell;
};

TvReport receiver_security_tv_protocol4(const proto::ProtocolConfig& cfg,
                                        const std::vector<P4ScriptRound>& script,
                                        std::uint64_t key_seed);

// --- Exact sender-security micro-instances --------------------------------------

// Exact evaluation of the sender-security trace distance for the direct
// protocol at desk scale (n_prime <= 4, l = 1): the bounded receiver stores
// `capacity` qubits and measures the rest in its choice basis; the extracted
// choice variable is the receiver's own choice bit.
double exact_sender_security_micro(int n_prime, int capacity);

}  // namespace diot::adversary
