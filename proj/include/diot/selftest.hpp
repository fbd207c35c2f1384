#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "diot/entcf.hpp"
#include "diot/protocol.hpp"
#include "diot/qsim.hpp"
#include "diot/rng.hpp"

namespace diot::selftest {

enum class Component : int { A = 0, B = 1 };

struct Answer {
  int bit = 0;
  int h = 0;
};

// A device under test: two components that each receive a key, commit,
// and respond to one challenge. The runner learns each component's challenge
// type from which response method it invokes, exactly as a physical device
// would learn it from the message it receives. Classical cross-component
// traffic must go through leak(), which the runner logs.
class DeviceStrategy {
 public:
  virtual ~DeviceStrategy() = default;

  virtual void begin_round(const entcf::EvalOracle& key_a, const entcf::EvalOracle& key_b,
                           Rng& rng) = 0;
  virtual std::uint32_t commitment(Component comp) = 0;
  // Challenge type a: measure everything, return the (m+1)-bit string.
  virtual std::uint32_t preimage_response(Component comp) = 0;
  // Challenge type b, first phase: return the m-bit phase string.
  virtual std::uint32_t phase_response(Component comp) = 0;
  // Challenge type b, final phase: answer the basis question.
  virtual Answer answer(Component comp, qsim::Basis question) = 0;

  const std::vector<std::string>& leakage_log() const { return leakage_; }
  void clear_leakage() { leakage_.clear(); }

 protected:
  void leak(Component from, const std::string& what) {
    leakage_.push_back((from == Component::A ? std::string("a:") : std::string("b:")) + what);
  }
  std::vector<std::string> leakage_;
};

// The honest quantum device: prepares the claw superpositions, answers type-a
// challenges by computational measurement, and on type-b rounds runs the
// entangling circuit on the retained qubits (single-sided when only one
// component is in a type-b round).
class HonestDevice : public DeviceStrategy {
 public:
  void begin_round(const entcf::EvalOracle& key_a, const entcf::EvalOracle& key_b,
                   Rng& rng) override;
  std::uint32_t commitment(Component comp) override;
  std::uint32_t preimage_response(Component comp) override;
  std::uint32_t phase_response(Component comp) override;
  Answer answer(Component comp, qsim::Basis question) override;

 private:
  Rng rng_{0};
  entcf::PrepareResult prep_[2];
  qsim::StateVector retained_[2];
  bool has_retained_[2] = {false, false};
  // Joint two-qubit state after the circuit, when both components retained.
  qsim::StateVector joint_;
  bool joint_ready_ = false;
  bool joint_measured_[2] = {false, false};
  int h_[2] = {0, 0};
};

// --- Winning condition -------------------------------------------------------

// The per-round pass/fail check, using the verifier's trapdoors carried in
// the record's key pairs. Type a: image checks on both available sides.
// Type b Bell rounds: the parity checks on matched questions, automatic pass
// otherwise. Type b Product rounds: the honest post-circuit state is
// reconstructed and only deterministic coordinates are compared.
proto::Verdict winning_check(const proto::RoundRecord& record);

// --- Round execution ---------------------------------------------------------

enum class VerifierMode { TwoVerifier, SingleVerifier };

struct RoundInputs {
  // Optional overrides for the composed protocol; sampled uniformly when
  // absent.
  std::optional<qsim::Basis> force_y_used;
};

proto::RoundRecord run_selftest_round(VerifierMode mode, const proto::ProtocolConfig& cfg,
                                      DeviceStrategy& device, Rng& rng);

// --- Failure-rate estimation --------------------------------------------------

struct DeltaEstimate {
  double delta_prime = 0.0;
  double confidence = 0.0;  // 1 - 2 exp(-tau^2 N / 3)
  int failures = 0;
  int rounds = 0;
};

// Round verdict source: true means the round failed. The protocol-backed
// source runs single-verifier rounds against a device; synthetic sources
// draw Bernoulli failures directly.
using RoundFailureSource = std::function<bool(int round_index, Rng& rng)>;

DeltaEstimate estimate_delta(const RoundFailureSource& source, int n_estimation, double tau,
                             Rng& rng);

RoundFailureSource device_failure_source(const proto::ProtocolConfig& cfg, DeviceStrategy& device);
RoundFailureSource bernoulli_failure_source(double failure_rate);

// --- Exact per-round enumeration ----------------------------------------------

// Weighted enumeration of everything an honest device can emit in one round,
// given fixed keys, challenge type, and questions. Exact probabilities; used
// by the receiver-security experiments. Fields mirror RoundRecord.
struct RoundData {
  std::uint32_t c_a = 0, c_b = 0;
  std::optional<std::uint32_t> z_a, z_b;
  std::optional<std::uint32_t> d_a, d_b;
  std::optional<int> a_bit, b_bit, h_a, h_b;
};

struct WeightedRound {
  RoundData data;
  double probability = 1.0;
};

std::vector<WeightedRound> enumerate_honest_round(const entcf::KeyPair& key_a,
                                                  const entcf::KeyPair& key_b,
                                                  proto::ChallengeType ct,
                                                  std::optional<qsim::Basis> x,
                                                  std::optional<qsim::Basis> y);

}  // namespace diot::selftest
