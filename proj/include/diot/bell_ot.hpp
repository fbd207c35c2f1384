#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "diot/hashing.hpp"
#include "diot/protocol.hpp"
#include "diot/qsim.hpp"
#include "diot/rng.hpp"
#include "diot/transcript.hpp"

namespace diot::bell_ot {

// Where the dealt Bell labels come from. Honest devices sample uniformly.
using LabelPolicy = std::function<qsim::BellLabel(int round, Rng& rng)>;
LabelPolicy uniform_labels();
LabelPolicy fixed_labels(qsim::BellLabel label);

// Sender policy: basis string plus the two hash functions. The honest sender
// draws both uniformly.
class SenderPolicy {
 public:
  virtual ~SenderPolicy() = default;
  virtual std::vector<qsim::Basis> bases(int n, Rng& rng);
  virtual std::pair<hashing::HashFunction, hashing::HashFunction> hashes(int n, int l, Rng& rng);
};

// Deterministic sender script for the receiver-security experiments.
class ScriptedSender : public SenderPolicy {
 public:
  ScriptedSender(std::vector<qsim::Basis> bases, hashing::HashFunction f0, hashing::HashFunction f1);
  std::vector<qsim::Basis> bases(int n, Rng& rng) override;
  std::pair<hashing::HashFunction, hashing::HashFunction> hashes(int n, int l, Rng& rng) override;

 private:
  std::vector<qsim::Basis> bases_;
  hashing::HashFunction f0_, f1_;
};

// The receiver's view of the run. Qubits are measured through this handle;
// unmeasured qubits count against the storage bound when the bases are
// announced (the no-storage checkpoint).
class ReceiverContext {
 public:
  ReceiverContext(int n, int choice_bit, const BitString& v_beta,
                  std::vector<qsim::StateVector>* states, Rng* rng);

  int n() const { return n_; }
  int choice_bit() const { return choice_bit_; }
  const BitString& v_beta() const { return v_beta_; }

  // Measures the receiver half (qubit 1) of round i. A qubit can be measured
  // once; repeated calls throw.
  int measure(int round, qsim::Basis basis);
  bool measured(int round) const { return measured_[static_cast<std::size_t>(round)]; }
  int unmeasured_count() const;

 private:
  int n_;
  int choice_bit_;
  BitString v_beta_;
  std::vector<qsim::StateVector>* states_;
  std::vector<bool> measured_;
  Rng* rng_;
};

class ReceiverStrategy {
 public:
  virtual ~ReceiverStrategy() = default;
  // Step-2 time: measure or store.
  virtual void quantum_phase(ReceiverContext& ctx, Rng& rng) = 0;
  // After the bases and hash functions are announced; returns the claimed
  // output string.
  virtual BitString finish(ReceiverContext& ctx, const std::vector<qsim::Basis>& x,
                           const hashing::HashFunction& f0, const hashing::HashFunction& f1,
                           Rng& rng) = 0;
  // Values the receiver stores for the transcript's private section.
  virtual proto::json private_record() const { return proto::json::object(); }
};

// Protocol-following receiver: measures everything in the choice basis.
class HonestReceiver : public ReceiverStrategy {
 public:
  void quantum_phase(ReceiverContext& ctx, Rng& rng) override;
  BitString finish(ReceiverContext& ctx, const std::vector<qsim::Basis>& x,
                   const hashing::HashFunction& f0, const hashing::HashFunction& f1,
                   Rng& rng) override;
  proto::json private_record() const override;

 private:
  BitString outcomes_;
};

struct RunResult {
  proto::OtOutcome outcome;
  proto::Transcript transcript;
};

// Executes the five protocol steps with exact per-round simulation. The
// receiver's unmeasured-qubit count is checked against `storage_capacity`
// right before the bases are announced; exceeding it throws. Never aborts.
RunResult run_protocol1(const proto::ProtocolConfig& cfg, SenderPolicy& sender,
                        ReceiverStrategy& receiver, const LabelPolicy& labels, Rng& rng,
                        std::optional<int> storage_capacity = std::nullopt);

// Sender-side correction bit: v_alpha on Hadamard questions, 0 otherwise.
int sender_correction(qsim::Basis x, int v_alpha);
// Receiver-side correction bit: v_beta on Computational questions, 0 otherwise.
int receiver_correction(qsim::Basis y, int v_beta);

}  // namespace diot::bell_ot
