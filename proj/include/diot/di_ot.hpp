#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "diot/protocol.hpp"
#include "diot/selftest.hpp"
#include "diot/transcript.hpp"

namespace diot::di_ot {

// Verifier-side (sender) decisions for the composed protocol. The honest
// policy draws everything uniformly; deterministic scripts override the
// draws for the receiver-security experiments.
class SenderPolicy {
 public:
  virtual ~SenderPolicy() = default;
  virtual std::pair<qsim::Basis, qsim::Basis> state_bases(int round, Rng& rng);
  virtual proto::ChallengeType challenge_type(int round, Rng& rng);
  virtual std::pair<qsim::Basis, qsim::Basis> questions(int round, Rng& rng);  // (x, y sent)
  virtual proto::TestTag test_tag(int round, proto::RoundType rt, Rng& rng);
  virtual std::pair<hashing::HashFunction, hashing::HashFunction> hashes(int n, int l, Rng& rng);
};

// Fixed per-round choices; anything left unset falls back to the honest draw.
struct SenderScript {
  std::optional<std::pair<qsim::Basis, qsim::Basis>> fixed_state_bases;
  std::optional<proto::ChallengeType> fixed_challenge_type;
  std::optional<std::pair<qsim::Basis, qsim::Basis>> fixed_questions;
  std::optional<proto::TestTag> fixed_bell_tag;  // tag for Bell rounds
};

class ScriptedSenderPolicy : public SenderPolicy {
 public:
  explicit ScriptedSenderPolicy(SenderScript script) : script_(script) {}
  std::pair<qsim::Basis, qsim::Basis> state_bases(int round, Rng& rng) override;
  proto::ChallengeType challenge_type(int round, Rng& rng) override;
  std::pair<qsim::Basis, qsim::Basis> questions(int round, Rng& rng) override;
  proto::TestTag test_tag(int round, proto::RoundType rt, Rng& rng) override;

 private:
  SenderScript script_;
};

// Receiver-side decision: whether to replace the supplied question with the
// choice basis on a type-b round.
class ReceiverPolicy {
 public:
  virtual ~ReceiverPolicy() = default;
  virtual bool override_basis(int round, double override_prob, Rng& rng);
};

struct RunResult {
  proto::OtOutcome outcome;
  proto::Transcript transcript;
  std::vector<proto::RoundRecord> rounds;
  double failed_fraction = 0.0;  // among published test rounds
  int published_tests = 0;
};

enum class Side { Sender, Receiver };

// Correction bit for one usable round: the hardcore bit of the side's
// commitment when the measurement basis calls for it, zero otherwise
// (sender corrects Hadamard questions, receiver computational ones).
int compute_correction(const proto::RoundRecord& rec, Side side);

// All nine steps: n self-test rounds with the receiver's basis override,
// round classification, test/generate assignment, publication and checking,
// the abort decision against cfg.threshold (strictly-greater comparison),
// trapdoor release for the usable rounds, corrections, and hashing.
RunResult run_protocol4(const proto::ProtocolConfig& cfg, SenderPolicy& sender,
                        ReceiverPolicy& receiver, selftest::DeviceStrategy& device, Rng& rng,
                        int choice_bit);

// Convenience: honest everything, choice bit drawn from the rng.
RunResult run_protocol4_honest(const proto::ProtocolConfig& cfg, Rng& rng);

}  // namespace diot::di_ot
