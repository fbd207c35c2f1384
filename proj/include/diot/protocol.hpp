#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "diot/bits.hpp"
#include "diot/entcf.hpp"
#include "diot/hashing.hpp"
#include "diot/qsim.hpp"

namespace diot::proto {

enum class ChallengeType : std::uint8_t { A = 0, B = 1 };
enum class RoundType : std::uint8_t { Bell = 0, Product = 1 };
enum class TestTag : std::uint8_t { Test = 0, Generate = 1 };
enum class Verdict : std::uint8_t { Pass = 0, Fail = 1 };

// All scalar protocol parameters. Every field is echoed into reports and
// transcripts; nothing is left implicit.
struct ProtocolConfig {
  int n = 64;                  // protocol rounds
  int l = 4;                   // output string bits
  double gamma = 0.0;          // storage fraction
  double lambda = 0.01;        // parameter-relation reals
  double lambda_prime = 0.01;
  double kappa = 0.01;
  double tau = 0.05;           // estimation slack
  int n_estimation = 2000;     // rounds used to estimate the failure rate
  int domain_bits = 4;         // m, the function-pair domain size
  double r = 1.0;              // diagnostic exponent for the (delta'-tau)^r report
  double threshold = 0.05;     // abort threshold delta' - tau
  double override_prob = 0.5;  // receiver's own-basis probability on type-b rounds
  std::uint64_t seed = 1;
  bool enforce_relations = false;
};

struct RelationCheck {
  bool storage_relation_ok = false;    // gamma*n <= n/4 - 2l - k*n for some k > 0
  double storage_slack = 0.0;          // n/4 - 2l - gamma*n
  bool parameter_relation_ok = false;  // (1/4 - lambda - 2lambda' - kappa)n - 2l - 1 >= gamma*n
  double parameter_slack = 0.0;
  std::string violated;  // first violated relation, spelled out; empty if none
};

// Evaluates the storage and parameter relations for a given round count
// (n for the direct protocol, |I-tilde| for the composed one).
RelationCheck check_parameter_relations(const ProtocolConfig& cfg, int rounds);

// One self-test round's full record. Challenge types are stored per side;
// the single-verifier protocols always have ct_a == ct_b.
struct RoundRecord {
  int index = 0;
  qsim::Basis theta_a = qsim::Basis::Computational;
  qsim::Basis theta_b = qsim::Basis::Computational;
  entcf::KeyPair key_a, key_b;
  std::uint32_t c_a = 0, c_b = 0;
  ChallengeType ct_a = ChallengeType::A;
  ChallengeType ct_b = ChallengeType::A;
  std::optional<std::uint32_t> z_a, z_b;  // (m+1)-bit preimage responses
  std::optional<std::uint32_t> d_a, d_b;  // m-bit phase strings
  std::optional<qsim::Basis> x, y;        // questions actually given to the device
  std::optional<qsim::Basis> y_sent;      // verifier-supplied y (composed protocol)
  std::optional<int> a_bit, b_bit, h_a, h_b;
  RoundType rt = RoundType::Product;
  TestTag t = TestTag::Test;
  bool in_override_set = false;  // receiver used its own basis
  std::optional<Verdict> w;

  ChallengeType ct() const;  // requires ct_a == ct_b
};

// Round type: Bell exactly when ct = b and both state bases are Hadamard.
RoundType classify_round(const RoundRecord& record);

struct OtOutcome {
  bool aborted = false;  // aborted <=> Z = 0
  std::optional<BitString> s0, s1;
  std::optional<BitString> receiver_output;
  int choice_bit = 0;
  std::vector<int> set_i;         // receiver's own-basis rounds
  std::vector<int> set_i_tilde;   // usable generation rounds
  std::vector<int> set_i_tilde_0; // split by the sender's question basis
  std::vector<int> set_i_tilde_1;
};

}  // namespace diot::proto
