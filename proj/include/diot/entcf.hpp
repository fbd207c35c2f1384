#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "diot/qsim.hpp"
#include "diot/rng.hpp"

namespace diot::entcf {

enum class Family : std::uint8_t { ClawFree = 0, Injective = 1 };

// State-basis rule: Hadamard state basis draws a claw-free key, Computational
// an injective one.
Family family_for_basis(qsim::Basis theta);

// Evaluation-only view handed to device strategies. Carries the key handle,
// the domain size, and the forward tables; never the family tag or the
// inversion data.
class EvalOracle {
 public:
  EvalOracle() = default;
  EvalOracle(std::uint64_t key_id, int domain_bits, std::shared_ptr<const std::vector<std::uint32_t>> f0,
             std::shared_ptr<const std::vector<std::uint32_t>> f1);

  std::uint64_t key_id() const { return key_id_; }
  int domain_bits() const { return m_; }
  int codomain_bits() const { return m_ + 2; }

  // y = f_{k,b}(x) for b in {0,1}, x an m-bit value.
  std::uint32_t eval(int b, std::uint32_t x) const;

 private:
  std::uint64_t key_id_ = 0;
  int m_ = 0;
  std::shared_ptr<const std::vector<std::uint32_t>> f0_, f1_;
};

// Full key material, held by whoever ran keygen. The function pair maps m-bit
// strings into a common (m+2)-bit codomain for both families, so nothing
// about the family is visible from string lengths:
//   claw-free:  f_b(x) = P(sigma_b(x)) with sigma_0 = id and sigma_1 a secret
//               derangement; bijections onto a shared image, claws never
//               satisfy x0 == x1.
//   injective:  f_b(x) = P(b * 2^m + x); disjoint images.
// P is a secret permutation of the codomain; the trapdoor is the seed that
// regenerates P (and sigma).
class KeyPair {
 public:
  static constexpr int kMinDomainBits = 2;
  static constexpr int kMaxDomainBits = 10;

  std::uint64_t key_id() const { return key_id_; }
  int domain_bits() const { return m_; }
  int codomain_bits() const { return m_ + 2; }
  Family family() const { return family_; }

  EvalOracle oracle() const;

  std::uint32_t eval(int b, std::uint32_t x) const;

  // Trapdoor inversions. Throw std::invalid_argument on family mismatch and
  // std::domain_error when y lies outside the relevant image.
  std::pair<std::uint32_t, std::uint32_t> invert_claw(std::uint32_t y) const;
  std::pair<int, std::uint32_t> invert_injective(std::uint32_t y) const;

  // d . (x0 ^ x1) for the claw of y.
  int hardcore_bit(std::uint32_t y, std::uint32_t d) const;

  // Versioned binary blob: magic "ETK1", version, m, family, key id, seed.
  std::vector<std::uint8_t> serialize() const;
  static KeyPair deserialize(const std::vector<std::uint8_t>& blob);

  // Default-constructed pairs are empty placeholders; every accessor that
  // needs key material throws until a real pair is assigned.
  KeyPair() = default;

  friend KeyPair keygen(qsim::Basis theta, int domain_bits, Rng& rng);

 private:
  void build_tables();

  std::uint64_t key_id_ = 0;
  int m_ = 0;
  Family family_ = Family::ClawFree;
  std::uint64_t seed_ = 0;
  std::shared_ptr<const std::vector<std::uint32_t>> f0_, f1_;
  std::vector<std::uint32_t> p_inverse_;   // codomain permutation inverse
  std::vector<std::uint32_t> sigma_inv_;   // claw-free only
};

KeyPair keygen(qsim::Basis theta, int domain_bits, Rng& rng);

// --- Honest device state preparation ----------------------------------------

struct PrepareResult {
  std::uint32_t commitment = 0;   // c, an (m+2)-bit image value
  qsim::StateVector residual;     // m+1 qubits: |b>|x> register
};

// Samples the image-register measurement of the honest superposition
// sum_{b,x} |b>|x>|f_b(x)> and returns the collapsed preimage register:
// the equal claw superposition for claw-free keys, a computational basis
// state for injective ones. Needs only the public oracle.
PrepareResult honest_device_prepare(const EvalOracle& oracle, Rng& rng);

enum class ChallengeType : std::uint8_t { A = 0, B = 1 };

struct ChallengeAResult {
  std::uint32_t z = 0;  // (m+1)-bit value, first bit then the m-bit remainder
};

struct ChallengeBResult {
  std::uint32_t d = 0;          // m-bit Hadamard outcomes on the x register
  qsim::StateVector retained;   // the single kept qubit
};

ChallengeAResult honest_challenge_a(const qsim::StateVector& residual, Rng& rng);
ChallengeBResult honest_challenge_b(const qsim::StateVector& residual, Rng& rng);

}  // namespace diot::entcf
