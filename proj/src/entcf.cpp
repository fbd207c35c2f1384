#include "diot/entcf.hpp"

#include <stdexcept>

namespace diot::entcf {

namespace {

std::vector<std::uint32_t> random_permutation(std::size_t size, Rng& rng) {
  std::vector<std::uint32_t> p(size);
  for (std::size_t i = 0; i < size; ++i) p[i] = static_cast<std::uint32_t>(i);
  for (std::size_t i = size; i > 1; --i) {
    const std::size_t j = rng.index(static_cast<std::uint32_t>(i));
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

// Fixed-point-free permutation, by rejection; the acceptance rate tends to
// 1/e so this terminates quickly at desk scale.
std::vector<std::uint32_t> random_derangement(std::size_t size, Rng& rng) {
  while (true) {
    auto p = random_permutation(size, rng);
    bool ok = true;
    for (std::size_t i = 0; i < size && ok; ++i) ok = p[i] != i;
    if (ok) return p;
  }
}

}  // namespace

Family family_for_basis(qsim::Basis theta) {
  return theta == qsim::Basis::Hadamard ? Family::ClawFree : Family::Injective;
}

EvalOracle::EvalOracle(std::uint64_t key_id, int domain_bits,
                       std::shared_ptr<const std::vector<std::uint32_t>> f0,
                       std::shared_ptr<const std::vector<std::uint32_t>> f1)
    : key_id_(key_id), m_(domain_bits), f0_(std::move(f0)), f1_(std::move(f1)) {}

std::uint32_t EvalOracle::eval(int b, std::uint32_t x) const {
  if (!f0_) throw std::logic_error("EvalOracle: empty oracle");
  if (x >= (1u << m_)) throw std::invalid_argument("EvalOracle::eval: x outside the domain");
  const auto& table = b ? *f1_ : *f0_;
  return table[x];
}

void KeyPair::build_tables() {
  const std::size_t domain = std::size_t{1} << m_;
  const std::size_t codomain = domain << 2;
  Rng perm_rng = Rng(seed_).split(0xace5);
  auto p = random_permutation(codomain, perm_rng);

  auto f0 = std::make_shared<std::vector<std::uint32_t>>(domain);
  auto f1 = std::make_shared<std::vector<std::uint32_t>>(domain);
  if (family_ == Family::ClawFree) {
    Rng der_rng = Rng(seed_).split(0xdea1);
    auto sigma = random_derangement(domain, der_rng);
    sigma_inv_.assign(domain, 0);
    for (std::size_t x = 0; x < domain; ++x) {
      (*f0)[x] = p[x];
      (*f1)[x] = p[sigma[x]];
      sigma_inv_[sigma[x]] = static_cast<std::uint32_t>(x);
    }
  } else {
    for (std::size_t x = 0; x < domain; ++x) {
      (*f0)[x] = p[x];
      (*f1)[x] = p[domain + x];
    }
  }
  p_inverse_.assign(codomain, 0);
  for (std::size_t j = 0; j < codomain; ++j) p_inverse_[p[j]] = static_cast<std::uint32_t>(j);
  f0_ = std::move(f0);
  f1_ = std::move(f1);
}

KeyPair keygen(qsim::Basis theta, int domain_bits, Rng& rng) {
  if (domain_bits < KeyPair::kMinDomainBits || domain_bits > KeyPair::kMaxDomainBits)
    throw std::invalid_argument("keygen: domain_bits out of range");
  KeyPair kp;
  // The public identifier and the secret seed are independent draws, so the
  // identifier reveals nothing about the trapdoor.
  kp.key_id_ = rng.next_u64();
  kp.m_ = domain_bits;
  kp.family_ = family_for_basis(theta);
  kp.seed_ = rng.next_u64();
  kp.build_tables();
  return kp;
}

EvalOracle KeyPair::oracle() const { return EvalOracle(key_id_, m_, f0_, f1_); }

std::uint32_t KeyPair::eval(int b, std::uint32_t x) const {
  return oracle().eval(b, x);
}

std::pair<std::uint32_t, std::uint32_t> KeyPair::invert_claw(std::uint32_t y) const {
  if (p_inverse_.empty()) throw std::logic_error("KeyPair: empty key");
  if (family_ != Family::ClawFree)
    throw std::invalid_argument("invert_claw: key is not claw-free");
  const std::uint32_t domain = 1u << m_;
  if (y >= (domain << 2)) throw std::domain_error("invert_claw: y outside the codomain");
  const std::uint32_t j = p_inverse_[y];
  if (j >= domain) throw std::domain_error("invert_claw: y not in the image");
  return {j, sigma_inv_[j]};  // f0(j) = y, f1(sigma_inv(j)) = y
}

std::pair<int, std::uint32_t> KeyPair::invert_injective(std::uint32_t y) const {
  if (p_inverse_.empty()) throw std::logic_error("KeyPair: empty key");
  if (family_ != Family::Injective)
    throw std::invalid_argument("invert_injective: key is not injective");
  const std::uint32_t domain = 1u << m_;
  if (y >= (domain << 2)) throw std::domain_error("invert_injective: y outside the codomain");
  const std::uint32_t j = p_inverse_[y];
  if (j >= 2 * domain) throw std::domain_error("invert_injective: y not in either image");
  return {j >= domain ? 1 : 0, j & (domain - 1)};
}

int KeyPair::hardcore_bit(std::uint32_t y, std::uint32_t d) const {
  auto [x0, x1] = invert_claw(y);
  return bits::dot(d, x0 ^ x1);
}

std::vector<std::uint8_t> KeyPair::serialize() const {
  std::vector<std::uint8_t> blob = {'E', 'T', 'K', '1'};
  blob.push_back(1);  // version
  blob.push_back(static_cast<std::uint8_t>(m_));
  blob.push_back(static_cast<std::uint8_t>(family_));
  for (int i = 0; i < 8; ++i) blob.push_back(static_cast<std::uint8_t>(key_id_ >> (8 * i)));
  for (int i = 0; i < 8; ++i) blob.push_back(static_cast<std::uint8_t>(seed_ >> (8 * i)));
  return blob;
}

KeyPair KeyPair::deserialize(const std::vector<std::uint8_t>& blob) {
  if (blob.size() != 23 || blob[0] != 'E' || blob[1] != 'T' || blob[2] != 'K' || blob[3] != '1')
    throw std::invalid_argument("KeyPair: bad blob magic or size");
  if (blob[4] != 1) throw std::invalid_argument("KeyPair: unsupported version");
  KeyPair kp;
  kp.m_ = blob[5];
  if (kp.m_ < kMinDomainBits || kp.m_ > kMaxDomainBits)
    throw std::invalid_argument("KeyPair: domain bits out of range");
  if (blob[6] > 1) throw std::invalid_argument("KeyPair: bad family tag");
  kp.family_ = static_cast<Family>(blob[6]);
  kp.key_id_ = 0;
  kp.seed_ = 0;
  for (int i = 0; i < 8; ++i) kp.key_id_ |= std::uint64_t{blob[7 + i]} << (8 * i);
  for (int i = 0; i < 8; ++i) kp.seed_ |= std::uint64_t{blob[15 + i]} << (8 * i);
  kp.build_tables();
  return kp;
}

PrepareResult honest_device_prepare(const EvalOracle& oracle, Rng& rng) {
  const int m = oracle.domain_bits();
  if (m + 1 > qsim::kMaxQubits)
    throw std::invalid_argument("honest_device_prepare: residual register too large");
  const std::uint32_t domain = 1u << m;
  // Measuring the image register of sum_{b,x} |b>|x>|f_b(x)> yields the image
  // point of a uniformly random (b, x); the residual collapses to the equal
  // superposition over the preimages of that point.
  const int b = rng.bit();
  const std::uint32_t x = rng.bits(m);
  const std::uint32_t c = oracle.eval(b, x);

  std::vector<qsim::cplx> amps(std::size_t{1} << (m + 1), qsim::cplx{0.0, 0.0});
  for (int bb = 0; bb < 2; ++bb)
    for (std::uint32_t xx = 0; xx < domain; ++xx)
      if (oracle.eval(bb, xx) == c) amps[(static_cast<std::size_t>(bb) << m) | xx] = 1.0;
  qsim::StateVector residual(m + 1, std::move(amps));
  residual.renormalize();
  return {c, std::move(residual)};
}

ChallengeAResult honest_challenge_a(const qsim::StateVector& residual, Rng& rng) {
  qsim::StateVector state = residual;
  std::uint32_t z = 0;
  const int n = residual.num_qubits();
  for (int q = 0; q < n; ++q) {
    if (state.num_qubits() > 1) {
      auto r = qsim::measure_and_remove(state, 0, qsim::Basis::Computational, rng.uniform());
      z = (z << 1) | static_cast<std::uint32_t>(r.outcome);
      state = std::move(r.post);
    } else {
      auto r = qsim::measure_qubit(state, 0, qsim::Basis::Computational, rng.uniform());
      z = (z << 1) | static_cast<std::uint32_t>(r.outcome);
    }
  }
  return {z};
}

ChallengeBResult honest_challenge_b(const qsim::StateVector& residual, Rng& rng) {
  // Hadamard-measure everything except the leading |b> qubit.
  qsim::StateVector state = residual;
  std::uint32_t d = 0;
  const int m = residual.num_qubits() - 1;
  for (int q = 0; q < m; ++q) {
    auto r = qsim::measure_and_remove(state, 1, qsim::Basis::Hadamard, rng.uniform());
    d = (d << 1) | static_cast<std::uint32_t>(r.outcome);
    state = std::move(r.post);
  }
  return {d, std::move(state)};
}

}  // namespace diot::entcf
