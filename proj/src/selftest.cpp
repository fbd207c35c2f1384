#include "diot/selftest.hpp"

#include <cmath>
#include <stdexcept>

namespace diot::selftest {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kDetTol = 1e-9;

int comp_index(Component c) { return static_cast<int>(c); }

// Honest single-qubit state after the type-b first phase, reconstructed from
// the verifier's key material.
qsim::StateVector reconstruct_phase_qubit(const entcf::KeyPair& key, std::uint32_t c,
                                          std::uint32_t d) {
  if (key.family() == entcf::Family::ClawFree) {
    const int v = key.hardcore_bit(c, d);
    return qsim::StateVector(1, {kInvSqrt2, v ? -kInvSqrt2 : kInvSqrt2});
  }
  auto [b_hat, x_hat] = key.invert_injective(c);
  (void)x_hat;
  return qsim::StateVector::computational(1, static_cast<std::uint32_t>(b_hat));
}

// Post-circuit two-qubit state for a type-b round: CZ, the teleportation
// Pauli frame, then the protocol Hadamard on the second qubit.
qsim::StateVector reconstruct_post_circuit(const qsim::StateVector& psi_a,
                                           const qsim::StateVector& psi_b, int h_a, int h_b) {
  qsim::StateVector joint = psi_a.tensor(psi_b);
  joint.apply_cz(0, 1);
  if (h_b) joint.apply_z(0);
  if (h_a) joint.apply_x(0);
  if (h_a) joint.apply_z(1);
  if (h_b) joint.apply_x(1);
  joint.apply_h(1);
  return joint;
}

bool image_check(const entcf::KeyPair& key, std::uint32_t z, std::uint32_t c) {
  const int m = key.domain_bits();
  const int z1 = static_cast<int>(z >> m);
  const std::uint32_t zr = z & ((1u << m) - 1);
  return key.eval(z1, zr) == c;
}

// Deterministic-coordinate comparison: check the answer only when the honest
// marginal is a point distribution.
bool deterministic_coordinate_ok(const qsim::StateVector& psi2, int qubit, qsim::Basis question,
                                 int answer) {
  const double p0 = qsim::project_qubit(psi2, qubit, question, 0).probability;
  if (p0 > 1.0 - kDetTol) return answer == 0;
  if (p0 < kDetTol) return answer == 1;
  return true;
}

}  // namespace

// --- HonestDevice -------------------------------------------------------------

void HonestDevice::begin_round(const entcf::EvalOracle& key_a, const entcf::EvalOracle& key_b,
                               Rng& rng) {
  rng_ = rng.split(0xdec1ce);
  prep_[0] = entcf::honest_device_prepare(key_a, rng_);
  prep_[1] = entcf::honest_device_prepare(key_b, rng_);
  has_retained_[0] = has_retained_[1] = false;
  joint_ready_ = false;
  joint_measured_[0] = joint_measured_[1] = false;
}

std::uint32_t HonestDevice::commitment(Component comp) {
  return prep_[comp_index(comp)].commitment;
}

std::uint32_t HonestDevice::preimage_response(Component comp) {
  return entcf::honest_challenge_a(prep_[comp_index(comp)].residual, rng_).z;
}

std::uint32_t HonestDevice::phase_response(Component comp) {
  auto res = entcf::honest_challenge_b(prep_[comp_index(comp)].residual, rng_);
  retained_[comp_index(comp)] = std::move(res.retained);
  has_retained_[comp_index(comp)] = true;
  return res.d;
}

Answer HonestDevice::answer(Component comp, qsim::Basis question) {
  const int idx = comp_index(comp);
  if (!has_retained_[idx]) throw std::logic_error("HonestDevice: answer without phase challenge");

  if (has_retained_[0] && has_retained_[1]) {
    if (!joint_ready_) {
      auto res = qsim::apply_entangling_circuit(retained_[0].tensor(retained_[1]), rng_.uniform(),
                                                rng_.uniform());
      h_[0] = res.h_a;
      h_[1] = res.h_b;
      joint_ = std::move(res.post);
      joint_.apply_h(1);
      joint_ready_ = true;
    }
    if (joint_measured_[idx]) throw std::logic_error("HonestDevice: component answered twice");
    auto r = qsim::measure_qubit(joint_, idx, question, rng_.uniform());
    joint_ = std::move(r.post);
    joint_measured_[idx] = true;
    return {r.outcome, h_[idx]};
  }

  // Single-sided participation: the other component is in a type-a round and
  // never touches its half of the EPR pair.
  qsim::StateVector reg = retained_[idx].tensor(qsim::make_bell({0, 0}));  // [kept, e1, e2]
  int h = 0;
  if (comp == Component::A) {
    reg.apply_cnot(1, 0);  // e1 onto the kept qubit
    auto hm = qsim::measure_and_remove(reg, 0, qsim::Basis::Computational, rng_.uniform());
    h = hm.outcome;
    auto am = qsim::measure_qubit(hm.post, 0, question, rng_.uniform());  // e1
    return {am.outcome, h};
  }
  reg.apply_h(2);        // circuit Hadamard on e2
  reg.apply_cnot(2, 0);  // e2 onto the kept qubit
  auto hm = qsim::measure_and_remove(reg, 0, qsim::Basis::Computational, rng_.uniform());
  h = hm.outcome;
  auto post = hm.post;   // [e1, e2]
  post.apply_h(1);       // protocol Hadamard on the second qubit
  auto bm = qsim::measure_qubit(post, 1, question, rng_.uniform());
  return {bm.outcome, h};
}

// --- Winning condition ----------------------------------------------------------

proto::Verdict winning_check(const proto::RoundRecord& rec) {
  using proto::ChallengeType;
  bool ok = true;

  if (rec.ct_a == ChallengeType::A) {
    if (!rec.z_a) throw std::invalid_argument("winning_check: missing z_a");
    ok = ok && image_check(rec.key_a, *rec.z_a, rec.c_a);
  }
  if (rec.ct_b == ChallengeType::A) {
    if (!rec.z_b) throw std::invalid_argument("winning_check: missing z_b");
    ok = ok && image_check(rec.key_b, *rec.z_b, rec.c_b);
  }
  if (!ok) return proto::Verdict::Fail;

  const bool a_on_b = rec.ct_a == ChallengeType::B;
  const bool b_on_b = rec.ct_b == ChallengeType::B;
  if (!a_on_b && !b_on_b) return proto::Verdict::Pass;

  if (a_on_b && b_on_b) {
    if (!rec.d_a || !rec.d_b || !rec.x || !rec.y || !rec.a_bit || !rec.b_bit || !rec.h_a ||
        !rec.h_b)
      throw std::invalid_argument("winning_check: incomplete type-b record");
    const bool bell = rec.key_a.family() == entcf::Family::ClawFree &&
                      rec.key_b.family() == entcf::Family::ClawFree;
    if (bell) {
      if (*rec.x != *rec.y) return proto::Verdict::Pass;
      const int parity = *rec.a_bit ^ *rec.b_bit;
      const int want = *rec.x == qsim::Basis::Computational
                           ? rec.key_b.hardcore_bit(rec.c_b, *rec.d_b)
                           : rec.key_a.hardcore_bit(rec.c_a, *rec.d_a);
      return parity == want ? proto::Verdict::Pass : proto::Verdict::Fail;
    }
    const auto psi2 = reconstruct_post_circuit(reconstruct_phase_qubit(rec.key_a, rec.c_a, *rec.d_a),
                                               reconstruct_phase_qubit(rec.key_b, rec.c_b, *rec.d_b),
                                               *rec.h_a, *rec.h_b);
    ok = deterministic_coordinate_ok(psi2, 0, *rec.x, *rec.a_bit) &&
         deterministic_coordinate_ok(psi2, 1, *rec.y, *rec.b_bit);
    return ok ? proto::Verdict::Pass : proto::Verdict::Fail;
  }

  // Mixed challenge types: the type-b component ran the circuit alone, so its
  // retained EPR half decoheres in the computational basis. Claw-free keys
  // leave it maximally mixed (nothing to check); injective keys pin the
  // answer in one basis.
  const bool side_a = a_on_b;
  const auto& key = side_a ? rec.key_a : rec.key_b;
  if (key.family() == entcf::Family::ClawFree) return proto::Verdict::Pass;
  const auto& q = side_a ? rec.x : rec.y;
  const auto& ans = side_a ? rec.a_bit : rec.b_bit;
  const auto& h = side_a ? rec.h_a : rec.h_b;
  if (!q || !ans || !h) throw std::invalid_argument("winning_check: incomplete mixed record");
  auto [b_hat, x_hat] = key.invert_injective(side_a ? rec.c_a : rec.c_b);
  (void)x_hat;
  const qsim::Basis pinned = side_a ? qsim::Basis::Computational : qsim::Basis::Hadamard;
  if (*q != pinned) return proto::Verdict::Pass;
  return (*ans == (b_hat ^ *h)) ? proto::Verdict::Pass : proto::Verdict::Fail;
}

// --- Round execution ------------------------------------------------------------

proto::RoundRecord run_selftest_round(VerifierMode mode, const proto::ProtocolConfig& cfg,
                                      DeviceStrategy& device, Rng& rng) {
  proto::RoundRecord rec;
  rec.theta_a = qsim::basis_from_bit(rng.bit());
  rec.theta_b = qsim::basis_from_bit(rng.bit());
  rec.key_a = entcf::keygen(rec.theta_a, cfg.domain_bits, rng);
  rec.key_b = entcf::keygen(rec.theta_b, cfg.domain_bits, rng);

  if (mode == VerifierMode::SingleVerifier) {
    rec.ct_a = rec.ct_b = rng.bit() ? proto::ChallengeType::B : proto::ChallengeType::A;
  } else {
    rec.ct_a = rng.bit() ? proto::ChallengeType::B : proto::ChallengeType::A;
    rec.ct_b = rng.bit() ? proto::ChallengeType::B : proto::ChallengeType::A;
  }

  Rng device_rng = rng.split(0xd0);
  device.begin_round(rec.key_a.oracle(), rec.key_b.oracle(), device_rng);
  rec.c_a = device.commitment(Component::A);
  rec.c_b = device.commitment(Component::B);

  if (rec.ct_a == proto::ChallengeType::A) rec.z_a = device.preimage_response(Component::A);
  if (rec.ct_b == proto::ChallengeType::A) rec.z_b = device.preimage_response(Component::B);
  if (rec.ct_a == proto::ChallengeType::B) rec.d_a = device.phase_response(Component::A);
  if (rec.ct_b == proto::ChallengeType::B) rec.d_b = device.phase_response(Component::B);

  if (rec.ct_a == proto::ChallengeType::B) rec.x = qsim::basis_from_bit(rng.bit());
  if (rec.ct_b == proto::ChallengeType::B) rec.y = qsim::basis_from_bit(rng.bit());

  if (rec.ct_a == proto::ChallengeType::B) {
    auto ans = device.answer(Component::A, *rec.x);
    rec.a_bit = ans.bit;
    rec.h_a = ans.h;
  }
  if (rec.ct_b == proto::ChallengeType::B) {
    auto ans = device.answer(Component::B, *rec.y);
    rec.b_bit = ans.bit;
    rec.h_b = ans.h;
  }

  if (rec.ct_a == rec.ct_b) rec.rt = proto::classify_round(rec);
  rec.w = winning_check(rec);
  return rec;
}

// --- Delta estimation ------------------------------------------------------------

DeltaEstimate estimate_delta(const RoundFailureSource& source, int n_estimation, double tau,
                             Rng& rng) {
  if (n_estimation < 1) throw std::invalid_argument("estimate_delta: need at least one round");
  DeltaEstimate est;
  est.rounds = n_estimation;
  for (int i = 0; i < n_estimation; ++i) {
    Rng round_rng = rng.split(0xe5717, static_cast<std::uint64_t>(i));
    if (source(i, round_rng)) ++est.failures;
  }
  est.delta_prime = static_cast<double>(est.failures) / n_estimation;
  est.confidence = 1.0 - 2.0 * std::exp(-(tau * tau * n_estimation) / 3.0);
  return est;
}

RoundFailureSource device_failure_source(const proto::ProtocolConfig& cfg,
                                         DeviceStrategy& device) {
  return [&cfg, &device](int, Rng& rng) {
    auto rec = run_selftest_round(VerifierMode::SingleVerifier, cfg, device, rng);
    return rec.w == proto::Verdict::Fail;
  };
}

RoundFailureSource bernoulli_failure_source(double failure_rate) {
  return [failure_rate](int, Rng& rng) { return rng.uniform() < failure_rate; };
}

// --- Exact per-round enumeration ---------------------------------------------------

namespace {

struct PrepBranch {
  std::uint32_t c = 0;
  double probability = 0.0;
};

std::vector<PrepBranch> prepare_branches(const entcf::KeyPair& key) {
  const int m = key.domain_bits();
  const double domain = std::exp2(m);
  std::vector<PrepBranch> out;
  if (key.family() == entcf::Family::ClawFree) {
    for (std::uint32_t x = 0; x < (1u << m); ++x) out.push_back({key.eval(0, x), 1.0 / domain});
  } else {
    for (int b = 0; b < 2; ++b)
      for (std::uint32_t x = 0; x < (1u << m); ++x)
        out.push_back({key.eval(b, x), 0.5 / domain});
  }
  return out;
}

struct ZBranch {
  std::uint32_t z = 0;
  double probability = 0.0;
};

std::vector<ZBranch> z_branches(const entcf::KeyPair& key, std::uint32_t c) {
  const int m = key.domain_bits();
  if (key.family() == entcf::Family::ClawFree) {
    auto [x0, x1] = key.invert_claw(c);
    return {{x0, 0.5}, {(1u << m) | x1, 0.5}};
  }
  auto [b, x] = key.invert_injective(c);
  return {{(static_cast<std::uint32_t>(b) << m) | x, 1.0}};
}

}  // namespace

std::vector<WeightedRound> enumerate_honest_round(const entcf::KeyPair& key_a,
                                                  const entcf::KeyPair& key_b,
                                                  proto::ChallengeType ct,
                                                  std::optional<qsim::Basis> x,
                                                  std::optional<qsim::Basis> y) {
  std::vector<WeightedRound> out;
  const int m = key_a.domain_bits();
  const double d_prob = std::exp2(-m);

  for (const auto& pa : prepare_branches(key_a)) {
    for (const auto& pb : prepare_branches(key_b)) {
      const double p_prep = pa.probability * pb.probability;
      if (ct == proto::ChallengeType::A) {
        for (const auto& za : z_branches(key_a, pa.c))
          for (const auto& zb : z_branches(key_b, pb.c)) {
            WeightedRound wr;
            wr.probability = p_prep * za.probability * zb.probability;
            wr.data.c_a = pa.c;
            wr.data.c_b = pb.c;
            wr.data.z_a = za.z;
            wr.data.z_b = zb.z;
            out.push_back(std::move(wr));
          }
        continue;
      }
      if (!x || !y) throw std::invalid_argument("enumerate_honest_round: questions required");
      for (std::uint32_t da = 0; da < (1u << m); ++da) {
        for (std::uint32_t db = 0; db < (1u << m); ++db) {
          const auto psi_a = reconstruct_phase_qubit(key_a, pa.c, da);
          const auto psi_b = reconstruct_phase_qubit(key_b, pb.c, db);
          for (int ha = 0; ha < 2; ++ha)
            for (int hb = 0; hb < 2; ++hb) {
              const auto psi2 = reconstruct_post_circuit(psi_a, psi_b, ha, hb);
              const auto probs = qsim::outcome_distribution(psi2, {*x, *y});
              for (std::size_t s = 0; s < 4; ++s) {
                if (probs[s] <= 0.0) continue;
                WeightedRound wr;
                wr.probability = p_prep * d_prob * d_prob * 0.25 * probs[s];
                wr.data.c_a = pa.c;
                wr.data.c_b = pb.c;
                wr.data.d_a = da;
                wr.data.d_b = db;
                wr.data.h_a = ha;
                wr.data.h_b = hb;
                wr.data.a_bit = static_cast<int>((s >> 1) & 1);
                wr.data.b_bit = static_cast<int>(s & 1);
                out.push_back(std::move(wr));
              }
            }
        }
      }
    }
  }
  return out;
}

}  // namespace diot::selftest
