#include "diot/entcf.hpp"

#include <map>
#include <set>

#include "diot/rng.hpp"
#include "doctest.h"

using namespace diot;
using namespace diot::entcf;
using qsim::Basis;

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Oracle route for the honest preparation: build the explicit superposition
// sum_{b,x} |b>|x>|f_b(x)> as a (2m+3)-qubit state, measure the image
// register for real, and return (c, residual).
std::pair<std::uint32_t, qsim::StateVector> explicit_prepare(const EvalOracle& oracle, Rng& rng) {
  const int m = oracle.domain_bits();
  const int total = 1 + m + (m + 2);
  std::vector<qsim::cplx> amps(std::size_t{1} << total, qsim::cplx{0.0, 0.0});
  for (int b = 0; b < 2; ++b)
    for (std::uint32_t x = 0; x < (1u << m); ++x) {
      const std::size_t idx = (static_cast<std::size_t>(b) << (m + m + 2)) |
                              (static_cast<std::size_t>(x) << (m + 2)) | oracle.eval(b, x);
      amps[idx] = 1.0;
    }
  qsim::StateVector full(total, std::move(amps));
  full.renormalize();
  std::uint32_t c = 0;
  for (int q = 0; q < m + 2; ++q) {
    // The image register starts right after the m+1 preimage qubits.
    auto r = qsim::measure_and_remove(full, m + 1, Basis::Computational, rng.uniform());
    c = (c << 1) | static_cast<std::uint32_t>(r.outcome);
    full = std::move(r.post);
  }
  return {c, std::move(full)};
}

qsim::StateVector preimage_superposition(const KeyPair& kp, std::uint32_t c) {
  const int m = kp.domain_bits();
  std::vector<qsim::cplx> amps(std::size_t{1} << (m + 1), qsim::cplx{0.0, 0.0});
  for (int b = 0; b < 2; ++b)
    for (std::uint32_t x = 0; x < (1u << m); ++x)
      if (kp.eval(b, x) == c) amps[(static_cast<std::size_t>(b) << m) | x] = 1.0;
  qsim::StateVector s(m + 1, std::move(amps));
  s.renormalize();
  return s;
}

}  // namespace

TEST_CASE("family follows the state basis") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const Basis theta = qsim::basis_from_bit(rng.bit());
    auto kp = keygen(theta, 4, rng);
    CHECK(kp.family() == (theta == Basis::Hadamard ? Family::ClawFree : Family::Injective));
  }
  CHECK_THROWS(keygen(Basis::Hadamard, 1, rng));
  CHECK_THROWS(keygen(Basis::Hadamard, 11, rng));
}

TEST_CASE("claw-free pairs are bijections onto one image with proper claws") {
  Rng rng(2);
  for (int m : {2, 3, 4}) {
    auto kp = keygen(Basis::Hadamard, m, rng);
    const std::uint32_t domain = 1u << m;
    std::set<std::uint32_t> im0, im1;
    for (std::uint32_t x = 0; x < domain; ++x) {
      im0.insert(kp.eval(0, x));
      im1.insert(kp.eval(1, x));
    }
    CHECK(im0.size() == domain);  // injective
    CHECK(im1.size() == domain);
    CHECK(im0 == im1);  // same image

    for (std::uint32_t y : im0) {
      auto [x0, x1] = kp.invert_claw(y);
      CHECK(kp.eval(0, x0) == y);
      CHECK(kp.eval(1, x1) == y);
      CHECK(x0 != x1);  // claws never degenerate
    }
  }
}

TEST_CASE("injective pairs have disjoint images and invert correctly") {
  Rng rng(3);
  for (int m : {2, 3, 4}) {
    auto kp = keygen(Basis::Computational, m, rng);
    const std::uint32_t domain = 1u << m;
    std::set<std::uint32_t> im0, im1;
    for (std::uint32_t x = 0; x < domain; ++x) {
      im0.insert(kp.eval(0, x));
      im1.insert(kp.eval(1, x));
    }
    CHECK(im0.size() == domain);
    CHECK(im1.size() == domain);
    for (std::uint32_t y : im1) CHECK(im0.count(y) == 0);

    for (int b = 0; b < 2; ++b)
      for (std::uint32_t x = 0; x < domain; ++x) {
        auto [rb, rx] = kp.invert_injective(kp.eval(b, x));
        CHECK(rb == b);
        CHECK(rx == x);
      }
  }
}

TEST_CASE("inversion error paths") {
  Rng rng(4);
  auto cf = keygen(Basis::Hadamard, 3, rng);
  auto inj = keygen(Basis::Computational, 3, rng);

  // Codomain has 2^(m+2) points; find one outside each image.
  std::set<std::uint32_t> cf_image, inj_union;
  for (int b = 0; b < 2; ++b)
    for (std::uint32_t x = 0; x < 8; ++x) {
      cf_image.insert(cf.eval(b, x));
      inj_union.insert(inj.eval(b, x));
    }
  std::uint32_t bad_cf = 0, bad_inj = 0;
  while (cf_image.count(bad_cf)) ++bad_cf;
  while (inj_union.count(bad_inj)) ++bad_inj;

  CHECK_THROWS_AS(cf.invert_claw(bad_cf), std::domain_error);
  CHECK_THROWS_AS(inj.invert_injective(bad_inj), std::domain_error);
  CHECK_THROWS_AS(inj.invert_claw(inj.eval(0, 0)), std::invalid_argument);
  CHECK_THROWS_AS(cf.invert_injective(cf.eval(0, 0)), std::invalid_argument);
  CHECK_THROWS_AS(cf.hardcore_bit(bad_cf, 1), std::domain_error);
}

TEST_CASE("keygen allocates fresh identifiers and eval is deterministic") {
  Rng rng(5);
  auto k1 = keygen(Basis::Hadamard, 4, rng);
  auto k2 = keygen(Basis::Hadamard, 4, rng);
  CHECK(k1.key_id() != k2.key_id());
  for (std::uint32_t x = 0; x < 16; ++x) {
    CHECK(k1.eval(0, x) == k1.eval(0, x));
    CHECK(k1.oracle().eval(1, x) == k1.eval(1, x));
  }
  CHECK_THROWS(k1.eval(0, 16));
}

TEST_CASE("hardcore bit") {
  Rng rng(6);
  auto kp = keygen(Basis::Hadamard, 6, rng);

  const std::uint32_t y = kp.eval(0, 13);
  auto [x0, x1] = kp.invert_claw(y);

  CHECK(kp.hardcore_bit(y, 0) == 0);
  for (int i = 0; i < 6; ++i) {
    const std::uint32_t e_i = 1u << i;
    CHECK(kp.hardcore_bit(y, e_i) == static_cast<int>(((x0 ^ x1) >> i) & 1));
  }

  // Recompute d . (x0 ^ x1) bitwise as an independent route.
  for (int t = 0; t < 100; ++t) {
    const std::uint32_t yy = kp.eval(rng.bit(), rng.bits(6));
    const std::uint32_t d = rng.bits(6);
    auto claw = kp.invert_claw(yy);
    int expect = 0;
    for (int i = 0; i < 6; ++i) expect ^= ((d >> i) & 1) & ((claw.first >> i) ^ (claw.second >> i));
    CHECK(kp.hardcore_bit(yy, d) == (expect & 1));
  }

  // Exact marginal: for every image point, exactly half of all d values give
  // hardcore bit 1 (x0 ^ x1 is never zero).
  for (std::uint32_t x = 0; x < 64; x += 7) {
    const std::uint32_t yy = kp.eval(0, x);
    int ones = 0;
    for (std::uint32_t d = 0; d < 64; ++d) ones += kp.hardcore_bit(yy, d);
    CHECK(ones == 32);
  }
}

TEST_CASE("honest preparation matches the explicit superposition route") {
  Rng rng(7);
  for (int m : {2, 3}) {
    for (Basis theta : {Basis::Hadamard, Basis::Computational}) {
      auto kp = keygen(theta, m, rng);
      for (int trial = 0; trial < 8; ++trial) {
        auto [c, residual] = explicit_prepare(kp.oracle(), rng);
        // The measured image point collapses the preimage register to the
        // direct construction.
        CHECK(qsim::fidelity(residual, preimage_superposition(kp, c)) >= 1.0 - 1e-9);
      }
    }
  }
}

TEST_CASE("honest preparation semantics per family") {
  Rng rng(8);
  const int m = 4;

  SUBCASE("claw-free residual is the equal claw superposition") {
    auto kp = keygen(Basis::Hadamard, m, rng);
    for (int t = 0; t < 20; ++t) {
      auto res = honest_device_prepare(kp.oracle(), rng);
      auto [x0, x1] = kp.invert_claw(res.commitment);
      std::vector<qsim::cplx> amps(1u << (m + 1), qsim::cplx{0, 0});
      amps[x0] = kInvSqrt2;
      amps[(1u << m) | x1] = kInvSqrt2;
      qsim::StateVector expect(m + 1, std::move(amps));
      CHECK(qsim::fidelity(res.residual, expect) >= 1.0 - 1e-9);
    }
  }

  SUBCASE("injective residual is a computational basis state") {
    auto kp = keygen(Basis::Computational, m, rng);
    for (int t = 0; t < 20; ++t) {
      auto res = honest_device_prepare(kp.oracle(), rng);
      auto [b, x] = kp.invert_injective(res.commitment);
      auto expect = qsim::StateVector::computational(
          m + 1, (static_cast<std::uint32_t>(b) << m) | x);
      CHECK(qsim::fidelity(res.residual, expect) >= 1.0 - 1e-9);
    }
  }
}

TEST_CASE("honest challenges") {
  Rng rng(9);
  const int m = 4;

  SUBCASE("type a outputs always satisfy the image check") {
    for (Basis theta : {Basis::Hadamard, Basis::Computational}) {
      auto kp = keygen(theta, m, rng);
      for (int t = 0; t < 50; ++t) {
        auto prep = honest_device_prepare(kp.oracle(), rng);
        auto za = honest_challenge_a(prep.residual, rng);
        const int z1 = static_cast<int>(za.z >> m);
        const std::uint32_t zr = za.z & ((1u << m) - 1);
        CHECK(kp.eval(z1, zr) == prep.commitment);
      }
    }
  }

  SUBCASE("type b retains the hardcore-phase qubit for claw-free keys") {
    auto kp = keygen(Basis::Hadamard, m, rng);
    for (int t = 0; t < 50; ++t) {
      auto prep = honest_device_prepare(kp.oracle(), rng);
      auto cb = honest_challenge_b(prep.residual, rng);
      const int v = kp.hardcore_bit(prep.commitment, cb.d);
      qsim::StateVector expect(1, {kInvSqrt2, v ? -kInvSqrt2 : kInvSqrt2});
      CHECK(qsim::fidelity(cb.retained, expect) >= 1.0 - 1e-9);
    }
  }

  SUBCASE("type b retains |b> for injective keys") {
    auto kp = keygen(Basis::Computational, m, rng);
    for (int t = 0; t < 50; ++t) {
      auto prep = honest_device_prepare(kp.oracle(), rng);
      auto [b, x] = kp.invert_injective(prep.commitment);
      auto cb = honest_challenge_b(prep.residual, rng);
      CHECK(qsim::fidelity(cb.retained, qsim::StateVector::computational(1, static_cast<std::uint32_t>(b))) >=
            1.0 - 1e-9);
    }
  }
}

TEST_CASE("key serialization") {
  Rng rng(10);
  for (Basis theta : {Basis::Hadamard, Basis::Computational}) {
    auto kp = keygen(theta, 5, rng);
    auto blob = kp.serialize();
    auto back = KeyPair::deserialize(blob);
    CHECK(back.family() == kp.family());
    CHECK(back.domain_bits() == kp.domain_bits());
    CHECK(back.key_id() == kp.key_id());
    for (int b = 0; b < 2; ++b)
      for (std::uint32_t x = 0; x < 32; ++x) CHECK(back.eval(b, x) == kp.eval(b, x));
  }
  std::vector<std::uint8_t> junk = {'X', 'T', 'K', '1'};
  CHECK_THROWS(KeyPair::deserialize(junk));
  auto good = keygen(Basis::Hadamard, 4, rng).serialize();
  good[4] = 9;  // unsupported version
  CHECK_THROWS(KeyPair::deserialize(good));
}
