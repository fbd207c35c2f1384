#include "diot/qsim.hpp"

#include <cmath>
#include <vector>

#include "diot/rng.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace diot;
using namespace diot::qsim;

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Independent oracle: per-outcome probability from explicit projector
// amplitudes <b|k> without touching the gate machinery under test.
std::vector<double> projector_distribution(const StateVector& psi, const std::vector<Basis>& bases) {
  const int n = psi.num_qubits();
  const std::size_t dim = psi.dim();
  std::vector<double> probs(dim, 0.0);
  for (std::size_t outcome = 0; outcome < dim; ++outcome) {
    cplx amp = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      double coeff = 1.0;
      for (int q = 0; q < n; ++q) {
        const std::size_t mask = std::size_t{1} << (n - 1 - q);
        const int b = (outcome & mask) ? 1 : 0;
        const int kb = (k & mask) ? 1 : 0;
        if (bases[static_cast<std::size_t>(q)] == Basis::Computational) {
          if (b != kb) {
            coeff = 0.0;
            break;
          }
        } else {
          coeff *= (b == 1 && kb == 1) ? -kInvSqrt2 : kInvSqrt2;
        }
      }
      amp += coeff * psi.amps()[k];
    }
    probs[outcome] = std::norm(amp);
  }
  return probs;
}

StateVector closed_form_after_circuit(const StateVector& in, int h_a, int h_b) {
  StateVector out = in;
  out.apply_cz(0, 1);
  // X^{h_a} Z^{h_b} on the first qubit, X^{h_b} Z^{h_a} on the second
  // (rightmost operator applied first).
  if (h_b) out.apply_z(0);
  if (h_a) out.apply_x(0);
  if (h_a) out.apply_z(1);
  if (h_b) out.apply_x(1);
  return out;
}

}  // namespace

TEST_CASE("bell states match their defining amplitudes") {
  auto b00 = make_bell({0, 0});
  CHECK(b00.amps()[0].real() == doctest::Approx(kInvSqrt2).epsilon(1e-12));
  CHECK(b00.amps()[3].real() == doctest::Approx(kInvSqrt2).epsilon(1e-12));
  CHECK(std::abs(b00.amps()[1]) < 1e-15);
  CHECK(std::abs(b00.amps()[2]) < 1e-15);

  auto b10 = make_bell({1, 0});  // (|00> - |11>)/sqrt(2)
  CHECK(b10.amps()[0].real() == doctest::Approx(kInvSqrt2));
  CHECK(b10.amps()[3].real() == doctest::Approx(-kInvSqrt2));

  auto b01 = make_bell({0, 1});  // (|10> + |01>)/sqrt(2)
  CHECK(b01.amps()[1].real() == doctest::Approx(kInvSqrt2));
  CHECK(b01.amps()[2].real() == doctest::Approx(kInvSqrt2));
  CHECK(std::abs(b01.amps()[0]) < 1e-15);

  auto b11 = make_bell({1, 1});
  CHECK(b11.amps()[1].real() == doctest::Approx(kInvSqrt2));
  CHECK(b11.amps()[2].real() == doctest::Approx(-kInvSqrt2));
}

TEST_CASE("matched-basis correlations hold exactly for every bell label") {
  // Computational x Computational gives a^b = v_beta with certainty;
  // Hadamard x Hadamard gives a^b = v_alpha.
  for (int va = 0; va < 2; ++va) {
    for (int vb = 0; vb < 2; ++vb) {
      auto state = make_bell({va, vb});
      for (Basis basis : {Basis::Computational, Basis::Hadamard}) {
        auto probs = outcome_distribution(state, {basis, basis});
        const int expect = basis == Basis::Computational ? vb : va;
        double matched = 0.0;
        for (std::size_t s = 0; s < 4; ++s) {
          const int a = (s >> 1) & 1;
          const int b = s & 1;
          if ((a ^ b) == expect) matched += probs[s];
        }
        CHECK(matched == doctest::Approx(1.0).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("measure_qubit follows the Born rule deterministically in the sample") {
  auto bell = make_bell({0, 0});
  auto r0 = measure_qubit(bell, 0, Basis::Computational, 0.25);
  CHECK(r0.outcome == 0);
  CHECK(std::abs(r0.post.amps()[0] - cplx{1.0, 0.0}) < 1e-12);  // |00>
  auto r1 = measure_qubit(bell, 0, Basis::Computational, 0.75);
  CHECK(r1.outcome == 1);
  CHECK(std::abs(r1.post.amps()[3] - cplx{1.0, 0.0}) < 1e-12);  // |11>

  StateVector plus(1, {kInvSqrt2, kInvSqrt2});
  auto rp = measure_qubit(plus, 0, Basis::Hadamard, 0.999999);
  CHECK(rp.outcome == 0);  // |+> is the 0 outcome of the Hadamard basis

  // Both qubits of phi(1,0) in Hadamard: a^b = 1 always.
  auto b10 = make_bell({1, 0});
  for (double u1 : {0.2, 0.8}) {
    auto ra = measure_qubit(b10, 0, Basis::Hadamard, u1);
    auto rb = measure_qubit(ra.post, 1, Basis::Hadamard, 0.5);
    CHECK((ra.outcome ^ rb.outcome) == 1);
  }

  CHECK_THROWS_AS(measure_qubit(bell, 2, Basis::Computational, 0.5), std::out_of_range);
}

TEST_CASE("outcome_distribution agrees with the projector oracle") {
  auto b00 = make_bell({0, 0});
  auto cc = outcome_distribution(b00, {Basis::Computational, Basis::Computational});
  CHECK(cc[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cc[3] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cc[1] + cc[2] < 1e-12);

  auto ch = outcome_distribution(b00, {Basis::Computational, Basis::Hadamard});
  for (double p : ch) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));

  StateVector zero(1);
  auto h = outcome_distribution(zero, {Basis::Hadamard});
  CHECK(h[0] == doctest::Approx(0.5));
  CHECK(h[1] == doctest::Approx(0.5));

  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng.index(3));
    auto psi = testutil::random_state(n, rng);
    std::vector<Basis> bases;
    for (int q = 0; q < n; ++q) bases.push_back(basis_from_bit(rng.bit()));
    auto fast = outcome_distribution(psi, bases);
    auto oracle = projector_distribution(psi, bases);
    double total = 0.0;
    for (std::size_t i = 0; i < fast.size(); ++i) {
      CHECK(std::abs(fast[i] - oracle[i]) < 1e-10);
      total += fast[i];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  }

  // Density-matrix route gives the same distribution.
  Rng rho_rng = Rng(7).split(1);
  auto psi = testutil::random_state(2, rho_rng);
  auto rho = DensityMatrix::from_state(psi);
  std::vector<Basis> bases{Basis::Hadamard, Basis::Computational};
  auto from_rho = outcome_distribution(rho, bases);
  auto from_psi = outcome_distribution(psi, bases);
  for (std::size_t i = 0; i < from_psi.size(); ++i) CHECK(std::abs(from_rho[i] - from_psi[i]) < 1e-10);
}

TEST_CASE("entangling circuit reproduces the pauli-corrected CZ on all branches") {
  // u samples below 0.5 select outcome 0; each h branch has probability 1/4.
  const double us[2] = {0.25, 0.75};

  SUBCASE("computational basis inputs") {
    for (std::uint32_t idx = 0; idx < 4; ++idx) {
      auto in = StateVector::computational(2, idx);
      for (int ha = 0; ha < 2; ++ha) {
        for (int hb = 0; hb < 2; ++hb) {
          auto res = apply_entangling_circuit(in, us[ha], us[hb]);
          CHECK(res.h_a == ha);
          CHECK(res.h_b == hb);
          auto want = closed_form_after_circuit(in, ha, hb);
          CHECK(fidelity(res.post, want) >= 1.0 - 1e-9);
        }
      }
    }
  }

  SUBCASE("|00> stays |00> on the trivial branch, |10> under h_a flip") {
    auto r = apply_entangling_circuit(StateVector::computational(2, 0), 0.25, 0.25);
    CHECK(fidelity(r.post, StateVector::computational(2, 0)) >= 1.0 - 1e-9);
    auto r2 = apply_entangling_circuit(StateVector::computational(2, 0), 0.75, 0.25);
    CHECK(fidelity(r2.post, StateVector::computational(2, 2)) >= 1.0 - 1e-9);  // |10>
  }

  SUBCASE("random states, every branch") {
    Rng rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
      auto in = testutil::random_state(2, rng);
      for (int ha = 0; ha < 2; ++ha)
        for (int hb = 0; hb < 2; ++hb) {
          auto res = apply_entangling_circuit(in, us[ha], us[hb]);
          CHECK(res.h_a == ha);
          CHECK(res.h_b == hb);
          CHECK(fidelity(res.post, closed_form_after_circuit(in, ha, hb)) >= 1.0 - 1e-9);
          CHECK(res.post.norm_sq() == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
  }

  SUBCASE("|+>|+> h-branch probabilities are uniform") {
    // Outcome 0 exactly when u < 1/2 for both measurements, independent of
    // the other; tested by sweeping the sample grid.
    StateVector plus2(2, {0.5, 0.5, 0.5, 0.5});
    int seen[2][2] = {};
    for (double u1 : {0.1, 0.3, 0.6, 0.9})
      for (double u2 : {0.2, 0.4, 0.7, 0.8}) {
        auto res = apply_entangling_circuit(plus2, u1, u2);
        CHECK(res.h_a == (u1 < 0.5 ? 0 : 1));
        CHECK(res.h_b == (u2 < 0.5 ? 0 : 1));
        seen[res.h_a][res.h_b] = 1;
      }
    CHECK(seen[0][0] + seen[0][1] + seen[1][0] + seen[1][1] == 4);
  }

  CHECK_THROWS(apply_entangling_circuit(StateVector(3), 0.5, 0.5));
}

TEST_CASE("trace distance") {
  auto zero = DensityMatrix::from_state(StateVector::computational(1, 0));
  auto one = DensityMatrix::from_state(StateVector::computational(1, 1));
  StateVector plus_sv(1, {kInvSqrt2, kInvSqrt2});
  auto plus = DensityMatrix::from_state(plus_sv);

  CHECK(trace_distance(zero, zero) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(trace_distance(zero, one) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(trace_distance(zero, plus) == doctest::Approx(kInvSqrt2).epsilon(1e-10));

  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    auto a = DensityMatrix::from_state(testutil::random_state(2, rng));
    auto b = DensityMatrix::from_state(testutil::random_state(2, rng));
    auto c = DensityMatrix::from_state(testutil::random_state(2, rng));
    const double dab = trace_distance(a, b);
    CHECK(dab == doctest::Approx(trace_distance(b, a)).epsilon(1e-12));
    CHECK(dab <= trace_distance(a, c) + trace_distance(c, b) + 1e-10);
    CHECK(dab >= -1e-12);
    CHECK(dab <= 1.0 + 1e-12);
  }
  CHECK(trace_distance(zero, zero) < 1e-12);

  CHECK_THROWS(trace_distance(zero, DensityMatrix::from_state(make_bell({0, 0}))));
}

TEST_CASE("density matrix and cq-state validity checks") {
  auto rho = DensityMatrix::from_state(make_bell({0, 1}));
  CHECK(rho.is_valid());

  DensityMatrix bad(1);
  bad.at(0, 0) = 0.5;
  bad.at(1, 1) = 0.6;  // trace 1.1
  CHECK_FALSE(bad.is_valid());

  CqState cq;
  cq.branches.push_back({{0}, 0.5, rho});
  cq.branches.push_back({{1}, 0.5, rho});
  CHECK(cq.is_valid());
  cq.branches.push_back({{1}, 0.0, rho});  // duplicate classical tuple
  CHECK_FALSE(cq.is_valid());
}

TEST_CASE("measure_and_remove keeps the untouched subregister intact") {
  Rng rng(5);
  auto psi = testutil::random_state(3, rng);
  // Measuring qubit 1 then comparing against measure_qubit + manual slice.
  auto removed = measure_and_remove(psi, 1, Basis::Computational, 0.3);
  auto kept = measure_qubit(psi, 1, Basis::Computational, 0.3);
  CHECK(removed.outcome == kept.outcome);
  // Check amplitudes agree on the matching slice.
  for (std::size_t i = 0; i < removed.post.dim(); ++i) {
    const std::size_t hi = i >> 1, lo = i & 1;
    const std::size_t full = (hi << 2) | (static_cast<std::size_t>(removed.outcome) << 1) | lo;
    CHECK(std::abs(removed.post.amps()[i] - kept.post.amps()[full]) < 1e-12);
  }
}
