#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "diot/bits.hpp"

namespace diot::qsim {

using cplx = std::complex<double>;

// Measurement basis for a single qubit. Selection by a bit c follows the
// convention basis_from_bit(0) == Computational, basis_from_bit(1) == Hadamard.
enum class Basis : std::uint8_t { Computational = 0, Hadamard = 1 };

inline Basis basis_from_bit(int c) { return c ? Basis::Hadamard : Basis::Computational; }
inline int basis_bit(Basis b) { return b == Basis::Hadamard ? 1 : 0; }

// Bell state label (v_alpha, v_beta): |phi> = (Z^v_alpha X^v_beta (x) 1)(|00>+|11>)/sqrt(2).
struct BellLabel {
  int v_alpha = 0;
  int v_beta = 0;
};

constexpr int kMaxQubits = 12;

// Dense pure state over q qubits, amplitudes indexed with qubit 0 as the most
// significant bit, so amps[0b10] is |10>. Registers stay small by design; the
// per-round protocol states never exceed kMaxQubits.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(int num_qubits);  // |0...0>
  StateVector(int num_qubits, std::vector<cplx> amps);

  static StateVector computational(int num_qubits, std::uint32_t basis_index);

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  const std::vector<cplx>& amps() const { return amps_; }
  std::vector<cplx>& amps() { return amps_; }

  double norm_sq() const;
  void renormalize();

  // Single-qubit gates.
  void apply_h(int q);
  void apply_x(int q);
  void apply_z(int q);
  void apply_cnot(int control, int target);
  void apply_cz(int a, int b);

  StateVector tensor(const StateVector& other) const;

 private:
  int num_qubits_ = 0;
  std::vector<cplx> amps_;
};

// Density operator, row-major dense matrix, same index convention.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(int num_qubits);
  DensityMatrix(int num_qubits, std::vector<cplx> elems);

  static DensityMatrix from_state(const StateVector& psi);

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return dim_; }
  cplx at(std::size_t r, std::size_t c) const { return elems_[r * dim_ + c]; }
  cplx& at(std::size_t r, std::size_t c) { return elems_[r * dim_ + c]; }
  const std::vector<cplx>& elems() const { return elems_; }

  double trace_real() const;
  // Positive semidefinite Hermitian with unit trace, all within tolerance.
  bool is_valid(double tol = 1e-10) const;

 private:
  int num_qubits_ = 0;
  std::size_t dim_ = 0;
  std::vector<cplx> elems_;
};

// Classical-quantum state: classical tuple, probability, quantum branch.
struct CqBranch {
  std::vector<std::int64_t> classical;
  double probability = 0.0;
  DensityMatrix state;
};

struct CqState {
  std::vector<CqBranch> branches;
  // Probabilities sum to 1 and classical tuples are distinct, within tol.
  bool is_valid(double tol = 1e-10) const;
};

// --- Construction --------------------------------------------------------

StateVector make_bell(BellLabel label);

// --- Measurement ---------------------------------------------------------

struct MeasureResult {
  int outcome = 0;
  StateVector post;  // renormalized, same register size
};

// Born-rule measurement of one qubit; deterministic given the unit-interval
// sample u (outcome 0 iff u < P[0]).
MeasureResult measure_qubit(const StateVector& state, int index, Basis basis, double u);

// As above but the measured qubit is removed from the register.
MeasureResult measure_and_remove(const StateVector& state, int index, Basis basis, double u);

struct ProjectResult {
  double probability = 0.0;
  StateVector post;  // renormalized; empty register when probability ~ 0
};

// Projects one qubit onto a chosen outcome without consuming randomness;
// used by the exact-enumeration experiments.
ProjectResult project_qubit(const StateVector& state, int index, Basis basis, int outcome);

// Exact outcome probabilities for measuring every qubit, qubit i in bases[i].
// Entry k is the probability of the outcome string spelled by k (qubit 0 is
// the most significant bit of k).
std::vector<double> outcome_distribution(const StateVector& state, const std::vector<Basis>& bases);
std::vector<double> outcome_distribution(const DensityMatrix& rho, const std::vector<Basis>& bases);

// --- Entangling-circuit replacement for controlled-Z ----------------------

struct Fig1Result {
  int h_a = 0;
  int h_b = 0;
  StateVector post;  // two qubits
};

// Consumes a fresh EPR pair: H on the second EPR half, CNOTs onto the input
// qubits, which are then measured out. Satisfies, up to global phase,
//   post = (X^h_a Z^h_b (x) X^h_b Z^h_a) . CZ . state
// with each (h_a, h_b) branch occurring with probability 1/4.
Fig1Result apply_entangling_circuit(const StateVector& two_qubit_state, double u1, double u2);

// --- Metrics -------------------------------------------------------------

double fidelity(const StateVector& a, const StateVector& b);  // |<a|b>|^2

// (1/2) tr|rho - sigma| via eigenvalues of the Hermitian difference.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

}  // namespace diot::qsim
