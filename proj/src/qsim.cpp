#include "diot/qsim.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <set>
#include <stdexcept>

namespace diot::qsim {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void check_qubit(const char* op, int q, int n) {
  if (q < 0 || q >= n) throw std::out_of_range(std::string(op) + ": qubit index out of range");
}

std::size_t bit_mask(int q, int n) { return std::size_t{1} << (n - 1 - q); }

}  // namespace

StateVector::StateVector(int num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxQubits)
    throw std::invalid_argument("StateVector: register size out of range");
  amps_.assign(std::size_t{1} << num_qubits, cplx{0.0, 0.0});
  amps_[0] = 1.0;
}

StateVector::StateVector(int num_qubits, std::vector<cplx> amps)
    : num_qubits_(num_qubits), amps_(std::move(amps)) {
  if (num_qubits < 1 || num_qubits > kMaxQubits)
    throw std::invalid_argument("StateVector: register size out of range");
  if (amps_.size() != (std::size_t{1} << num_qubits))
    throw std::invalid_argument("StateVector: amplitude count does not match register size");
}

StateVector StateVector::computational(int num_qubits, std::uint32_t basis_index) {
  StateVector s(num_qubits);
  s.amps_[0] = 0.0;
  s.amps_[basis_index] = 1.0;
  return s;
}

double StateVector::norm_sq() const {
  double n = 0.0;
  for (const auto& a : amps_) n += std::norm(a);
  return n;
}

void StateVector::renormalize() {
  const double n = std::sqrt(norm_sq());
  if (n <= 0.0) throw std::runtime_error("StateVector: cannot renormalize zero vector");
  for (auto& a : amps_) a /= n;
}

void StateVector::apply_h(int q) {
  check_qubit("apply_h", q, num_qubits_);
  const std::size_t mask = bit_mask(q, num_qubits_);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if (i & mask) continue;
    const cplx a0 = amps_[i];
    const cplx a1 = amps_[i | mask];
    amps_[i] = (a0 + a1) * kInvSqrt2;
    amps_[i | mask] = (a0 - a1) * kInvSqrt2;
  }
}

void StateVector::apply_x(int q) {
  check_qubit("apply_x", q, num_qubits_);
  const std::size_t mask = bit_mask(q, num_qubits_);
  for (std::size_t i = 0; i < amps_.size(); ++i)
    if (!(i & mask)) std::swap(amps_[i], amps_[i | mask]);
}

void StateVector::apply_z(int q) {
  check_qubit("apply_z", q, num_qubits_);
  const std::size_t mask = bit_mask(q, num_qubits_);
  for (std::size_t i = 0; i < amps_.size(); ++i)
    if (i & mask) amps_[i] = -amps_[i];
}

void StateVector::apply_cnot(int control, int target) {
  check_qubit("apply_cnot", control, num_qubits_);
  check_qubit("apply_cnot", target, num_qubits_);
  const std::size_t cm = bit_mask(control, num_qubits_);
  const std::size_t tm = bit_mask(target, num_qubits_);
  for (std::size_t i = 0; i < amps_.size(); ++i)
    if ((i & cm) && !(i & tm)) std::swap(amps_[i], amps_[i | tm]);
}

void StateVector::apply_cz(int a, int b) {
  check_qubit("apply_cz", a, num_qubits_);
  check_qubit("apply_cz", b, num_qubits_);
  const std::size_t am = bit_mask(a, num_qubits_);
  const std::size_t bm = bit_mask(b, num_qubits_);
  for (std::size_t i = 0; i < amps_.size(); ++i)
    if ((i & am) && (i & bm)) amps_[i] = -amps_[i];
}

StateVector StateVector::tensor(const StateVector& other) const {
  const int n = num_qubits_ + other.num_qubits_;
  if (n > kMaxQubits) throw std::invalid_argument("tensor: combined register too large");
  std::vector<cplx> out(std::size_t{1} << n);
  for (std::size_t i = 0; i < amps_.size(); ++i)
    for (std::size_t j = 0; j < other.amps_.size(); ++j)
      out[(i << other.num_qubits_) | j] = amps_[i] * other.amps_[j];
  return StateVector(n, std::move(out));
}

DensityMatrix::DensityMatrix(int num_qubits) : num_qubits_(num_qubits) {
  // num_qubits == 0 is the trivial one-dimensional register (classical-only).
  if (num_qubits < 0 || num_qubits > kMaxQubits)
    throw std::invalid_argument("DensityMatrix: register size out of range");
  dim_ = std::size_t{1} << num_qubits;
  elems_.assign(dim_ * dim_, cplx{0.0, 0.0});
}

DensityMatrix::DensityMatrix(int num_qubits, std::vector<cplx> elems) : DensityMatrix(num_qubits) {
  if (elems.size() != dim_ * dim_)
    throw std::invalid_argument("DensityMatrix: element count does not match register size");
  elems_ = std::move(elems);
}

DensityMatrix DensityMatrix::from_state(const StateVector& psi) {
  DensityMatrix rho(psi.num_qubits());
  const auto& a = psi.amps();
  for (std::size_t r = 0; r < rho.dim_; ++r)
    for (std::size_t c = 0; c < rho.dim_; ++c) rho.at(r, c) = a[r] * std::conj(a[c]);
  return rho;
}

double DensityMatrix::trace_real() const {
  double t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += at(i, i).real();
  return t;
}

bool DensityMatrix::is_valid(double tol) const {
  if (std::abs(trace_real() - 1.0) > tol) return false;
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = r; c < dim_; ++c)
      if (std::abs(at(r, c) - std::conj(at(c, r))) > tol) return false;
  Eigen::MatrixXcd m(dim_, dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = at(r, c);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > -tol;
}

bool CqState::is_valid(double tol) const {
  double total = 0.0;
  std::set<std::vector<std::int64_t>> seen;
  for (const auto& br : branches) {
    if (br.probability < -tol) return false;
    total += br.probability;
    if (!seen.insert(br.classical).second) return false;  // duplicate tuple
  }
  return std::abs(total - 1.0) <= tol;
}

StateVector make_bell(BellLabel label) {
  StateVector s(2, {kInvSqrt2, 0.0, 0.0, kInvSqrt2});  // (|00> + |11>)/sqrt(2)
  if (label.v_beta) s.apply_x(0);
  if (label.v_alpha) s.apply_z(0);
  return s;
}

namespace {

// Probability that `index`-th qubit yields 0 in `basis`, plus a rotated copy
// in which that measurement is computational.
std::pair<double, StateVector> rotate_for_measure(const StateVector& state, int index, Basis basis) {
  StateVector rotated = state;
  if (basis == Basis::Hadamard) rotated.apply_h(index);
  const std::size_t mask = bit_mask(index, rotated.num_qubits());
  double p0 = 0.0;
  for (std::size_t i = 0; i < rotated.amps().size(); ++i)
    if (!(i & mask)) p0 += std::norm(rotated.amps()[i]);
  return {p0, std::move(rotated)};
}

}  // namespace

MeasureResult measure_qubit(const StateVector& state, int index, Basis basis, double u) {
  check_qubit("measure_qubit", index, state.num_qubits());
  auto [p0, rotated] = rotate_for_measure(state, index, basis);
  const int outcome = (u < p0) ? 0 : 1;
  const std::size_t mask = bit_mask(index, rotated.num_qubits());
  for (std::size_t i = 0; i < rotated.amps().size(); ++i) {
    const bool one = (i & mask) != 0;
    if (one != (outcome == 1)) rotated.amps()[i] = 0.0;
  }
  rotated.renormalize();
  if (basis == Basis::Hadamard) rotated.apply_h(index);  // undo the frame rotation
  return {outcome, std::move(rotated)};
}

MeasureResult measure_and_remove(const StateVector& state, int index, Basis basis, double u) {
  check_qubit("measure_and_remove", index, state.num_qubits());
  if (state.num_qubits() == 1) throw std::invalid_argument("measure_and_remove: cannot empty the register");
  auto [p0, rotated] = rotate_for_measure(state, index, basis);
  const int outcome = (u < p0) ? 0 : 1;
  const int n = rotated.num_qubits();
  const std::size_t mask = bit_mask(index, n);
  const std::size_t low = mask - 1;           // bits below the measured qubit
  const std::size_t high = ~low & ~mask;      // bits above
  std::vector<cplx> kept(std::size_t{1} << (n - 1));
  for (std::size_t i = 0; i < rotated.amps().size(); ++i) {
    if (((i & mask) != 0) != (outcome == 1)) continue;
    kept[((i & high) >> 1) | (i & low)] = rotated.amps()[i];
  }
  StateVector post(n - 1, std::move(kept));
  post.renormalize();
  return {outcome, std::move(post)};
}

ProjectResult project_qubit(const StateVector& state, int index, Basis basis, int outcome) {
  check_qubit("project_qubit", index, state.num_qubits());
  auto [p0, rotated] = rotate_for_measure(state, index, basis);
  const double prob = outcome == 0 ? p0 : 1.0 - p0;
  ProjectResult res;
  res.probability = prob;
  if (prob < 1e-14) return res;
  const std::size_t mask = bit_mask(index, rotated.num_qubits());
  for (std::size_t i = 0; i < rotated.amps().size(); ++i) {
    const bool one = (i & mask) != 0;
    if (one != (outcome == 1)) rotated.amps()[i] = 0.0;
  }
  rotated.renormalize();
  if (basis == Basis::Hadamard) rotated.apply_h(index);
  res.post = std::move(rotated);
  return res;
}

std::vector<double> outcome_distribution(const StateVector& state, const std::vector<Basis>& bases) {
  if (static_cast<int>(bases.size()) != state.num_qubits())
    throw std::invalid_argument("outcome_distribution: basis count does not match register size");
  StateVector rotated = state;
  for (int q = 0; q < state.num_qubits(); ++q)
    if (bases[static_cast<std::size_t>(q)] == Basis::Hadamard) rotated.apply_h(q);
  std::vector<double> probs(rotated.amps().size());
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = std::norm(rotated.amps()[i]);
  return probs;
}

std::vector<double> outcome_distribution(const DensityMatrix& rho, const std::vector<Basis>& bases) {
  if (static_cast<int>(bases.size()) != rho.num_qubits())
    throw std::invalid_argument("outcome_distribution: basis count does not match register size");
  const int n = rho.num_qubits();
  const std::size_t dim = rho.dim();
  // <s_theta| rho |s_theta> where |s_theta> = (x)_q H^{theta_q} |s_q>.
  std::vector<double> probs(dim, 0.0);
  std::vector<cplx> bra(dim);
  for (std::size_t s = 0; s < dim; ++s) {
    for (std::size_t k = 0; k < dim; ++k) {
      cplx amp = 1.0;
      for (int q = 0; q < n; ++q) {
        const std::size_t m = bit_mask(q, n);
        const int sq = (s & m) ? 1 : 0;
        const int kq = (k & m) ? 1 : 0;
        if (bases[static_cast<std::size_t>(q)] == Basis::Computational) {
          if (sq != kq) {
            amp = 0.0;
            break;
          }
        } else {
          amp *= (sq == 1 && kq == 1) ? -kInvSqrt2 : kInvSqrt2;
        }
      }
      bra[k] = amp;
    }
    cplx val = 0.0;
    for (std::size_t r = 0; r < dim; ++r) {
      if (bra[r] == cplx{0.0, 0.0}) continue;
      for (std::size_t c = 0; c < dim; ++c) {
        if (bra[c] == cplx{0.0, 0.0}) continue;
        val += std::conj(bra[r]) * rho.at(r, c) * bra[c];
      }
    }
    probs[s] = val.real();
  }
  return probs;
}

Fig1Result apply_entangling_circuit(const StateVector& two_qubit_state, double u1, double u2) {
  if (two_qubit_state.num_qubits() != 2)
    throw std::invalid_argument("apply_entangling_circuit: expected a two-qubit state");
  // Register layout: [A, B, e1, e2]; e1/e2 are the fresh EPR halves that the
  // two input qubits are teleported onto.
  StateVector epr = make_bell({0, 0});
  StateVector full = two_qubit_state.tensor(epr);
  full.apply_h(3);         // H on e2
  full.apply_cnot(2, 0);   // e1 controls onto A
  full.apply_cnot(3, 1);   // e2 controls onto B
  auto ra = measure_and_remove(full, 0, Basis::Computational, u1);
  auto rb = measure_and_remove(ra.post, 0, Basis::Computational, u2);  // former B is now qubit 0
  return {ra.outcome, rb.outcome, std::move(rb.post)};
}

double fidelity(const StateVector& a, const StateVector& b) {
  if (a.num_qubits() != b.num_qubits()) throw std::invalid_argument("fidelity: dimension mismatch");
  cplx ip = 0.0;
  for (std::size_t i = 0; i < a.amps().size(); ++i) ip += std::conj(a.amps()[i]) * b.amps()[i];
  return std::norm(ip);
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw std::invalid_argument("trace_distance: dimension mismatch");
  const auto dim = static_cast<Eigen::Index>(rho.dim());
  Eigen::MatrixXcd diff(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c)
      diff(r, c) = rho.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) -
                   sigma.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace diot::qsim
