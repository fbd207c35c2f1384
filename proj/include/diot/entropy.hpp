#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "diot/hashing.hpp"
#include "diot/qsim.hpp"

namespace diot::entropy {

// Finite joint distribution of (X, Y); Y trivial (ny == 1) gives the
// unconditional forms. Probabilities are stored flat, p[x * ny + y].
struct JointDistribution {
  std::size_t nx = 0;
  std::size_t ny = 1;
  std::vector<double> p;

  double at(std::size_t x, std::size_t y) const { return p[x * ny + y]; }
  double& at(std::size_t x, std::size_t y) { return p[x * ny + y]; }
  double marginal_y(std::size_t y) const;
  double total() const;
  // Nonnegative, sums to one within tol.
  void validate(double tol = 1e-12) const;

  static JointDistribution unconditional(std::vector<double> probs);
};

// All entropies are in bits (base-2 logarithms).

// H_inf(X|Y) = min over y with positive mass of min_x -log2 P(x|y).
double min_entropy(const JointDistribution& d);

// H_0(X|Y) = max_y log2 |{x : P(x|y) > 0}|.
double max_entropy(const JointDistribution& d);

// Smooth min-entropy with events modeled as sub-normalized trimmings of the
// joint table: remove total mass <= eps, P_Y kept fixed in the denominator.
// The optimum caps the largest ratios P(x,y)/P_Y(y) at a common threshold
// (water-filling), solved exactly on the piecewise-linear cost curve.
double smooth_min_entropy(const JointDistribution& d, double eps);

// --- Min-entropy splitting -------------------------------------------------

// Distribution of (X0, X1, Z) as a flat table p[(x0 * n1 + x1) * nz + z].
struct TripleDistribution {
  std::size_t n0 = 0, n1 = 0, nz = 1;
  std::vector<double> p;
  double at(std::size_t x0, std::size_t x1, std::size_t z) const {
    return p[(x0 * n1 + x1) * nz + z];
  }
  double& at(std::size_t x0, std::size_t x1, std::size_t z) {
    return p[(x0 * n1 + x1) * nz + z];
  }
};

struct SplitResult {
  std::vector<int> choice;  // C(z) per z value
  double achieved;          // smooth min-entropy of X_{1-C} given (Z, C)
  double bound;             // alpha/2 - 1 - log2(1/eps_prime)
  bool bound_holds;
};

// Constructs the per-z choice bit C(z) = 1 iff H_inf(X0|Z=z) >= alpha/2 and
// evaluates the guaranteed bound at smoothing eps + eps_prime. Throws
// std::invalid_argument when the hypothesis H^eps_inf(X0 X1|Z) >= alpha
// fails for the supplied eps.
SplitResult split_choice_bit(const TripleDistribution& d, double alpha, double eps,
                             double eps_prime);

// Smooth min-entropy of X_{1-C} given (Z, C) for an arbitrary choice map;
// shared by the construction and the exhaustive test oracle.
double split_entropy_for_choice(const TripleDistribution& d, const std::vector<int>& choice,
                                double eps);

// --- Privacy amplification -------------------------------------------------

// Right side of the privacy-amplification bound:
//   (1/2) * 2^{-(h_smooth - q - l)/2} + 2 eps.
double pa_bound(double h_smooth, int q, int l, double eps);

enum class FamilyMode { Exhaustive, FullRankOnly, Sampled };

struct PaExactResult {
  double distance = 0.0;
  std::optional<double> std_error;  // present when sampled
};

// Cq-state over (X, U, E) for the exact left side: each branch is
// (x value, u value, probability, E state).
struct ClassicalQuantumXUE {
  int x_bits = 0;  // X takes n-bit values
  struct Branch {
    std::uint32_t x = 0;
    std::uint32_t u = 0;
    double probability = 0.0;
    qsim::DensityMatrix e;  // same dimension across branches; 1x1 when q = 0
  };
  std::vector<Branch> branches;
  std::size_t e_dim() const { return branches.empty() ? 1 : branches.front().e.dim(); }
};

// Exact trace distance D(rho_{F(X)FUE}, 2^-l * I (x) rho_{FUE}) averaged over
// the hash family: exhaustive when n*l is small, otherwise sampled with a
// reported standard error.
PaExactResult pa_exact_lhs(const ClassicalQuantumXUE& state, int l, FamilyMode mode,
                           int sample_count = 0, std::uint64_t sample_seed = 0);

// Classical min-entropy H_inf(X|U) of the cq-state's classical marginal.
double min_entropy_x_given_u(const ClassicalQuantumXUE& state);

// --- Relation checks ---------------------------------------------------------

struct UncertaintyResult {
  double h_eps;   // measured-outcome smooth min-entropy H^eps(X|Theta)
  double eps;     // exp(-lambda^2 n / (32 (2 - log2 lambda)^2))
  double bound;   // (1/2 - 2 lambda) n
  bool holds;
};

// Exhaustive check of the measurement uncertainty relation for an n-qubit
// state, n <= 6: measure in a uniformly random basis string Theta.
UncertaintyResult check_uncertainty_relation(const qsim::DensityMatrix& rho, double lambda);

struct ChainRuleResult {
  double lhs;  // H^{eps+eps'}(X|Y)
  double rhs;  // H^eps(XY) - H_0(Y) - log2(1/eps')
  bool holds;  // lhs > rhs
};

ChainRuleResult check_chain_rule(const JointDistribution& d, double eps, double eps_prime);

}  // namespace diot::entropy
