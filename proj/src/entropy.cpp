#include "diot/entropy.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace diot::entropy {

namespace {

double log2_safe(double x) { return std::log2(x); }

struct Cell {
  double p;  // joint mass
  double q;  // conditioning marginal P_Y(y)
  double ratio() const { return p / q; }
};

std::vector<Cell> positive_cells(const JointDistribution& d) {
  std::vector<double> py(d.ny, 0.0);
  for (std::size_t x = 0; x < d.nx; ++x)
    for (std::size_t y = 0; y < d.ny; ++y) py[y] += d.at(x, y);
  std::vector<Cell> cells;
  cells.reserve(d.nx * d.ny);
  for (std::size_t x = 0; x < d.nx; ++x)
    for (std::size_t y = 0; y < d.ny; ++y)
      if (d.at(x, y) > 0.0) cells.push_back({d.at(x, y), py[y]});
  return cells;
}

}  // namespace

double JointDistribution::marginal_y(std::size_t y) const {
  double s = 0.0;
  for (std::size_t x = 0; x < nx; ++x) s += at(x, y);
  return s;
}

double JointDistribution::total() const { return std::accumulate(p.begin(), p.end(), 0.0); }

void JointDistribution::validate(double tol) const {
  if (p.size() != nx * ny) throw std::invalid_argument("JointDistribution: table size mismatch");
  for (double v : p)
    if (v < -tol) throw std::invalid_argument("JointDistribution: negative probability");
  if (std::abs(total() - 1.0) > tol)
    throw std::invalid_argument("JointDistribution: probabilities do not sum to 1");
}

JointDistribution JointDistribution::unconditional(std::vector<double> probs) {
  JointDistribution d;
  d.nx = probs.size();
  d.ny = 1;
  d.p = std::move(probs);
  return d;
}

double min_entropy(const JointDistribution& d) {
  auto cells = positive_cells(d);
  if (cells.empty()) throw std::invalid_argument("min_entropy: empty support");
  double max_ratio = 0.0;
  for (const auto& c : cells) max_ratio = std::max(max_ratio, c.ratio());
  return -log2_safe(max_ratio);
}

double max_entropy(const JointDistribution& d) {
  bool any = false;
  double best = 0.0;
  for (std::size_t y = 0; y < d.ny; ++y) {
    std::size_t support = 0;
    for (std::size_t x = 0; x < d.nx; ++x)
      if (d.at(x, y) > 0.0) ++support;
    if (support == 0) continue;
    any = true;
    best = std::max(best, log2_safe(static_cast<double>(support)));
  }
  if (!any) throw std::invalid_argument("max_entropy: empty support");
  return best;
}

double smooth_min_entropy(const JointDistribution& d, double eps) {
  if (eps < 0.0 || eps >= 1.0) throw std::invalid_argument("smooth_min_entropy: need 0 <= eps < 1");
  auto cells = positive_cells(d);
  if (cells.empty()) throw std::invalid_argument("smooth_min_entropy: empty support");
  double mass = 0.0;
  for (const auto& c : cells) mass += c.p;
  if (eps >= mass)
    throw std::invalid_argument("smooth_min_entropy: budget consumes the whole distribution");
  // Water-filling: the optimal event caps every ratio p/q at a common
  // threshold t; trimming mass p - t*q from a cell is always cheaper than
  // removing the cell outright. cost(t) is piecewise linear and decreasing,
  // so walk its breakpoints and solve the crossing segment exactly.
  std::sort(cells.begin(), cells.end(),
            [](const Cell& a, const Cell& b) { return a.ratio() > b.ratio(); });
  double pref_p = 0.0, pref_q = 0.0;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    pref_p += cells[k].p;
    pref_q += cells[k].q;
    const double next_ratio = (k + 1 < cells.size()) ? cells[k + 1].ratio() : 0.0;
    const double t = (pref_p - eps) / pref_q;
    if (t >= next_ratio) return -log2_safe(t);
  }
  throw std::logic_error("smooth_min_entropy: threshold search failed");
}

// --- Splitting ---------------------------------------------------------------

double split_entropy_for_choice(const TripleDistribution& d, const std::vector<int>& choice,
                                double eps) {
  if (choice.size() != d.nz) throw std::invalid_argument("split: choice map size mismatch");
  // W = X_{1-C(z)}; conditioning on (Z, C) equals conditioning on Z because C
  // is a function of Z. W indices never get compared across z values, so the
  // two alphabets can share index space.
  JointDistribution j;
  j.nx = std::max(d.n0, d.n1);
  j.ny = d.nz;
  j.p.assign(j.nx * j.ny, 0.0);
  for (std::size_t z = 0; z < d.nz; ++z) {
    const bool keep_x0 = choice[z] == 1;  // C=1 -> W = X_0
    for (std::size_t x0 = 0; x0 < d.n0; ++x0)
      for (std::size_t x1 = 0; x1 < d.n1; ++x1)
        j.at(keep_x0 ? x0 : x1, z) += d.at(x0, x1, z);
  }
  return smooth_min_entropy(j, eps);
}

SplitResult split_choice_bit(const TripleDistribution& d, double alpha, double eps,
                             double eps_prime) {
  if (eps_prime <= 0.0) throw std::invalid_argument("split_choice_bit: eps_prime must be positive");
  // Hypothesis: H^eps(X0 X1 | Z) >= alpha.
  JointDistribution joint;
  joint.nx = d.n0 * d.n1;
  joint.ny = d.nz;
  joint.p.assign(joint.nx * joint.ny, 0.0);
  for (std::size_t x0 = 0; x0 < d.n0; ++x0)
    for (std::size_t x1 = 0; x1 < d.n1; ++x1)
      for (std::size_t z = 0; z < d.nz; ++z) joint.at(x0 * d.n1 + x1, z) = d.at(x0, x1, z);
  const double joint_h = smooth_min_entropy(joint, eps);
  if (joint_h < alpha - 1e-12)
    throw std::invalid_argument("split_choice_bit: hypothesis H^eps(X0X1|Z) >= alpha violated");

  // C(z) = 1 exactly when X0 alone already carries half the entropy at z.
  std::vector<int> choice(d.nz, 0);
  for (std::size_t z = 0; z < d.nz; ++z) {
    double pz = 0.0, max_x0 = 0.0;
    for (std::size_t x0 = 0; x0 < d.n0; ++x0) {
      double px0 = 0.0;
      for (std::size_t x1 = 0; x1 < d.n1; ++x1) px0 += d.at(x0, x1, z);
      pz += px0;
      max_x0 = std::max(max_x0, px0);
    }
    if (pz <= 0.0) continue;
    const double h_x0 = -log2_safe(max_x0 / pz);
    choice[z] = h_x0 >= alpha / 2.0 ? 1 : 0;
  }

  SplitResult res;
  res.choice = choice;
  res.achieved = split_entropy_for_choice(d, choice, eps + eps_prime);
  res.bound = alpha / 2.0 - 1.0 - log2_safe(1.0 / eps_prime);
  res.bound_holds = res.achieved >= res.bound - 1e-12;
  return res;
}

// --- Privacy amplification ---------------------------------------------------

double pa_bound(double h_smooth, int q, int l, double eps) {
  return 0.5 * std::exp2(-0.5 * (h_smooth - q - l)) + 2.0 * eps;
}

namespace {

double trace_norm(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

// D(rho_{F(X)UE}, 2^-l I (x) rho_{UE}) for one fixed hash function.
double pa_distance_for_hash(const ClassicalQuantumXUE& state, const hashing::HashFunction& f,
                            int l) {
  const auto edim = static_cast<Eigen::Index>(state.e_dim());
  std::set<std::uint32_t> us;
  for (const auto& br : state.branches) us.insert(br.u);
  double dist = 0.0;
  for (std::uint32_t u : us) {
    std::vector<Eigen::MatrixXcd> rho_su(std::size_t{1} << l,
                                         Eigen::MatrixXcd::Zero(edim, edim));
    Eigen::MatrixXcd rho_u = Eigen::MatrixXcd::Zero(edim, edim);
    for (const auto& br : state.branches) {
      if (br.u != u || br.probability <= 0.0) continue;
      Eigen::MatrixXcd e(edim, edim);
      for (Eigen::Index r = 0; r < edim; ++r)
        for (Eigen::Index c = 0; c < edim; ++c)
          e(r, c) = br.e.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
      const auto s = bits::to_value(f.apply(bits::from_value(br.x, state.x_bits)));
      rho_su[s] += br.probability * e;
      rho_u += br.probability * e;
    }
    const double scale = std::exp2(-l);
    for (const auto& block : rho_su) dist += 0.5 * trace_norm(block - scale * rho_u);
  }
  return dist;
}

}  // namespace

PaExactResult pa_exact_lhs(const ClassicalQuantumXUE& state, int l, FamilyMode mode,
                           int sample_count, std::uint64_t sample_seed) {
  const int n = state.x_bits;
  if (n < 1 || n > 6) throw std::invalid_argument("pa_exact_lhs: X alphabet limited to 6 bits");
  if (state.e_dim() > 4) throw std::invalid_argument("pa_exact_lhs: E register limited to 2 qubits");

  if (mode == FamilyMode::Sampled) {
    if (sample_count < 1) throw std::invalid_argument("pa_exact_lhs: sample count required");
    Rng rng(sample_seed);
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < sample_count; ++i) {
      const double v = pa_distance_for_hash(state, hashing::sample_hash(n, l, rng), l);
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / sample_count;
    const double var = std::max(0.0, sum_sq / sample_count - mean * mean);
    PaExactResult res;
    res.distance = mean;
    res.std_error = std::sqrt(var / sample_count);
    return res;
  }

  const std::uint64_t family = std::uint64_t{1} << (n * l);
  if (n * l > 20) throw std::invalid_argument("pa_exact_lhs: family too large to enumerate");
  double sum = 0.0;
  std::uint64_t used = 0;
  for (std::uint64_t k = 0; k < family; ++k) {
    auto f = hashing::hash_from_index(n, l, k);
    if (mode == FamilyMode::FullRankOnly && !hashing::is_full_rank(f)) continue;
    sum += pa_distance_for_hash(state, f, l);
    ++used;
  }
  if (used == 0) throw std::invalid_argument("pa_exact_lhs: empty family slice");
  return {sum / static_cast<double>(used), std::nullopt};
}

double min_entropy_x_given_u(const ClassicalQuantumXUE& state) {
  std::set<std::uint32_t> us, xs;
  for (const auto& br : state.branches) {
    us.insert(br.u);
    xs.insert(br.x);
  }
  JointDistribution d;
  d.nx = std::size_t{1} << state.x_bits;
  d.ny = us.size();
  d.p.assign(d.nx * d.ny, 0.0);
  std::size_t uidx = 0;
  for (std::uint32_t u : us) {
    for (const auto& br : state.branches)
      if (br.u == u) d.at(br.x, uidx) += br.probability;
    ++uidx;
  }
  return min_entropy(d);
}

// --- Relation checks ---------------------------------------------------------

UncertaintyResult check_uncertainty_relation(const qsim::DensityMatrix& rho, double lambda) {
  const int n = rho.num_qubits();
  if (n < 1 || n > 6)
    throw std::invalid_argument("check_uncertainty_relation: register limited to 6 qubits");
  if (lambda <= 0.0 || lambda >= 1.0)
    throw std::invalid_argument("check_uncertainty_relation: lambda out of range");
  const std::size_t dim = std::size_t{1} << n;

  JointDistribution d;
  d.nx = dim;       // outcome string
  d.ny = dim;       // basis string Theta, uniform
  d.p.assign(dim * dim, 0.0);
  const double ptheta = 1.0 / static_cast<double>(dim);
  for (std::size_t theta = 0; theta < dim; ++theta) {
    std::vector<qsim::Basis> bases(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q)
      bases[static_cast<std::size_t>(q)] =
          qsim::basis_from_bit((theta >> (n - 1 - q)) & 1 ? 1 : 0);
    auto probs = qsim::outcome_distribution(rho, bases);
    for (std::size_t x = 0; x < dim; ++x) d.at(x, theta) = ptheta * probs[x];
  }

  UncertaintyResult res;
  const double denom = 2.0 - std::log2(lambda);
  res.eps = std::exp(-(lambda * lambda * n) / (32.0 * denom * denom));
  res.bound = (0.5 - 2.0 * lambda) * n;
  // eps can round to 1 for tiny lambda*n; the relation is then vacuous too.
  res.h_eps = res.eps < 1.0 ? smooth_min_entropy(d, res.eps) : std::numeric_limits<double>::infinity();
  res.holds = res.bound <= 0.0 || res.h_eps >= res.bound - 1e-9;
  return res;
}

ChainRuleResult check_chain_rule(const JointDistribution& d, double eps, double eps_prime) {
  if (eps <= 0.0 || eps_prime <= 0.0)
    throw std::invalid_argument("check_chain_rule: eps and eps_prime must be positive");
  ChainRuleResult res;
  res.lhs = smooth_min_entropy(d, eps + eps_prime);

  // H^eps(XY) treats the pair as one unconditional variable.
  JointDistribution xy = JointDistribution::unconditional(d.p);
  const double h_xy = smooth_min_entropy(xy, eps);

  // H_0(Y) from the Y marginal.
  JointDistribution ymarg;
  ymarg.nx = d.ny;
  ymarg.ny = 1;
  ymarg.p.assign(d.ny, 0.0);
  for (std::size_t y = 0; y < d.ny; ++y) ymarg.p[y] = d.marginal_y(y);
  const double h0_y = max_entropy(ymarg);

  res.rhs = h_xy - h0_y - std::log2(1.0 / eps_prime);
  res.holds = res.lhs > res.rhs;
  return res;
}

}  // namespace diot::entropy
