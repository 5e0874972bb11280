#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "frametop/errors.hpp"
#include "frametop/moment_flow.hpp"
#include "frametop/schur_horn.hpp"

namespace frametop {

// A critical component of the level energy: coordinates split into blocks on
// which the shift a is constant (value levels[i]), with capacities[i] units of
// rank placed on block i. Blocks are kept in strictly decreasing level order.
struct StratumDescriptor {
  std::vector<std::vector<int>> blocks;  // 0-based coordinate indices
  std::vector<int> capacities;
  RealVector levels;  // one alpha per block, strictly decreasing
  RealVector shift;   // a_j = levels[i] for j in blocks[i]
  int codim_complex = 0;

  double energy_level() const { return shift.squaredNorm(); }
  int n() const { return static_cast<int>(shift.size()); }
  int block_count() const { return static_cast<int>(blocks.size()); }
};

// Sum over i<j of c_i (m_j - c_j), blocks ordered by decreasing level. For two
// blocks (m_1, m) with capacities (k-c, c) this reduces to (k-c)(m-c), i.e.
// c'(n-k-m'+c') counted from the top block.
inline int stratum_codim(const std::vector<int>& multiplicities,
                         const std::vector<int>& capacities) {
  if (multiplicities.size() != capacities.size())
    throw BadComposition("multiplicities and capacities differ in length");
  for (size_t i = 0; i < multiplicities.size(); ++i) {
    if (multiplicities[i] <= 0)
      throw BadComposition("block multiplicity must be positive");
    if (capacities[i] < 0 || capacities[i] > multiplicities[i])
      throw BadComposition("capacity " + std::to_string(capacities[i]) +
                           " outside [0, " + std::to_string(multiplicities[i]) + "]");
  }
  int codim = 0;
  for (size_t i = 0; i < capacities.size(); ++i)
    for (size_t j = i + 1; j < capacities.size(); ++j)
      codim += capacities[i] * (multiplicities[j] - capacities[j]);
  return codim;
}

namespace detail {

constexpr double kLevelCollisionTol = 1e-9;

// Assemble a descriptor from an unordered partition + capacities; returns
// nothing when levels collide (the merged partition already represents that
// critical set) or the per-block diagonal leaves [0,1].
inline std::optional<StratumDescriptor> make_descriptor(
    const NormVector& nv, const std::vector<std::vector<int>>& blocks,
    const std::vector<int>& caps) {
  const size_t ell = blocks.size();
  std::vector<double> alpha(ell);
  for (size_t i = 0; i < ell; ++i) {
    double s = 0;
    for (int j : blocks[i]) s += nv.d(j);
    alpha[i] = (caps[i] - s) / static_cast<double>(blocks[i].size());
  }
  for (size_t i = 0; i < ell; ++i)
    for (size_t j = i + 1; j < ell; ++j)
      if (std::abs(alpha[i] - alpha[j]) <= kLevelCollisionTol) return std::nullopt;
  for (size_t i = 0; i < ell; ++i)
    for (int j : blocks[i]) {
      const double v = nv.d(j) + alpha[i];
      if (v < -kLevelCollisionTol || v > 1.0 + kLevelCollisionTol)
        return std::nullopt;
    }

  std::vector<size_t> order(ell);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return alpha[a] > alpha[b]; });

  StratumDescriptor desc;
  desc.blocks.reserve(ell);
  desc.capacities.reserve(ell);
  desc.levels.resize(ell);
  desc.shift = RealVector::Zero(nv.n());
  std::vector<int> mult;
  mult.reserve(ell);
  for (size_t r = 0; r < ell; ++r) {
    const size_t i = order[r];
    desc.blocks.push_back(blocks[i]);
    desc.capacities.push_back(caps[i]);
    desc.levels(r) = alpha[i];
    mult.push_back(static_cast<int>(blocks[i].size()));
    for (int j : blocks[i]) desc.shift(j) = alpha[i];
  }
  desc.codim_complex = stratum_codim(mult, desc.capacities);
  return desc;
}

inline bool shift_lex_less(const RealVector& a, const RealVector& b) {
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    if (a(j) < b(j)) return true;
    if (a(j) > b(j)) return false;
  }
  return false;
}

}  // namespace detail

// All critical components of f = ||mu - d||^2: a partition of {0..n-1} into
// blocks carrying capacities summing to k, with level alpha_i forced by the
// trace condition on each block. Partitions enumerate via restricted growth
// strings; capacity splits recurse with pruning.
inline std::vector<StratumDescriptor> enumerate_strata(const NormVector& nv,
                                                       double tolerance = tol::poly) {
  if (!in_polytope(nv, tolerance))
    throw NotInPolytope("target vector outside the diagonal polytope");
  const int n = nv.n();
  if (n > 9) throw TooLarge("stratum enumeration limited to n <= 9");

  std::vector<StratumDescriptor> out;
  std::vector<int> rgs(n, 0);
  std::vector<std::vector<int>> blocks;
  std::vector<int> caps;

  auto assign_caps = [&](auto&& self, size_t b, int remaining, int tail_room) -> void {
    if (b == blocks.size()) {
      if (remaining == 0)
        if (auto desc = detail::make_descriptor(nv, blocks, caps))
          out.push_back(std::move(*desc));
      return;
    }
    const int m = static_cast<int>(blocks[b].size());
    const int lo = std::max(0, remaining - (tail_room - m));
    const int hi = std::min(m, remaining);
    for (int c = lo; c <= hi; ++c) {
      caps[b] = c;
      self(self, b + 1, remaining - c, tail_room - m);
    }
  };

  auto visit_partition = [&]() {
    const int ell = 1 + *std::max_element(rgs.begin(), rgs.end());
    blocks.assign(ell, {});
    for (int j = 0; j < n; ++j) blocks[rgs[j]].push_back(j);
    caps.assign(ell, 0);
    assign_caps(assign_caps, 0, nv.k, n);
  };

  // iterate restricted growth strings: rgs[0] = 0, rgs[i] <= 1 + max(prefix)
  while (true) {
    visit_partition();
    int i = n - 1;
    for (; i > 0; --i) {
      int prefix_max = 0;
      for (int j = 0; j < i; ++j) prefix_max = std::max(prefix_max, rgs[j]);
      if (rgs[i] <= prefix_max) break;
    }
    if (i == 0) break;
    ++rgs[i];
    std::fill(rgs.begin() + i + 1, rgs.end(), 0);
  }

  std::sort(out.begin(), out.end(), [](const StratumDescriptor& a,
                                       const StratumDescriptor& b) {
    if (a.codim_complex != b.codim_complex) return a.codim_complex < b.codim_complex;
    const double ea = a.energy_level(), eb = b.energy_level();
    if (std::abs(ea - eb) > 1e-12) return ea < eb;
    return detail::shift_lex_less(a.shift, b.shift);
  });
  return out;
}

namespace detail {

inline void validate_descriptor(const StratumDescriptor& desc, const NormVector& nv) {
  const int n = nv.n();
  if (desc.n() != n || desc.block_count() == 0 ||
      desc.block_count() != static_cast<int>(desc.capacities.size()) ||
      desc.block_count() != desc.levels.size())
    throw InfeasibleDescriptor("descriptor shape inconsistent with target");
  std::vector<bool> seen(n, false);
  int total_cap = 0;
  for (int i = 0; i < desc.block_count(); ++i) {
    const auto& blk = desc.blocks[i];
    if (blk.empty()) throw InfeasibleDescriptor("empty block");
    double s = 0;
    for (int j : blk) {
      if (j < 0 || j >= n || seen[j])
        throw InfeasibleDescriptor("blocks do not partition the coordinates");
      seen[j] = true;
      s += nv.d(j);
    }
    const int c = desc.capacities[i];
    if (c < 0 || c > static_cast<int>(blk.size()))
      throw InfeasibleDescriptor("capacity outside block size");
    total_cap += c;
    const double alpha = (c - s) / static_cast<double>(blk.size());
    if (std::abs(alpha - desc.levels(i)) > 1e-8)
      throw InfeasibleDescriptor("level inconsistent with the trace condition");
    if (i > 0 && !(desc.levels(i - 1) > desc.levels(i)))
      throw InfeasibleDescriptor("levels not strictly decreasing");
    for (int j : blk) {
      if (std::abs(desc.shift(j) - desc.levels(i)) > 1e-8)
        throw InfeasibleDescriptor("shift not constant at the block level");
      const double v = nv.d(j) + alpha;
      if (v < -kLevelCollisionTol || v > 1.0 + kLevelCollisionTol)
        throw InfeasibleDescriptor("per-block diagonal leaves [0,1]");
    }
  }
  for (int j = 0; j < n; ++j)
    if (!seen[j]) throw InfeasibleDescriptor("blocks do not cover the coordinates");
  if (total_cap != nv.k)
    throw InfeasibleDescriptor("capacities sum to " + std::to_string(total_cap) +
                               ", expected " + std::to_string(nv.k));
}

}  // namespace detail

// A point of the critical component: block-diagonal, with block i a projection
// of trace capacities[i] whose diagonal is d + levels[i] on the block,
// conjugated by random diagonal phases (which preserve the diagonal, so the
// point stays exactly on the critical level).
inline ProjectionMatrix critical_manifold_point(const StratumDescriptor& desc,
                                                const NormVector& nv,
                                                uint64_t seed) {
  detail::validate_descriptor(desc, nv);
  const int n = nv.n();
  Matrix p = Matrix::Zero(n, n);
  Rng rng(Rng::derive(seed, "critical-point"));
  for (int i = 0; i < desc.block_count(); ++i) {
    const auto& blk = desc.blocks[i];
    const int m = static_cast<int>(blk.size());
    NormVector sub;
    sub.k = desc.capacities[i];
    sub.d.resize(m);
    for (int r = 0; r < m; ++r)
      sub.d(r) = std::clamp(nv.d(blk[r]) + desc.levels(i), 0.0, 1.0);
    const Matrix q = construct_projection_with_diagonal(sub).m;
    Eigen::VectorXcd phase(m);
    for (int r = 0; r < m; ++r) {
      const double theta = 2.0 * M_PI * rng.next_double();
      phase(r) = Complex(std::cos(theta), std::sin(theta));
    }
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c)
        p(blk[r], blk[c]) = phase(r) * q(r, c) * std::conj(phase(c));
  }
  return {p};
}

// Independent check of the codimension formula: the finite-difference Hessian
// of the height h_a on the Grassmannian at a critical-component point. Each
// negative direction comes in real pairs, so the count halves to the complex
// index. Eigenvalues falling into the decision band abort rather than guess.
inline int hessian_index_oracle(const StratumDescriptor& desc, const NormVector& nv,
                                uint64_t seed) {
  if (nv.n() > 6) throw TooLarge("Hessian oracle limited to n <= 6");
  detail::validate_descriptor(desc, nv);
  const Eigen::Index n = nv.n();
  const Eigen::Index k = nv.k;
  const ProjectionMatrix p = critical_manifold_point(desc, nv, seed);
  const RealVector& a = desc.shift;

  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (p.m + p.m.adjoint()));
  Matrix v(n, k), w(n, n - k);  // range / kernel bases (ascending eigenvalues)
  for (Eigen::Index j = 0; j < n - k; ++j) w.col(j) = es.eigenvectors().col(j);
  for (Eigen::Index j = 0; j < k; ++j) v.col(j) = es.eigenvectors().col(n - k + j);

  const Eigen::Index dim = 2 * k * (n - k);
  if (dim == 0) return 0;
  std::vector<Matrix> basis;
  basis.reserve(dim);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index pp = 0; pp < k; ++pp)
    for (Eigen::Index qq = 0; qq < n - k; ++qq) {
      const Matrix outer = v.col(pp) * w.col(qq).adjoint();
      basis.push_back(inv_sqrt2 * (outer + outer.adjoint()));
      basis.push_back(inv_sqrt2 * Complex(0, 1) * (outer - outer.adjoint()));
    }

  const double h0 = a.dot(p.m.diagonal().real());
  const double eps = 1e-4;
  auto second_diff = [&](const Matrix& x) {
    const double hp = a.dot(nearest_projection(p.m + eps * x, k).m.diagonal().real());
    const double hm = a.dot(nearest_projection(p.m - eps * x, k).m.diagonal().real());
    return (hp - 2.0 * h0 + hm) / (eps * eps);
  };

  Eigen::MatrixXd hess(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) hess(i, i) = second_diff(basis[i]);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = i + 1; j < dim; ++j) {
      const double q = second_diff(basis[i] + basis[j]);
      hess(i, j) = hess(j, i) = 0.5 * (q - hess(i, i) - hess(j, j));
    }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> hes(hess);
  const Eigen::VectorXd lam = hes.eigenvalues();
  const double maxmag = lam.cwiseAbs().maxCoeff();
  if (maxmag <= 1e-12) return 0;  // constant height (single-block descriptor)
  const double thr = 1e-6 * maxmag;
  int negatives = 0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double mag = std::abs(lam(i));
    if (mag > thr / 3.0 && mag < 3.0 * thr)
      throw AmbiguousEigenvalue("Hessian eigenvalue " + std::to_string(lam(i)) +
                                " inside the decision band");
    if (lam(i) < -thr) ++negatives;
  }
  if (negatives % 2 != 0)
    throw AmbiguousEigenvalue("odd real negative count " +
                              std::to_string(negatives));
  return negatives / 2;
}

// Points attracted to the stratum satisfy exact dimension jumps against the
// block filtration: dim(range(P) ∩ span of blocks 1..j) = c_1 + ... + c_j,
// read off as the number of unit singular values of the row-restricted range
// basis.
inline bool stable_manifold_membership(const ProjectionMatrix& p,
                                       const StratumDescriptor& desc,
                                       double tol_rank) {
  if (p.n() != desc.n())
    throw DimensionMismatch("projection and descriptor differ in dimension");
  const Eigen::Index n = p.n();
  const Eigen::Index k = p.rank_k();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (p.m + p.m.adjoint()));
  const Matrix v = es.eigenvectors().rightCols(k);
  std::vector<int> rows;
  int expected = 0;
  for (int i = 0; i < desc.block_count(); ++i) {
    for (int j : desc.blocks[i]) rows.push_back(j);
    expected += desc.capacities[i];
    Matrix sub(rows.size(), k);
    for (size_t r = 0; r < rows.size(); ++r) sub.row(r) = v.row(rows[r]);
    Eigen::JacobiSVD<Matrix> svd(sub);
    int hits = 0;
    for (Eigen::Index s = 0; s < svd.singularValues().size(); ++s)
      if (svd.singularValues()(s) >= 1.0 - tol_rank) ++hits;
    if (hits != expected) return false;
  }
  return true;
}

// Smallest codimension among strata with nonzero shift; >= 2 is the gateway to
// the connectivity experiments.
inline int min_positive_codim(const NormVector& nv) {
  int best = -1;
  for (const auto& desc : enumerate_strata(nv)) {
    if (desc.block_count() < 2) continue;  // the a = 0 stratum
    if (best < 0 || desc.codim_complex < best) best = desc.codim_complex;
  }
  if (best < 0)
    throw InfeasibleDescriptor("no stratum with nonzero shift exists");
  return best;
}

}  // namespace frametop
