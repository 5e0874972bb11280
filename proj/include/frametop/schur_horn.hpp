#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "frametop/errors.hpp"
#include "frametop/hermitian_core.hpp"
#include "frametop/polytope.hpp"

namespace frametop {

namespace detail {

// Rotate the (i,j) plane of P so that one of the two diagonal entries lands
// exactly on its target. Entry i is above target, entry j below, and
// P(i,i) >= P(j,j) here (the chain below maintains that). The rotation moves
// diagonal mass from i to j, parking whichever target is reached first.
inline void rotate_pair(Matrix& p, Eigen::Index i, Eigen::Index j, double ti,
                        double tj) {
  const double pi = p(i, i).real();
  const double pj = p(j, j).real();
  const double gap = pi - pj;
  if (gap <= 1e-15)
    throw NumericalStall("degenerate diagonal pair in the rotation chain");
  const double ui = ti - pj;  // path parameter numerators, in [0, gap] if reachable
  const double uj = pi - tj;
  const bool set_i = ui >= 0.0 && (uj < 0.0 || ui >= uj);
  if (!set_i && uj < 0.0)
    throw NumericalStall("neither diagonal target is reachable in this plane");
  const double u = std::clamp((set_i ? ui : uj) / gap, 0.0, 1.0);
  const double c = std::sqrt(u);
  const double s = std::sqrt(1.0 - u);

  // absorb the phase of the (tiny) off-diagonal entry, then rotate
  const Complex q = p(i, j);
  const Complex ph = std::abs(q) > 0.0 ? q / std::abs(q) : Complex(1.0, 0.0);
  const Eigen::Index n = p.rows();
  for (Eigen::Index col = 0; col < n; ++col) {
    const Complex a = p(i, col);
    const Complex b = ph * p(j, col);
    p(i, col) = c * a + s * b;
    p(j, col) = -s * a + c * b;
  }
  for (Eigen::Index row = 0; row < n; ++row) {
    const Complex a = p(row, i);
    const Complex b = std::conj(ph) * p(row, j);
    p(row, i) = c * a + s * b;
    p(row, j) = -s * a + c * b;
  }
  // pin the parked entry exactly; its partner keeps the pair's mass
  if (set_i) {
    p(i, i) = ti;
    p(j, j) = pi + pj - ti;
  } else {
    p(j, j) = tj;
    p(i, i) = pi + pj - tj;
  }
}

}  // namespace detail

// Projection with prescribed diagonal d: start from the 0/1 diagonal matrix
// supported on the k largest targets, then chain at most n-1 two-plane
// rotations, each parking one coordinate exactly on its target. Coordinates
// with d_j in {0,1} start exact and are never touched, so their rows/columns
// stay exactly e_j.
inline ProjectionMatrix construct_projection_with_diagonal(
    const NormVector& nv, double tolerance = tol::poly) {
  if (!in_polytope(nv, tolerance))
    throw NotInPolytope("d is not a valid diagonal target");
  const Eigen::Index n = nv.n();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return nv.d(a) > nv.d(b); });
  Matrix p = Matrix::Zero(n, n);
  for (int i = 0; i < nv.k; ++i) p(order[i], order[i]) = 1.0;

  const double pick = 1e-12;
  for (Eigen::Index round = 0; round <= n; ++round) {
    Eigen::Index over = -1, under = -1;
    for (Eigen::Index m = 0; m < n && (over < 0 || under < 0); ++m) {
      const double diff = p(m, m).real() - nv.d(m);
      if (over < 0 && diff > pick) over = m;
      if (under < 0 && diff < -pick) under = m;
    }
    if (over < 0 || under < 0) break;
    detail::rotate_pair(p, over, under, nv.d(over), nv.d(under));
  }

  double resid = 0.0;
  for (Eigen::Index m = 0; m < n; ++m)
    resid = std::max(resid, std::abs(p(m, m).real() - nv.d(m)));
  if (resid > 1e-10)
    throw NumericalStall("rotation chain left diagonal residual " +
                         std::to_string(resid));
  return {p};
}

// Deterministic frame over the constructed projection, rotated by a seeded
// Haar unitary so repeated calls with different seeds spread over the fiber.
inline Frame construct_frame(const NormVector& nv, std::uint64_t seed) {
  const ProjectionMatrix p = construct_projection_with_diagonal(nv);
  const Frame f = factor_projection(p);
  const UnitaryMatrix u = random_unitary(nv.k, Rng::derive(seed, "construct_frame"));
  return unitary_act(u, f);
}

struct MembershipReport {
  double tight_residual = 0.0;      // max-norm of FF* - I_k
  RealVector norm_residuals;        // |column norm^2 - d_j| per column
  double max_norm_residual = 0.0;

  bool pass(double tolerance) const {
    return tight_residual <= tolerance && max_norm_residual <= tolerance;
  }
};

inline MembershipReport verify_membership(const Frame& f, const NormVector& nv) {
  if (f.n() != nv.n() || f.k() != nv.k)
    throw DimensionMismatch("frame is " + std::to_string(f.k()) + "x" +
                            std::to_string(f.n()) + ", target wants k=" +
                            std::to_string(nv.k) + ", n=" + std::to_string(nv.n()));
  MembershipReport r;
  r.tight_residual = f.tight_residual();
  r.norm_residuals = (column_norms(f) - nv.d).cwiseAbs();
  r.max_norm_residual = r.norm_residuals.size() ? r.norm_residuals.maxCoeff() : 0.0;
  return r;
}

}  // namespace frametop
