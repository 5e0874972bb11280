#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "frametop/errors.hpp"
#include "frametop/matrix.hpp"
#include "frametop/rng.hpp"

namespace frametop {

// k orthonormal rows in C^n (FF* = I_k); the n columns are the frame vectors.
struct Frame {
  Matrix m;  // k x n

  Eigen::Index k() const { return m.rows(); }
  Eigen::Index n() const { return m.cols(); }

  // max-norm distance of FF* from I_k
  double tight_residual() const {
    return max_abs(m * m.adjoint() - Matrix::Identity(m.rows(), m.rows()));
  }
};

struct UnitaryMatrix {
  Matrix m;

  Eigen::Index k() const { return m.rows(); }
  double unitary_residual() const {
    return max_abs(m * m.adjoint() - Matrix::Identity(m.rows(), m.rows()));
  }
};

// Hermitian idempotent with integer trace; a point of Gr_k(C^n).
struct ProjectionMatrix {
  Matrix m;  // n x n

  Eigen::Index n() const { return m.rows(); }
  double hermitian_residual() const { return hermiticity_residual(m); }
  double idempotent_residual() const { return max_abs(m * m - m); }
  Eigen::Index rank_k() const {
    return static_cast<Eigen::Index>(std::llround(m.trace().real()));
  }
};

namespace detail {

inline void require_projection(const ProjectionMatrix& p, double tol) {
  if (p.m.rows() != p.m.cols())
    throw DimensionMismatch("projection matrix must be square");
  if (p.hermitian_residual() > tol || p.idempotent_residual() > tol)
    throw NotAProjection("matrix fails Hermitian/idempotent checks at tol " +
                         std::to_string(tol));
  const Complex tr = p.m.trace();
  if (std::abs(tr.imag()) > tol ||
      std::abs(tr.real() - std::round(tr.real())) > tol)
    throw TraceNotIntegral("projection trace " + std::to_string(tr.real()) +
                           " is not near an integer");
}

}  // namespace detail

// P = F*F, the rank-k projection onto the row span; diag(P) are the squared
// column norms.
inline ProjectionMatrix gram_projection(const Frame& f, double tolerance = tol::alg) {
  if (f.tight_residual() > tolerance)
    throw FrameInvariantViolated("rows are not orthonormal: residual " +
                                 std::to_string(f.tight_residual()));
  return {f.m.adjoint() * f.m};
}

// Recover some frame with F*F = P: rows are (conjugated) top eigenvectors,
// ordered by descending eigenvalue, each phase-fixed for determinism.
inline Frame factor_projection(const ProjectionMatrix& p, double tolerance = tol::alg) {
  detail::require_projection(p, tolerance);
  const Eigen::Index n = p.n();
  const Eigen::Index k = p.rank_k();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (p.m + p.m.adjoint()));
  Matrix f(k, n);
  for (Eigen::Index i = 0; i < k; ++i) {
    Eigen::VectorXcd v = es.eigenvectors().col(n - 1 - i);
    fix_phase(v);
    f.row(i) = v.adjoint();
  }
  return {f};
}

inline Frame unitary_act(const UnitaryMatrix& u, const Frame& f) {
  if (u.m.rows() != u.m.cols() || u.m.rows() != f.k())
    throw DimensionMismatch("unitary is " + std::to_string(u.m.rows()) + "x" +
                            std::to_string(u.m.cols()) + ", frame has k = " +
                            std::to_string(f.k()));
  return {u.m * f.m};
}

// Projection onto the top-k eigenspace of a Hermitian matrix (the nearest
// rank-k projection). Refuses to cut through a spectral tie.
inline ProjectionMatrix nearest_projection(const Matrix& h, Eigen::Index k,
                                           double tolerance = tol::alg) {
  if (h.rows() != h.cols()) throw DimensionMismatch("input must be square");
  const Eigen::Index n = h.rows();
  if (k < 0 || k > n)
    throw BadDimensions("rank k = " + std::to_string(k) + " out of range for n = " +
                        std::to_string(n));
  if (hermiticity_residual(h) > tolerance)
    throw NotHermitian("input deviates from Hermitian by " +
                       std::to_string(hermiticity_residual(h)));
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
  if (k > 0 && k < n &&
      es.eigenvalues()(n - k) - es.eigenvalues()(n - k - 1) < 1e-12)
    throw EigenvalueTie("eigenvalues " + std::to_string(es.eigenvalues()(n - k - 1)) +
                        " and " + std::to_string(es.eigenvalues()(n - k)) +
                        " tie at the rank-" + std::to_string(k) + " cut");
  const Matrix v = es.eigenvectors().rightCols(k);
  return {v * v.adjoint()};
}

// Haar-distributed frame: Gaussian rows orthonormalized by modified
// Gram-Schmidt (QR with positive-real pivots).
inline Frame random_frame(Eigen::Index n, Eigen::Index k, std::uint64_t seed) {
  if (n < 0 || k < 0 || k > n)
    throw BadDimensions("random_frame(n=" + std::to_string(n) + ", k=" +
                        std::to_string(k) + ")");
  Rng rng(Rng::derive(seed, "random_frame"));
  Matrix g = random_gaussian(k, n, rng);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (int attempt = 0;; ++attempt) {
      for (Eigen::Index j = 0; j < i; ++j)
        g.row(i) -= g.row(j).dot(g.row(i)) * g.row(j);
      const double nrm = g.row(i).norm();
      if (nrm > 1e-8) {
        g.row(i) /= nrm;
        break;
      }
      // Gaussian rows are a.s. independent; redraw the pathological row
      if (attempt >= 16) throw NumericalStall("Gram-Schmidt could not make a row");
      for (Eigen::Index c = 0; c < n; ++c) g(i, c) = rng.next_complex_gaussian();
    }
  }
  return {g};
}

inline UnitaryMatrix random_unitary(Eigen::Index k, std::uint64_t seed) {
  return {random_frame(k, k, Rng::derive(seed, "random_unitary")).m};
}

// squared norms of the n frame vectors = diag(F*F)
inline RealVector column_norms(const Frame& f) {
  RealVector out(f.n());
  for (Eigen::Index c = 0; c < f.n(); ++c) out(c) = f.m.col(c).squaredNorm();
  return out;
}

}  // namespace frametop
