#pragma once

#include <Eigen/Dense>
#include <complex>

#include "frametop/rng.hpp"

namespace frametop {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

namespace tol {
inline constexpr double alg = 1e-9;   // algebraic invariant checks
inline constexpr double poly = 1e-9;  // polytope membership slack
}  // namespace tol

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_residual(const Matrix& m) {
  return max_abs(m - m.adjoint());
}

// filled row-major so output only depends on the seed, not on storage order
inline Matrix random_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.next_complex_gaussian();
  return m;
}

inline Matrix random_hermitian(Eigen::Index n, Rng& rng) {
  Matrix a = random_gaussian(n, n, rng);
  return 0.5 * (a + a.adjoint());
}

// Multiply v by a unit phase so its first entry of significant magnitude is
// real positive. No-op on (numerically) zero vectors.
inline void fix_phase(Eigen::Ref<Eigen::VectorXcd> v) {
  const double scale = v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
  if (scale <= 0.0) return;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > 1e-8 * scale) {
      v *= std::conj(v(i)) / a;
      return;
    }
  }
}

}  // namespace frametop
