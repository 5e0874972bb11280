#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "frametop/errors.hpp"
#include "frametop/matrix.hpp"
#include "frametop/rng.hpp"

namespace frametop {

// A diagonal target: d in [0,1]^n with sum(d) = k.
struct NormVector {
  int k = 0;
  RealVector d;

  Eigen::Index n() const { return d.size(); }
};

inline bool in_polytope(const NormVector& nv, double tolerance = tol::poly) {
  if (nv.k < 0 || nv.k > nv.n()) return false;
  for (Eigen::Index i = 0; i < nv.n(); ++i)
    if (nv.d(i) < -tolerance || nv.d(i) > 1.0 + tolerance) return false;
  const double sum = nv.d.sum();
  return std::abs(sum - nv.k) <= tolerance;
}

// Sum of the (n-k) smallest entries; 0 when n = k.
inline double min_subset_sum(const NormVector& nv) {
  std::vector<double> v(nv.d.data(), nv.d.data() + nv.n());
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (Eigen::Index i = 0; i < nv.n() && i + nv.k < nv.n(); ++i) s += v[i];
  return s;
}

// Every (n-k)-subset of d sums to at least 1; equivalent to checking the
// smallest n-k entries. Vacuously true when n = k (no indices to pick).
inline bool satisfies_hypothesis(const NormVector& nv, double tolerance = tol::poly) {
  if (!in_polytope(nv, tolerance))
    throw NotInPolytope("d is not a valid diagonal target");
  if (nv.n() == nv.k) return true;
  return min_subset_sum(nv) >= 1.0 - tolerance;
}

// Independent oracle: enumerate all C(n, n-k) subsets directly.
inline bool brute_force_hypothesis(const NormVector& nv, double tolerance = tol::poly) {
  if (!in_polytope(nv, tolerance))
    throw NotInPolytope("d is not a valid diagonal target");
  const int n = static_cast<int>(nv.n());
  const int m = n - nv.k;
  if (m == 0) return true;  // empty conjunction
  double count = 1.0;
  for (int i = 0; i < m; ++i) count = count * (n - i) / (i + 1);
  if (count > 1e6)
    throw TooLarge("C(" + std::to_string(n) + "," + std::to_string(m) +
                   ") subsets exceed the enumeration budget");
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    double s = 0.0;
    for (int i : idx) s += nv.d(i);
    if (s < 1.0 - tolerance) return false;
    // next combination in lexicographic order
    int i = m - 1;
    while (i >= 0 && idx[i] == n - m + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
  }
  return true;
}

inline NormVector uniform_d(int n, int k) {
  if (n < 1 || k < 0 || k > n)
    throw BadDimensions("uniform_d(n=" + std::to_string(n) + ", k=" +
                        std::to_string(k) + ")");
  return {k, RealVector::Constant(n, static_cast<double>(k) / n)};
}

// Uniform sample of the polytope: Dirichlet(1,...,1) scaled to sum k, rejected
// until all entries are <= 1. Sampling the smaller of (k, n-k) and flipping
// keeps the acceptance rate workable.
inline NormVector sample_polytope(int n, int k, std::uint64_t seed) {
  if (n < 1 || k < 0 || k > n)
    throw BadDimensions("sample_polytope(n=" + std::to_string(n) + ", k=" +
                        std::to_string(k) + ")");
  if (k == 0) return {0, RealVector::Zero(n)};
  if (k == n) return {k, RealVector::Ones(n)};
  Rng rng(Rng::derive(seed, "sample_polytope"));
  const int kk = std::min(k, n - k);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    RealVector x(n);
    for (int i = 0; i < n; ++i) x(i) = -std::log(1.0 - rng.next_double());
    x *= kk / x.sum();
    if (x.maxCoeff() <= 1.0) {
      if (kk != k) x = RealVector::Ones(n) - x;
      return {k, x};
    }
  }
  throw NumericalStall("polytope rejection sampling exhausted its retry cap");
}

}  // namespace frametop
