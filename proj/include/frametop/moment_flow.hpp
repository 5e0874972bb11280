#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "frametop/errors.hpp"
#include "frametop/hermitian_core.hpp"
#include "frametop/polytope.hpp"

namespace frametop {

// diag(P) as a real vector; for P in Gr_k these are the squared column norms
// of any frame over P and lie in the diagonal polytope.
inline RealVector moment_map(const ProjectionMatrix& p, double tolerance = tol::alg) {
  if (p.m.rows() != p.m.cols())
    throw DimensionMismatch("projection matrix must be square");
  if (p.hermitian_residual() > tolerance)
    throw NotHermitian("matrix deviates from Hermitian by " +
                       std::to_string(p.hermitian_residual()));
  return p.m.diagonal().real();
}

// h_a(P) = tr(P diag(a))
inline double height(const ProjectionMatrix& p, const RealVector& a) {
  if (a.size() != p.n())
    throw DimensionMismatch("height weight has length " + std::to_string(a.size()) +
                            ", projection is " + std::to_string(p.n()) + "-dim");
  return a.dot(p.m.diagonal().real());
}

inline double energy(const ProjectionMatrix& p, const NormVector& nv) {
  if (nv.n() != p.n())
    throw DimensionMismatch("target length " + std::to_string(nv.n()) +
                            " vs projection dim " + std::to_string(p.n()));
  return (p.m.diagonal().real() - nv.d).squaredNorm();
}

// Riemannian gradient of the energy at P: project the Euclidean gradient
// G = 2 diag(mu(P) - d) onto the tangent space, X = P G (I-P) + (I-P) G P.
// X is Hermitian and satisfies XP + PX = X.
inline Matrix riemannian_grad_energy(const ProjectionMatrix& p, const NormVector& nv) {
  if (nv.n() != p.n())
    throw DimensionMismatch("target length " + std::to_string(nv.n()) +
                            " vs projection dim " + std::to_string(p.n()));
  const Eigen::Index n = p.n();
  const RealVector g = 2.0 * (p.m.diagonal().real() - nv.d);
  Matrix gm = Matrix::Zero(n, n);
  gm.diagonal() = g.cast<Complex>();
  const Matrix ip = Matrix::Identity(n, n) - p.m;
  return p.m * gm * ip + ip * gm * p.m;
}

struct CriticalityCheck {
  bool critical;
  RealVector a;  // the shift mu(P) - d
};

// Zero gradient is equivalent to [P, diag(a)] = 0 for the shift a = mu(P) - d;
// when it holds, P is block-diagonal along the level sets of a.
inline CriticalityCheck is_critical(const ProjectionMatrix& p, const NormVector& nv,
                                    double tolerance) {
  RealVector a = moment_map(p) - nv.d;
  const Eigen::Index n = p.n();
  Matrix da = Matrix::Zero(n, n);
  da.diagonal() = a.cast<Complex>();
  const bool flat = max_abs(p.m * da - da * p.m) <= tolerance;
  return {flat, std::move(a)};
}

// sigma maps index j to sigma[j]; g e_j = e_{sigma(j)}. Returns g P g*, whose
// diagonal is mu(P) pulled back through sigma.
inline ProjectionMatrix conjugate_by_permutation(const ProjectionMatrix& p,
                                                 const std::vector<int>& sigma) {
  const Eigen::Index n = p.n();
  if (static_cast<Eigen::Index>(sigma.size()) != n)
    throw BadPermutation("permutation length " + std::to_string(sigma.size()) +
                         " vs dimension " + std::to_string(n));
  std::vector<int> inv(n, -1);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (sigma[j] < 0 || sigma[j] >= n || inv[sigma[j]] != -1)
      throw BadPermutation("sigma is not a bijection on {0..n-1}");
    inv[sigma[j]] = static_cast<int>(j);
  }
  Matrix out(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) out(a, b) = p.m(inv[a], inv[b]);
  return {out};
}

// x^sigma: component j becomes x_{sigma(j)}
inline RealVector permute_entries(const RealVector& x, const std::vector<int>& sigma) {
  if (static_cast<size_t>(x.size()) != sigma.size())
    throw DimensionMismatch("vector/permutation length mismatch");
  RealVector out(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (sigma[j] < 0 || sigma[j] >= x.size())
      throw BadPermutation("index out of range");
    out(j) = x(sigma[j]);
  }
  return out;
}

struct FlowConfig {
  double step0 = 0.5;
  int max_iter = 5000;
  double f_tol = 1e-12;
  double grad_tol = 1e-9;
  double backtrack_factor = 0.5;
  int max_backtracks = 50;
  bool record_trace = true;  // batch drivers switch this off to save memory
};

enum class FlowOutcome { Converged, CriticalPointReached, IterationLimit };

inline const char* to_string(FlowOutcome o) {
  switch (o) {
    case FlowOutcome::Converged: return "Converged";
    case FlowOutcome::CriticalPointReached: return "CriticalPointReached";
    default: return "IterationLimit";
  }
}

struct TraceRow {
  int iter;
  double f;
  double gradnorm;
  double step;
};

struct FlowResult {
  ProjectionMatrix p;
  FlowOutcome outcome = FlowOutcome::IterationLimit;
  std::vector<TraceRow> trace;
  RealVector shift;  // mu(P) - d at the final iterate
  int iterations = 0;
  double f_final = 0.0;
  double grad_final = 0.0;
};

namespace detail {

// nearest_projection with a tiny Hermitian jitter retried on spectral ties
inline ProjectionMatrix nearest_with_jitter(const Matrix& h, Eigen::Index k,
                                            Rng& rng) {
  for (int attempt = 0;; ++attempt) {
    try {
      if (attempt == 0) return nearest_projection(h, k);
      return nearest_projection(h + 1e-10 * random_hermitian(h.rows(), rng), k);
    } catch (const EigenvalueTie&) {
      if (attempt >= 3) throw;
    }
  }
}

}  // namespace detail

// Projected gradient descent toward the level set mu^{-1}(d): Armijo
// backtracking on f(P) = ||mu(P) - d||^2 with the top-k eigenspace retraction.
// Stall taxonomy: f small -> Converged; gradient small with f above the
// critical-level threshold -> CriticalPointReached; otherwise IterationLimit.
inline FlowResult retract_to_level(const ProjectionMatrix& p0, const NormVector& nv,
                                   const FlowConfig& cfg = {}) {
  detail::require_projection(p0, tol::alg);
  if (nv.n() != p0.n())
    throw DimensionMismatch("target length vs projection dim");
  const Eigen::Index k = p0.rank_k();
  if (k != nv.k)
    throw DimensionMismatch("projection rank " + std::to_string(k) +
                            " vs target k " + std::to_string(nv.k));

  FlowResult res;
  res.p = p0;
  double f = energy(res.p, nv);
  Matrix grad = riemannian_grad_energy(res.p, nv);
  double gn = grad.norm();
  res.trace.push_back({0, f, gn, 0.0});
  Rng jitter_rng(Rng::derive(0x66f3a1c9d2e4b587ull, "retract-jitter"));
  const double crit_f = 100.0 * cfg.f_tol;
  const double armijo_c = 1e-4;
  // Trial steps follow the Barzilai-Borwein spectral estimate (safeguarded by
  // the Armijo backtracking below, so f stays monotone).  A fixed trial step
  // zig-zags in ill-conditioned basins near the level set and can stall four
  // orders of magnitude short of f_tol.
  const double step_cap = 1e6;
  double trial_step = cfg.step0;
  Matrix prev_p, prev_grad;
  int it = 0;

  while (true) {
    if (f <= cfg.f_tol) {
      res.outcome = FlowOutcome::Converged;
      break;
    }
    if (gn <= cfg.grad_tol) {
      res.outcome = f > crit_f ? FlowOutcome::CriticalPointReached
                               : FlowOutcome::Converged;
      break;
    }
    if (it >= cfg.max_iter) {
      res.outcome = FlowOutcome::IterationLimit;
      break;
    }
    double step = trial_step;
    bool accepted = false;
    prev_p = res.p.m;
    prev_grad = grad;
    for (int b = 0; b <= cfg.max_backtracks; ++b) {
      try {
        ProjectionMatrix cand =
            detail::nearest_with_jitter(res.p.m - step * grad, k, jitter_rng);
        const double fc = energy(cand, nv);
        if (fc <= f - armijo_c * step * gn * gn) {
          res.p = std::move(cand);
          f = fc;
          accepted = true;
          break;
        }
      } catch (const EigenvalueTie&) {
        // an overlong trial step can land on a spectral tie; shrink instead
        // of giving up, unless backtracking is already exhausted
        if (b == cfg.max_backtracks) throw;
      }
      step *= cfg.backtrack_factor;
    }
    if (!accepted) {
      // numerically flat with a non-negligible gradient: report honestly
      res.outcome = FlowOutcome::IterationLimit;
      break;
    }
    ++it;
    grad = riemannian_grad_energy(res.p, nv);
    gn = grad.norm();
    const Matrix sm = res.p.m - prev_p;
    const Matrix ym = grad - prev_grad;
    const double sy = sm.cwiseProduct(ym.conjugate()).sum().real();
    const double yy = ym.squaredNorm();
    const double bb = sy / yy;
    trial_step = (std::isfinite(bb) && bb > 0) ? std::min(bb, step_cap)
                                               : std::min(2.0 * step, step_cap);
    if (cfg.record_trace) res.trace.push_back({it, f, gn, step});
  }

  res.shift = res.p.m.diagonal().real() - nv.d;
  res.iterations = it;
  res.f_final = f;
  res.grad_final = gn;
  if (!cfg.record_trace) res.trace.push_back({it, f, gn, 0.0});
  return res;
}

}  // namespace frametop
