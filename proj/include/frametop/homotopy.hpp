#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "frametop/errors.hpp"
#include "frametop/moment_flow.hpp"
#include "frametop/schur_horn.hpp"

namespace frametop {

struct ProjectionPath {
  std::vector<ProjectionMatrix> samples;
  NormVector d;
  double max_level_residual = 0.0;  // max over samples of sqrt(energy)
  double max_step = 0.0;            // max consecutive Frobenius distance
};

struct HomotopyConfig {
  FlowConfig flow;
  int grid_s = 32;
  int grid_t = 32;
  double step_cap = 0.5;
  double path_tol = 1e-6;
  int jitter_retries = 3;
  uint64_t seed = 20260814;  // drives jitter/mix perturbations only
};

struct HomotopyReport {
  std::vector<std::vector<ProjectionMatrix>> grid;  // (S+1) x (T+1)
  bool success = false;
  double max_level_residual = 0.0;
  int critical_hits = 0;
  int nonconverged = 0;
  int cut_locus_columns = 0;       // columns whose geodesic stayed on the cut locus
  double basepoint_residual = 0.0; // max distance of the s=S row from the basepoint
  double max_grid_step = 0.0;
};

struct WindingInvariant {
  std::vector<int> components;
};

struct ConnectResult {
  std::vector<Frame> frames;
  ProjectionPath projections;
};

namespace detail {

inline void finalize_path_stats(ProjectionPath& path) {
  path.max_level_residual = 0.0;
  path.max_step = 0.0;
  for (size_t i = 0; i < path.samples.size(); ++i) {
    path.max_level_residual = std::max(
        path.max_level_residual, std::sqrt(energy(path.samples[i], path.d)));
    if (i > 0)
      path.max_step = std::max(
          path.max_step, (path.samples[i].m - path.samples[i - 1].m).norm());
  }
}

inline Matrix range_basis(const ProjectionMatrix& p, Eigen::Index k) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (p.m + p.m.adjoint()));
  return es.eigenvectors().rightCols(k);
}

// random Hermitian direction tangent at P, unit Frobenius norm
inline Matrix random_tangent(const ProjectionMatrix& p, Rng& rng) {
  const Eigen::Index n = p.n();
  const Matrix h = random_hermitian(n, rng);
  const Matrix ip = Matrix::Identity(n, n) - p.m;
  Matrix x = p.m * h * ip + ip * h * p.m;
  const double nrm = x.norm();
  if (nrm < 1e-12) throw NumericalStall("degenerate tangent draw");
  return x / nrm;
}

}  // namespace detail

// Geodesic in the Grassmannian between two same-rank projections: pair
// principal vectors by the SVD of V0* V1 and rotate each through its linearly
// interpolated principal angle. Not yet on any moment level; the d recorded on
// the path is the level of P0.
inline ProjectionPath geodesic_path(const ProjectionMatrix& p0,
                                    const ProjectionMatrix& p1, int steps) {
  detail::require_projection(p0, tol::alg);
  detail::require_projection(p1, tol::alg);
  if (p0.n() != p1.n())
    throw DimensionMismatch("endpoint dimensions differ");
  const Eigen::Index k = p0.rank_k();
  if (k != p1.rank_k())
    throw DimensionMismatch("endpoint ranks differ");
  if (steps < 1) throw BadDimensions("need at least one step");

  ProjectionPath path;
  path.d = NormVector{static_cast<int>(k), moment_map(p0)};
  path.samples.reserve(steps + 1);

  if (k == 0) {
    for (int s = 0; s <= steps; ++s) path.samples.push_back(p0);
    path.samples.back() = p1;
    detail::finalize_path_stats(path);
    return path;
  }

  const Matrix v0 = detail::range_basis(p0, k);
  const Matrix v1 = detail::range_basis(p1, k);
  Eigen::JacobiSVD<Matrix> svd(v0.adjoint() * v1,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd sigma = svd.singularValues();
  if (sigma.minCoeff() < std::sin(1e-6))
    throw CutLocus("principal angle within 1e-6 of pi/2");

  const Matrix a = v0 * svd.matrixU();
  const Matrix b = v1 * svd.matrixV();
  const Eigen::Index n = p0.n();
  Eigen::VectorXd theta(k);
  Matrix c = Matrix::Zero(n, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    theta(i) = std::acos(std::clamp(sigma(i), 0.0, 1.0));
    const double st = std::sin(theta(i));
    if (st > 1e-8) c.col(i) = (b.col(i) - sigma(i) * a.col(i)) / st;
  }

  for (int s = 0; s <= steps; ++s) {
    const double t = static_cast<double>(s) / steps;
    Matrix u(n, k);
    for (Eigen::Index i = 0; i < k; ++i)
      u.col(i) = std::cos(t * theta(i)) * a.col(i) + std::sin(t * theta(i)) * c.col(i);
    path.samples.push_back(ProjectionMatrix{u * u.adjoint()});
  }
  path.samples.front() = p0;
  path.samples.back() = p1;
  detail::finalize_path_stats(path);
  return path;
}

// Closed loop on the moment level through a random base frame: a radius-r
// circle in a random 2-plane of the tangent space, every sample reprojected
// and retracted back onto the level. Throws if a sample fails to retract.
inline ProjectionPath random_level_loop(const NormVector& nv, double radius,
                                        int samples, uint64_t seed,
                                        FlowConfig flow = {}) {
  flow.record_trace = false;
  const ProjectionMatrix base =
      gram_projection(construct_frame(nv, Rng::derive(seed, "loop-base")));
  Rng rng(Rng::derive(seed, "loop-tangent"));
  const Matrix x1 = detail::random_tangent(base, rng);
  Matrix x2 = detail::random_tangent(base, rng);
  x2 -= (x2.cwiseProduct(x1.conjugate()).sum().real()) * x1;
  x2 /= x2.norm();

  ProjectionPath path;
  path.d = nv;
  path.samples.reserve(samples + 1);
  for (int t = 0; t < samples; ++t) {
    const double th = 2.0 * M_PI * t / samples;
    const Matrix raw =
        base.m + radius * (std::cos(th) * x1 + std::sin(th) * x2);
    const ProjectionMatrix start = nearest_projection(raw, nv.k);
    FlowResult res = retract_to_level(start, nv, flow);
    if (res.outcome != FlowOutcome::Converged)
      throw RetractionHitCriticalStratum(
          std::string("loop sample failed to retract: ") + to_string(res.outcome));
    path.samples.push_back(std::move(res.p));
  }
  path.samples.push_back(path.samples.front());
  detail::finalize_path_stats(path);
  return path;
}

// Path between two frames on the same level: geodesic between the Gram
// projections, retracted to the level, lifted through aligned factorizations,
// then closed up inside the fiber by a one-parameter unitary. Endpoints are
// the inputs exactly.
inline ConnectResult connect_frames(const Frame& f0, const Frame& f1,
                                    const NormVector& nv,
                                    const HomotopyConfig& cfg = {}) {
  if (!verify_membership(f0, nv).pass(cfg.path_tol) ||
      !verify_membership(f1, nv).pass(cfg.path_tol))
    throw NotInFiber("input frames do not lie on the prescribed level");
  const Eigen::Index k = f0.k();
  const Eigen::Index n = f0.n();
  const int steps = cfg.grid_t;
  FlowConfig flow = cfg.flow;
  flow.record_trace = false;

  if (k == 0) {
    ConnectResult out;
    out.frames.assign(2 * steps + 1, f0);
    out.frames.back() = f1;
    out.projections.d = nv;
    out.projections.samples.assign(steps + 1, gram_projection(f0));
    detail::finalize_path_stats(out.projections);
    return out;
  }

  const ProjectionMatrix p0 = gram_projection(f0);
  const ProjectionMatrix p1 = gram_projection(f1);
  Rng rng(Rng::derive(cfg.seed, "connect-jitter"));
  std::string last_failure;

  for (int attempt = 0; attempt <= cfg.jitter_retries; ++attempt) {
    ProjectionPath geo = geodesic_path(p0, p1, steps);
    if (attempt > 0) {
      const double mag = 1e-3 * attempt;
      for (int s = 1; s < steps; ++s)
        geo.samples[s] = nearest_projection(
            geo.samples[s].m + mag * random_hermitian(n, rng), k);
    }

    ProjectionPath level;
    level.d = nv;
    level.samples.reserve(steps + 1);
    bool retraction_ok = true;
    for (int s = 0; s <= steps && retraction_ok; ++s) {
      FlowResult res = retract_to_level(geo.samples[s], nv, flow);
      if (res.outcome != FlowOutcome::Converged) {
        last_failure = to_string(res.outcome);
        retraction_ok = false;
        break;
      }
      level.samples.push_back(std::move(res.p));
    }
    if (!retraction_ok) continue;
    detail::finalize_path_stats(level);

    // lift: factor each projection, then rotate into the gauge nearest the
    // previous frame (unitary Procrustes)
    std::vector<Frame> frames;
    frames.reserve(2 * steps + 1);
    frames.push_back(f0);
    for (int s = 1; s <= steps; ++s) {
      const Frame raw = factor_projection(level.samples[s]);
      Eigen::JacobiSVD<Matrix> svd(raw.m * frames.back().m.adjoint(),
                                   Eigen::ComputeFullU | Eigen::ComputeFullV);
      frames.push_back(Frame{svd.matrixV() * svd.matrixU().adjoint() * raw.m});
    }

    // fiber leg: the unitary carrying the lifted endpoint to f1, applied with
    // linearly interpolated eigenphases
    Eigen::JacobiSVD<Matrix> pol(f1.m * frames.back().m.adjoint(),
                                 Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Matrix ufib = pol.matrixU() * pol.matrixV().adjoint();
    Eigen::ComplexSchur<Matrix> schur(ufib);
    Eigen::VectorXd phases(k);
    for (Eigen::Index j = 0; j < k; ++j)
      phases(j) = std::arg(schur.matrixT()(j, j));
    const Matrix q = schur.matrixU();
    const Frame anchor = frames.back();
    for (int s = 1; s <= steps; ++s) {
      const double t = static_cast<double>(s) / steps;
      Eigen::VectorXcd ph(k);
      for (Eigen::Index j = 0; j < k; ++j)
        ph(j) = Complex(std::cos(t * phases(j)), std::sin(t * phases(j)));
      frames.push_back(Frame{q * ph.asDiagonal() * q.adjoint() * anchor.m});
    }
    frames.back() = f1;

    bool contract_ok = true;
    double worst_step = 0.0;
    for (size_t i = 0; i < frames.size() && contract_ok; ++i) {
      if (!verify_membership(frames[i], nv).pass(cfg.path_tol)) {
        last_failure = "frame sample left the level";
        contract_ok = false;
      }
      if (i > 0)
        worst_step = std::max(worst_step, (frames[i].m - frames[i - 1].m).norm());
    }
    if (contract_ok && worst_step > cfg.step_cap) {
      last_failure = "frame step " + std::to_string(worst_step) +
                     " exceeds the step cap";
      contract_ok = false;
    }
    if (!contract_ok) continue;

    return ConnectResult{std::move(frames), std::move(level)};
  }
  throw RetractionHitCriticalStratum("path connection failed after retries: " +
                                     last_failure);
}

// Contract a closed level loop to its basepoint: for each loop sample, the
// Grassmannian geodesic back to loop[0] gives a contraction column, and every
// grid point is retracted to the level. Failures are reported, never thrown.
inline HomotopyReport contract_loop(const ProjectionPath& loop,
                                    const HomotopyConfig& cfg = {}) {
  const size_t tcount = loop.samples.size();
  if (tcount < 2) throw NotInFiber("loop needs at least two samples");
  const ProjectionMatrix& base = loop.samples.front();
  if (max_abs(loop.samples.back().m - base.m) > 1e-9)
    throw NotInFiber("loop is not closed");
  for (const auto& s : loop.samples)
    if (std::sqrt(energy(s, loop.d)) > cfg.path_tol)
      throw NotInFiber("loop sample off the level beyond path_tol");

  const int cols = static_cast<int>(tcount) - 1;
  const int rows = cfg.grid_s;
  const Eigen::Index k = base.rank_k();
  const Eigen::Index n = base.n();
  FlowConfig flow = cfg.flow;
  flow.record_trace = false;
  Rng rng(Rng::derive(cfg.seed, "contract-mix"));

  HomotopyReport rep;
  rep.grid.assign(rows + 1, std::vector<ProjectionMatrix>(cols + 1, base));
  bool all_converged = true;

  for (int t = 0; t <= cols; ++t) {
    ProjectionPath column;
    bool have_column = false;
    for (int mix = 0; mix <= 3 && !have_column; ++mix) {
      try {
        ProjectionMatrix start = base;
        if (mix > 0) {
          const double eps = std::pow(10.0, -8 + 2 * mix);  // 1e-6, 1e-4, 1e-2
          start = nearest_projection(base.m + eps * random_hermitian(n, rng), k);
        }
        column = geodesic_path(start, loop.samples[t], rows);
        have_column = true;
      } catch (const CutLocus&) {
      }
    }
    if (!have_column) {
      ++rep.cut_locus_columns;
      all_converged = false;
      for (int s = 0; s <= rows; ++s) rep.grid[s][t] = loop.samples[t];
      continue;
    }
    for (int s = 0; s <= rows; ++s) {
      FlowResult res = retract_to_level(column.samples[rows - s], loop.d, flow);
      if (res.outcome == FlowOutcome::CriticalPointReached) ++rep.critical_hits;
      else if (res.outcome == FlowOutcome::IterationLimit) ++rep.nonconverged;
      if (res.outcome != FlowOutcome::Converged) all_converged = false;
      rep.max_level_residual =
          std::max(rep.max_level_residual, std::sqrt(res.f_final));
      rep.grid[s][t] = std::move(res.p);
    }
  }

  for (int t = 0; t <= cols; ++t)
    rep.basepoint_residual = std::max(rep.basepoint_residual,
                                      (rep.grid[rows][t].m - base.m).norm());
  for (int s = 0; s <= rows; ++s)
    for (int t = 0; t <= cols; ++t) {
      if (s > 0)
        rep.max_grid_step = std::max(
            rep.max_grid_step, (rep.grid[s][t].m - rep.grid[s - 1][t].m).norm());
      if (t > 0)
        rep.max_grid_step = std::max(
            rep.max_grid_step, (rep.grid[s][t].m - rep.grid[s][t - 1].m).norm());
    }

  rep.success = all_converged && rep.cut_locus_columns == 0 &&
                rep.basepoint_residual <= 1e-6;
  return rep;
}

namespace detail {

// winding number of a closed phase sequence; steps must stay clear of pi and
// the total must come back to a multiple of 2*pi
inline int unwrap_winding(const std::vector<double>& phases) {
  double total = 0.0;
  for (size_t i = 1; i < phases.size(); ++i) {
    double delta = phases[i] - phases[i - 1];
    while (delta > M_PI) delta -= 2.0 * M_PI;
    while (delta < -M_PI) delta += 2.0 * M_PI;
    if (std::abs(delta) >= M_PI - 1e-9)
      throw UndersampledLoop("phase step of " + std::to_string(delta) +
                             " cannot be unwrapped");
    total += delta;
  }
  const double w = total / (2.0 * M_PI);
  const long rounded = std::lround(w);
  if (std::abs(total - 2.0 * M_PI * rounded) > 0.01)
    throw UndersampledLoop("unwrapped phase does not close: total " +
                           std::to_string(total));
  return static_cast<int>(rounded);
}

}  // namespace detail

// Winding of the relative phase arg(f2/f1) along a closed loop of rank-one
// frames on two coordinates: the pi_1 certificate for the circle fibers.
inline WindingInvariant winding_cp1(const std::vector<Frame>& loop) {
  if (loop.size() < 3) throw UndersampledLoop("loop needs at least 3 samples");
  for (const auto& f : loop)
    if (f.k() != 1 || f.n() != 2)
      throw DimensionMismatch("winding certificate expects 1x2 frames");
  if (max_abs(loop.front().m - loop.back().m) > 1e-9)
    throw NotInFiber("loop is not closed");
  std::vector<double> phases;
  phases.reserve(loop.size());
  for (const auto& f : loop) {
    const Complex a = f.m(0, 0), b = f.m(0, 1);
    if (std::abs(a) < 1e-9 || std::abs(b) < 1e-9)
      throw ZeroEntry("frame entry vanishes; relative phase undefined");
    phases.push_back(std::arg(b * std::conj(a)));
  }
  return WindingInvariant{{detail::unwrap_winding(phases)}};
}

namespace detail {

// The distinguished line of a rank-2 projection fixing e_4: the complement of
// e_4 inside the range, as a unit vector on the first three coordinates with
// first entry real positive.
inline Eigen::Vector3cd ex53_line(const ProjectionMatrix& p) {
  if (p.n() != 4) throw DimensionMismatch("expected 4x4 projections");
  Eigen::Vector4cd e4 = Eigen::Vector4cd::Zero();
  e4(3) = 1.0;
  if ((p.m * e4 - e4).cwiseAbs().maxCoeff() > 1e-8)
    throw NotInFiber("projection does not fix e_4");
  const Eigen::Matrix3cd block = p.m.topLeftCorner<3, 3>();
  Eigen::Index best = 0;
  block.colwise().norm().maxCoeff(&best);
  Eigen::Vector3cd v = block.col(best);
  const double nrm = v.norm();
  if (nrm < 1e-9) throw NotInFiber("range carries no line over the first block");
  v /= nrm;
  if (std::abs(v(0)) < 1e-9) throw NotInFiber("line has vanishing first entry");
  v *= std::conj(v(0)) / std::abs(v(0));
  const double target = 1.0 / std::sqrt(3.0);
  for (int i = 0; i < 3; ++i)
    if (std::abs(std::abs(v(i)) - target) > 1e-6)
      throw NotInFiber("line entry modulus deviates from 1/sqrt(3)");
  return v;
}

}  // namespace detail

// Two winding numbers of the torus fiber over d = (1/3,1/3,1/3,1): phases of
// v_2 and v_3 against v_1 along the loop.
inline WindingInvariant torus_invariant_ex53(
    const std::vector<ProjectionMatrix>& loop) {
  if (loop.size() < 3) throw UndersampledLoop("loop needs at least 3 samples");
  if (max_abs(loop.front().m - loop.back().m) > 1e-9)
    throw NotInFiber("loop is not closed");
  std::vector<double> ph2, ph3;
  ph2.reserve(loop.size());
  ph3.reserve(loop.size());
  for (const auto& p : loop) {
    const Eigen::Vector3cd v = detail::ex53_line(p);
    ph2.push_back(std::arg(v(1)));
    ph3.push_back(std::arg(v(2)));
  }
  return WindingInvariant{
      {detail::unwrap_winding(ph2), detail::unwrap_winding(ph3)}};
}

struct FiberPointReport {
  int attempted = 0;
  int converged = 0;
  double max_level_distance = 0.0;   // sqrt(f) over converged retractions
  double max_matrix_distance = 0.0;  // Frobenius distance to Diag(1,1,0,0)
  int frames_checked = 0;
  double max_right_block = 0.0;      // frame columns 3..4
  double max_unitary_residual = 0.0; // recovered left block vs U(2)
  bool pass = false;
};

// The level over d = (1,1,0,0) is a single projection and its frame space is
// one U(2) orbit: retractions from perturbed starts must come back to
// Diag(1,1,0,0), and sampled frames must factor as U [I_2 | 0].
inline FiberPointReport verify_fiber_structure_ex52(uint64_t seed,
                                                    FlowConfig flow = {}) {
  flow.record_trace = false;
  NormVector nv;
  nv.k = 2;
  nv.d = RealVector::Zero(4);
  nv.d(0) = nv.d(1) = 1.0;
  Matrix dd = Matrix::Zero(4, 4);
  dd(0, 0) = dd(1, 1) = 1.0;

  FiberPointReport rep;
  bool ok = true;
  Rng rng(Rng::derive(seed, "fiber-perturb"));
  for (int trial = 0; trial < 50; ++trial) {
    // log-uniform magnitudes so both basins show up: quick converger and
    // honest iteration-limit tails
    const double mag = std::pow(10.0, -6.0 + 5.0 * rng.next_double());
    const ProjectionMatrix start =
        nearest_projection(dd + mag * random_hermitian(4, rng), 2);
    const FlowResult res = retract_to_level(start, nv, flow);
    ++rep.attempted;
    if (res.outcome != FlowOutcome::Converged) continue;
    ++rep.converged;
    const double level_dist = std::sqrt(res.f_final);
    rep.max_level_distance = std::max(rep.max_level_distance, level_dist);
    rep.max_matrix_distance =
        std::max(rep.max_matrix_distance, (res.p.m - dd).norm());
    if (level_dist > 1e-6) ok = false;
  }

  for (int trial = 0; trial < 50; ++trial) {
    const Frame f = construct_frame(nv, Rng::derive(seed, 1000 + trial));
    ++rep.frames_checked;
    rep.max_right_block =
        std::max(rep.max_right_block, max_abs(f.m.rightCols(2)));
    const Matrix u = f.m.leftCols(2);
    rep.max_unitary_residual = std::max(
        rep.max_unitary_residual,
        max_abs(u * u.adjoint() - Matrix::Identity(2, 2)));
  }
  if (rep.max_right_block > 1e-9 || rep.max_unitary_residual > 1e-9) ok = false;
  rep.pass = ok && rep.converged > 0;
  return rep;
}

}  // namespace frametop
