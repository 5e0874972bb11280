#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "frametop/homotopy.hpp"
#include "frametop/parallel.hpp"
#include "frametop/strata.hpp"

namespace frametop::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string details;
  double seconds = 0.0;
};

struct Options {
  uint64_t seed = 20260814;
  int jobs = 1;
  std::string only;  // substring filter on criterion names; empty = all
};

namespace detail {

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

inline std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> sigma(n);
  for (int i = 0; i < n; ++i) sigma[i] = i;
  for (int i = n - 1; i > 0; --i)
    std::swap(sigma[i], sigma[rng.next_below(i + 1)]);
  return sigma;
}

inline std::vector<int> inverse_permutation(const std::vector<int>& sigma) {
  std::vector<int> inv(sigma.size());
  for (size_t i = 0; i < sigma.size(); ++i) inv[sigma[i]] = static_cast<int>(i);
  return inv;
}

}  // namespace detail

// 1. Frame synthesis across the polytope: residuals at 1e-9, 30 s budget.
inline CriterionResult criterion_synthesis(const Options& opts) {
  CriterionResult res{1, "frame-synthesis", false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  const uint64_t base = Rng::derive(opts.seed, "acceptance-synthesis");
  auto one = [&](int i) {
    Rng rng(Rng::derive(base, static_cast<uint64_t>(i)));
    const int n = 4 + static_cast<int>(rng.next_below(9));
    const int k = static_cast<int>(rng.next_below(n + 1));
    const NormVector d = sample_polytope(n, k, Rng::derive(base, 10000 + i));
    const Frame f = construct_frame(d, Rng::derive(base, 20000 + i));
    const MembershipReport rep = verify_membership(f, d);
    return std::make_pair(rep.tight_residual, rep.max_norm_residual);
  };
  double worst_tight = 0, worst_norm = 0;
  for (auto& [t, m] : parallel_map(1000, opts.jobs, one)) {
    worst_tight = std::max(worst_tight, t);
    worst_norm = std::max(worst_norm, m);
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.pass = worst_tight <= 1e-9 && worst_norm <= 1e-9 && res.seconds <= 30.0;
  res.details = "1000 frames, max tight residual " + detail::fmt(worst_tight) +
                ", max norm residual " + detail::fmt(worst_norm);
  return res;
}

// 2. Fast subset-sum hypothesis test agrees with exhaustive enumeration; the
// uniform vector satisfies it exactly for 2 <= k <= n-2.
inline CriterionResult criterion_hypothesis(const Options& opts) {
  CriterionResult res{2, "hypothesis-equivalence", false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  const uint64_t base = Rng::derive(opts.seed, "acceptance-hypothesis");
  auto one = [&](int i) {
    Rng rng(Rng::derive(base, static_cast<uint64_t>(i)));
    const int n = 1 + static_cast<int>(rng.next_below(12));
    const int k = static_cast<int>(rng.next_below(n + 1));
    const NormVector d = sample_polytope(n, k, Rng::derive(base, 50000 + i));
    return satisfies_hypothesis(d) == brute_force_hypothesis(d);
  };
  int agree = 0;
  for (bool ok : parallel_map(10000, opts.jobs, one)) agree += ok;
  bool grid_ok = true;
  for (int n = 1; n <= 10 && grid_ok; ++n)
    for (int k = 0; k <= n - 1 && grid_ok; ++k)
      grid_ok = satisfies_hypothesis(uniform_d(n, k)) == (k >= 2 && k <= n - 2);
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.pass = agree == 10000 && grid_ok;
  res.details = std::to_string(agree) + "/10000 dual-route agreements, uniform grid " +
                (grid_ok ? "exact" : "MISMATCH");
  return res;
}

// 3. The shallow stratum over d = (1,1,0,0): shift (-1/2,-1/2,1/2,1/2) with
// unit capacities, complex codimension 1, energy level 1.
inline CriterionResult criterion_strata_negative(const Options& opts) {
  (void)opts;
  CriterionResult res{3, "strata-negative", false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  NormVector d;
  d.k = 2;
  d.d.resize(4);
  d.d << 1, 1, 0, 0;
  RealVector want(4);
  want << -0.5, -0.5, 0.5, 0.5;
  bool found = false;
  for (const auto& desc : enumerate_strata(d)) {
    if ((desc.shift - want).cwiseAbs().maxCoeff() > 1e-12) continue;
    found = desc.capacities == std::vector<int>{1, 1} &&
            desc.codim_complex == 1 &&
            std::abs(desc.energy_level() - 1.0) <= 1e-12;
    break;
  }
  const int min_codim = min_positive_codim(d);
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.pass = found && min_codim == 1;
  res.details = std::string("codim-1 descriptor ") + (found ? "present" : "MISSING") +
                ", min positive codim " + std::to_string(min_codim);
  return res;
}

// 4. Under the subset-sum hypothesis every nonzero-shift stratum has complex
// codimension >= 2 (so real codimension >= 4), across three polytopes.
inline CriterionResult criterion_strata_positive(const Options& opts) {
  CriterionResult res{4, "strata-positive", false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  const uint64_t base = Rng::derive(opts.seed, "acceptance-strata-positive");
  const std::vector<std::pair<int, int>> spaces{{4, 2}, {5, 2}, {6, 3}};
  int min_seen = 1 << 20;
  int checked = 0;
  bool ok = true;
  for (size_t sp = 0; sp < spaces.size() && ok; ++sp) {
    const auto [n, k] = spaces[sp];
    // The constraint region is convex (min-subset-sum is concave) and always
    // contains uniform_d, so project each polytope draw onto it by bisecting
    // along the segment toward uniform. When the region is a single point
    // (n = 2k forces exactly uniform) this collapses every draw onto it. The
    // subset-sum condition is tested without slack: a point short of the
    // region by even 1e-9 carries tiny near-zero-shift strata of codimension
    // 1, so the tolerance version of the predicate would break the claim.
    const NormVector uni = uniform_d(n, k);
    const auto exact_hyp = [](const NormVector& v) { return min_subset_sum(v) >= 1.0; };
    for (int trial = 0; trial < 100; ++trial) {
      NormVector d = sample_polytope(n, k, Rng::derive(base, sp * 1000000 + trial));
      if (!exact_hyp(d)) {
        double lo = 0.0, hi = 1.0;
        NormVector mix = d;
        for (int it = 0; it < 80; ++it) {
          const double t = 0.5 * (lo + hi);
          mix.d = (1 - t) * d.d + t * uni.d;
          (exact_hyp(mix) ? hi : lo) = t;
        }
        d.d = (1 - hi) * d.d + hi * uni.d;
        if (!exact_hyp(d)) {
          ok = false;
          break;
        }
      }
      for (const auto& desc : enumerate_strata(d)) {
        if (desc.block_count() < 2) continue;
        ++checked;
        min_seen = std::min(min_seen, desc.codim_complex);
        if (desc.codim_complex < 2) ok = false;
      }
    }
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.pass = ok && res.seconds <= 300.0;
  res.details = std::to_string(checked) + " nonzero-shift descriptors over 300 targets, min codim " +
                std::to_string(min_seen);
  return res;
}

// 5. The finite-difference Hessian index equals the combinatorial codimension
// for every descriptor (n <= 5), and the two-block formula matches Wolf's
// count on all admissible shapes with n <= 8.
inline CriterionResult criterion_codim_crossval(const Options& opts) {
  CriterionResult res{5, "codim-crossval", false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  const uint64_t base = Rng::derive(opts.seed, "acceptance-codim");
  int compared = 0, mismatches = 0, ambiguous = 0;
  for (int n = 1; n <= 5; ++n)
    for (int k = 0; k <= n; ++k)
      for (int trial = 0; trial < 20; ++trial) {
        const NormVector d =
            sample_polytope(n, k, Rng::derive(base, (n * 10 + k) * 1000 + trial));
        for (const auto& desc : enumerate_strata(d)) {
          ++compared;
          int index = -1;
          for (int attempt = 0; attempt < 3; ++attempt) {
            try {
              index = hessian_index_oracle(desc, d,
                                           Rng::derive(base, 777000 + attempt));
              break;
            } catch (const AmbiguousEigenvalue&) {
            }
          }
          if (index < 0) ++ambiguous;
          else if (index != desc.codim_complex) ++mismatches;
        }
      }

  bool wolf_ok = true;
  for (int n = 1; n <= 8; ++n)
    for (int k = 0; k <= n; ++k)
      for (int m1 = 1; m1 <= n - 1; ++m1) {
        const int m2 = n - m1;
        for (int c2 = std::max(0, k - m1); c2 <= std::min(m2, k); ++c2) {
          const int c1 = k - c2;
          const int got = stratum_codim({m1, m2}, {c1, c2});
          if (got != c1 * (m2 - c2)) wolf_ok = false;
          if (got != c1 * (n - k - m1 + c1)) wolf_ok = false;
        }
      }

  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.pass = mismatches == 0 && ambiguous == 0 && wolf_ok;
  res.details = std::to_string(compared) + " descriptors cross-validated, " +
                std::to_string(mismatches) + " mismatches, " +
                std::to_string(ambiguous) + " unresolved, two-block formula " +
                (wolf_ok ? "exact" : "MISMATCH");
  return res;
}

// 6. Retraction: >= 99/100 Haar starts converge to f <= 1e-12 within 5000
// iterations, traces are monotone, and the gradient matches finite
// differences.
inline CriterionResult criterion_retraction(const Options& opts) {
  CriterionResult res{6, "retraction", false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  const uint64_t base = Rng::derive(opts.seed, "acceptance-retraction");
  const NormVector d = uniform_d(5, 2);
  auto one = [&](int i) {
    const ProjectionMatrix p0 =
        gram_projection(random_frame(5, 2, Rng::derive(base, i)));
    FlowConfig cfg;  // defaults: 5000 iterations, f_tol 1e-12
    const FlowResult r = retract_to_level(p0, d, cfg);
    bool monotone = true;
    for (size_t s = 1; s < r.trace.size(); ++s)
      if (r.trace[s].f > r.trace[s - 1].f + 1e-15) monotone = false;
    const bool conv = r.outcome == FlowOutcome::Converged && r.f_final <= 1e-12;
    return std::make_pair(conv, monotone);
  };
  int converged = 0;
  bool monotone = true;
  for (auto& [c, m] : parallel_map(100, opts.jobs, one)) {
    converged += c;
    monotone = monotone && m;
  }

  Rng rng(Rng::derive(base, "fd-probes"));
  double worst_fd = 0;
  for (int i = 0; i < 100; ++i) {
    const ProjectionMatrix p =
        gram_projection(random_frame(5, 2, Rng::derive(base, 40000 + i)));
    const NormVector dp = sample_polytope(5, 2, Rng::derive(base, 41000 + i));
    const Matrix t = frametop::detail::random_tangent(p, rng);
    const Matrix x = riemannian_grad_energy(p, dp);
    const double eps = 1e-6;
    const double lhs =
        (energy(nearest_projection(p.m + eps * t, 2), dp) - energy(p, dp)) / eps;
    const double rhs = x.cwiseProduct(t.conjugate()).sum().real();
    worst_fd = std::max(worst_fd, std::abs(lhs - rhs));
  }

  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.pass = converged >= 99 && monotone && worst_fd <= 1e-4;
  res.details = std::to_string(converged) + "/100 converged, traces " +
                (monotone ? "monotone" : "NON-MONOTONE") +
                ", worst gradient probe " + detail::fmt(worst_fd);
  return res;
}

// 7. The point fiber: converged retractions toward (1,1,0,0) land on the
// unique level point, and sampled frames factor through U(2) x [I|0].
inline CriterionResult criterion_point_fiber(const Options& opts) {
  CriterionResult res{7, "point-fiber", false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  const FiberPointReport rep =
      verify_fiber_structure_ex52(Rng::derive(opts.seed, "acceptance-fiber"));
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.pass = rep.pass;
  res.details = std::to_string(rep.converged) + "/" + std::to_string(rep.attempted) +
                " retractions converged, max level distance " +
                detail::fmt(rep.max_level_distance) + " (matrix distance " +
                detail::fmt(rep.max_matrix_distance) + "), frame right block " +
                detail::fmt(rep.max_right_block);
  return res;
}

// 8. Connectivity evidence: loop contraction and frame-pair connection each
// succeed on >= 19/20 seeded trials in two spaces.
inline CriterionResult criterion_connectivity(const Options& opts) {
  CriterionResult res{8, "connectivity", false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  const uint64_t base = Rng::derive(opts.seed, "acceptance-connectivity");
  const std::vector<std::pair<int, int>> spaces{{4, 2}, {5, 2}};
  std::string detail_txt;
  bool ok = true;
  for (size_t sp = 0; sp < spaces.size(); ++sp) {
    const auto [n, k] = spaces[sp];
    const NormVector nv = uniform_d(n, k);
    auto contract_one = [&](int i) {
      HomotopyConfig cfg;
      cfg.seed = Rng::derive(base, sp * 10000 + 100 + i);
      try {
        const ProjectionPath loop =
            random_level_loop(nv, 0.2, cfg.grid_t, Rng::derive(base, sp * 10000 + i));
        return contract_loop(loop, cfg).success;
      } catch (const Error&) {
        return false;
      }
    };
    auto connect_one = [&](int i) {
      HomotopyConfig cfg;
      cfg.seed = Rng::derive(base, sp * 10000 + 500 + i);
      try {
        const Frame f0 = construct_frame(nv, Rng::derive(base, sp * 10000 + 600 + i));
        const Frame f1 = construct_frame(nv, Rng::derive(base, sp * 10000 + 700 + i));
        connect_frames(f0, f1, nv, cfg);
        return true;
      } catch (const Error&) {
        return false;
      }
    };
    int loops_ok = 0, connects_ok = 0;
    for (bool b : parallel_map(20, opts.jobs, contract_one)) loops_ok += b;
    for (bool b : parallel_map(20, opts.jobs, connect_one)) connects_ok += b;
    ok = ok && loops_ok >= 19 && connects_ok >= 19;
    detail_txt += (sp ? "; " : "") + std::to_string(n) + "x" + std::to_string(k) +
                  ": loops " + std::to_string(loops_ok) + "/20, connections " +
                  std::to_string(connects_ok) + "/20";
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.pass = ok;
  res.details = detail_txt;
  return res;
}

// 9. The known non-simply-connected fibers: circle windings 1, 0, 2; torus
// windings (1,0), (1,1), (0,0); and the generator loop refuses to contract.
inline CriterionResult criterion_winding(const Options& opts) {
  CriterionResult res{9, "winding-certificates", false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  const int samples = 64;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  auto cp1_loop = [&](int turns) {
    std::vector<Frame> loop;
    for (int t = 0; t <= samples; ++t) {
      const double th = 2.0 * M_PI * turns * t / samples;
      Matrix f(1, 2);
      f(0, 0) = inv_sqrt2;
      f(0, 1) = inv_sqrt2 * Complex(std::cos(th), std::sin(th));
      loop.push_back(Frame{f});
    }
    loop.back() = loop.front();
    return loop;
  };
  const bool cp1_ok = winding_cp1(cp1_loop(1)).components == std::vector<int>{1} &&
                      winding_cp1(cp1_loop(0)).components == std::vector<int>{0} &&
                      winding_cp1(cp1_loop(2)).components == std::vector<int>{2};

  const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
  auto torus_loop = [&](int w2, int w3) {
    std::vector<ProjectionMatrix> loop;
    for (int t = 0; t <= samples; ++t) {
      const double th = 2.0 * M_PI * t / samples;
      Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
      v(0) = inv_sqrt3;
      v(1) = inv_sqrt3 * Complex(std::cos(w2 * th), std::sin(w2 * th));
      v(2) = inv_sqrt3 * Complex(std::cos(w3 * th), std::sin(w3 * th));
      Matrix p = v * v.adjoint();
      p(3, 3) = 1.0;
      loop.push_back(ProjectionMatrix{p});
    }
    loop.back() = loop.front();
    return loop;
  };
  bool torus_ok = true;
  try {
    torus_ok =
        torus_invariant_ex53(torus_loop(1, 0)).components == std::vector<int>{1, 0} &&
        torus_invariant_ex53(torus_loop(1, 1)).components == std::vector<int>{1, 1} &&
        torus_invariant_ex53(torus_loop(0, 0)).components == std::vector<int>{0, 0};
  } catch (const Error&) {
    torus_ok = false;
  }

  ProjectionPath gen;
  gen.d.k = 1;
  gen.d.d = RealVector::Constant(2, 0.5);
  for (int t = 0; t <= samples; ++t) {
    const double th = 2.0 * M_PI * t / samples;
    Matrix p(2, 2);
    p(0, 0) = 0.5;
    p(1, 1) = 0.5;
    p(0, 1) = 0.5 * Complex(std::cos(th), std::sin(th));
    p(1, 0) = std::conj(p(0, 1));
    gen.samples.push_back(ProjectionMatrix{p});
  }
  gen.samples.back() = gen.samples.front();
  frametop::detail::finalize_path_stats(gen);
  HomotopyConfig cfg;
  cfg.seed = Rng::derive(opts.seed, "acceptance-generator");
  const HomotopyReport rep = contract_loop(gen, cfg);

  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.pass = cp1_ok && torus_ok && !rep.success;
  res.details = std::string("circle windings ") + (cp1_ok ? "1/0/2" : "WRONG") +
                ", torus windings " + (torus_ok ? "(1,0)/(1,1)/(0,0)" : "WRONG") +
                ", generator contraction success=" + (rep.success ? "true" : "false") +
                " (critical hits " + std::to_string(rep.critical_hits) +
                ", basepoint residual " + detail::fmt(rep.basepoint_residual) + ")";
  return res;
}

// 10. Permutation covariance of the moment map and heights at 1e-12.
inline CriterionResult criterion_covariance(const Options& opts) {
  CriterionResult res{10, "covariance", false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  const uint64_t base = Rng::derive(opts.seed, "acceptance-covariance");
  auto one = [&](int i) {
    Rng rng(Rng::derive(base, static_cast<uint64_t>(i)));
    const int n = 2 + static_cast<int>(rng.next_below(7));
    const int k = static_cast<int>(rng.next_below(n + 1));
    const ProjectionMatrix p =
        gram_projection(random_frame(n, k, Rng::derive(base, 90000 + i)));
    const std::vector<int> sigma = detail::random_permutation(n, rng);
    RealVector a(n);
    for (int j = 0; j < n; ++j) a(j) = rng.next_gaussian();
    const ProjectionMatrix q = conjugate_by_permutation(p, sigma);
    const double mu_err =
        (moment_map(q) -
         permute_entries(moment_map(p), detail::inverse_permutation(sigma)))
            .cwiseAbs()
            .maxCoeff();
    const double h_err = std::abs(height(q, a) - height(p, permute_entries(a, sigma)));
    return std::max(mu_err, h_err);
  };
  double worst = 0;
  for (double e : parallel_map(1000, opts.jobs, one)) worst = std::max(worst, e);
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.pass = worst <= 1e-12;
  res.details = "1000 trials, worst identity error " + detail::fmt(worst);
  return res;
}

inline std::vector<CriterionResult> run(const Options& opts) {
  using Fn = CriterionResult (*)(const Options&);
  struct Entry {
    int id;
    const char* name;
    Fn fn;
  };
  const std::vector<Entry> all{
      {1, "frame-synthesis", criterion_synthesis},
      {2, "hypothesis-equivalence", criterion_hypothesis},
      {3, "strata-negative", criterion_strata_negative},
      {4, "strata-positive", criterion_strata_positive},
      {5, "codim-crossval", criterion_codim_crossval},
      {6, "retraction", criterion_retraction},
      {7, "point-fiber", criterion_point_fiber},
      {8, "connectivity", criterion_connectivity},
      {9, "winding-certificates", criterion_winding},
      {10, "covariance", criterion_covariance},
  };
  std::vector<CriterionResult> out;
  for (const Entry& e : all) {
    if (!opts.only.empty() &&
        std::string(e.name).find(opts.only) == std::string::npos &&
        std::to_string(e.id) != opts.only)
      continue;
    CriterionResult r;
    try {
      r = e.fn(opts);
    } catch (const std::exception& ex) {
      r.details = std::string("exception: ") + ex.what();
    }
    r.id = e.id;
    r.name = e.name;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace frametop::acceptance
