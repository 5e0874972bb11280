#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "frametop/homotopy.hpp"
#include "frametop/schur_horn.hpp"

using namespace frametop;

namespace {
NormVector make(std::initializer_list<double> vals, int k) {
  NormVector nv;
  nv.k = k;
  nv.d.resize(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double v : vals) nv.d(i++) = v;
  return nv;
}

ProjectionMatrix line_projection(Complex a, Complex b) {
  Eigen::Vector2cd v;
  v << a, b;
  v.normalize();
  ProjectionMatrix p;
  p.m = v * v.adjoint();
  return p;
}

std::vector<Frame> circle_frames(int turns, int samples) {
  std::vector<Frame> loop;
  const double r = 1.0 / std::sqrt(2.0);
  for (int t = 0; t <= samples; ++t) {
    const double th = 2.0 * M_PI * turns * t / samples;
    Matrix f(1, 2);
    f(0, 0) = r;
    f(0, 1) = r * Complex(std::cos(th), std::sin(th));
    loop.push_back(Frame{f});
  }
  loop.back() = loop.front();
  return loop;
}
}  // namespace

TEST_CASE("geodesics interpolate principal angles") {
  const ProjectionMatrix p0 = line_projection(1, 0);
  const ProjectionMatrix p1 = line_projection(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
  const ProjectionPath path = geodesic_path(p0, p1, 8);
  REQUIRE(path.samples.size() == 9);
  REQUIRE(max_abs(path.samples.front().m - p0.m) == 0.0);
  REQUIRE(max_abs(path.samples.back().m - p1.m) == 0.0);
  const RealVector mid = moment_map(path.samples[4]);
  const double c = std::cos(M_PI / 8), s = std::sin(M_PI / 8);
  REQUIRE(mid(0) == Catch::Approx(c * c).margin(1e-12));
  REQUIRE(mid(1) == Catch::Approx(s * s).margin(1e-12));
}

TEST_CASE("geodesics reverse cleanly") {
  const ProjectionMatrix p0 = gram_projection(random_frame(5, 2, 201));
  const ProjectionMatrix p1 = gram_projection(random_frame(5, 2, 202));
  const ProjectionPath fwd = geodesic_path(p0, p1, 6);
  const ProjectionPath back = geodesic_path(p1, p0, 6);
  for (int s = 0; s <= 6; ++s)
    REQUIRE(max_abs(fwd.samples[s].m - back.samples[6 - s].m) <= 1e-10);
}

TEST_CASE("orthogonal lines sit on the cut locus") {
  REQUIRE_THROWS_AS(geodesic_path(line_projection(1, 0), line_projection(0, 1), 4),
                    CutLocus);
}

TEST_CASE("random level loops close exactly and stay on the level") {
  const NormVector nv = uniform_d(4, 2);
  const ProjectionPath loop = random_level_loop(nv, 0.2, 16, 77);
  REQUIRE(loop.samples.size() == 17);
  REQUIRE(max_abs(loop.samples.front().m - loop.samples.back().m) == 0.0);
  REQUIRE(loop.max_level_residual <= 1e-6);
  const ProjectionPath again = random_level_loop(nv, 0.2, 16, 77);
  REQUIRE(loop.samples[5].m == again.samples[5].m);
}

TEST_CASE("frame connection stays on the level and hits the endpoints") {
  const NormVector nv = uniform_d(4, 2);
  const Frame f0 = construct_frame(nv, 301);
  const Frame f1 = construct_frame(nv, 302);
  const ConnectResult path = connect_frames(f0, f1, nv);
  REQUIRE(path.frames.front().m == f0.m);
  REQUIRE(path.frames.back().m == f1.m);
  HomotopyConfig cfg;
  for (size_t i = 0; i < path.frames.size(); ++i) {
    REQUIRE(verify_membership(path.frames[i], nv).pass(cfg.path_tol));
    if (i)
      REQUIRE((path.frames[i].m - path.frames[i - 1].m).norm() <= cfg.step_cap);
  }
  const auto& samples = path.projections.samples;
  for (size_t i = 1; i < samples.size(); ++i)
    REQUIRE(max_abs(samples[i].m - samples[i - 1].m) <= cfg.step_cap);
}

TEST_CASE("connection through a point fiber moves only the unitary gauge") {
  const NormVector nv = make({1, 1, 0, 0}, 2);
  const Frame f0 = construct_frame(nv, 311);
  const Frame f1 = construct_frame(nv, 312);
  const ConnectResult path = connect_frames(f0, f1, nv);
  REQUIRE(path.frames.front().m == f0.m);
  REQUIRE(path.frames.back().m == f1.m);
  for (const auto& p : path.projections.samples)
    REQUIRE(max_abs(p.m - path.projections.samples.front().m) <= 1e-9);
}

TEST_CASE("connection rejects frames off the level") {
  const NormVector nv = uniform_d(4, 2);
  REQUIRE_THROWS_AS(
      connect_frames(random_frame(4, 2, 1), construct_frame(nv, 2), nv),
      NotInFiber);
}

TEST_CASE("constant loops contract trivially") {
  const NormVector nv = uniform_d(4, 2);
  const ProjectionMatrix base = gram_projection(construct_frame(nv, 320));
  ProjectionPath loop;
  loop.d = nv;
  loop.samples.assign(9, base);
  detail::finalize_path_stats(loop);
  HomotopyConfig cfg;
  cfg.grid_s = 8;
  const HomotopyReport rep = contract_loop(loop, cfg);
  REQUIRE(rep.success);
  REQUIRE(rep.critical_hits == 0);
  REQUIRE(rep.nonconverged == 0);
  REQUIRE(rep.basepoint_residual <= 1e-12);
}

TEST_CASE("random loops on a generic uniform level contract") {
  const NormVector nv = uniform_d(4, 2);
  const ProjectionPath loop = random_level_loop(nv, 0.2, 24, 321);
  HomotopyConfig cfg;
  cfg.grid_s = 24;
  const HomotopyReport rep = contract_loop(loop, cfg);
  REQUIRE(rep.success);
  REQUIRE(rep.basepoint_residual <= 1e-6);
  REQUIRE(rep.max_level_residual <= 1e-5);
}

TEST_CASE("the equatorial generator refuses to contract") {
  ProjectionPath gen;
  gen.d = make({0.5, 0.5}, 1);
  for (int t = 0; t <= 48; ++t) {
    const double th = 2.0 * M_PI * t / 48;
    gen.samples.push_back(
        line_projection(1.0 / std::sqrt(2.0),
                        Complex(std::cos(th), std::sin(th)) / std::sqrt(2.0)));
  }
  gen.samples.back() = gen.samples.front();
  detail::finalize_path_stats(gen);
  HomotopyConfig cfg;
  cfg.grid_s = 16;
  const HomotopyReport rep = contract_loop(gen, cfg);
  REQUIRE_FALSE(rep.success);
}

TEST_CASE("loop contraction validates its input") {
  const NormVector nv = uniform_d(4, 2);
  ProjectionPath open_path = random_level_loop(nv, 0.2, 8, 5);
  open_path.samples.pop_back();
  detail::finalize_path_stats(open_path);
  REQUIRE_THROWS_AS(contract_loop(open_path, {}), NotInFiber);

  ProjectionPath off_level;
  off_level.d = nv;
  off_level.samples.assign(5, gram_projection(random_frame(4, 2, 4)));
  detail::finalize_path_stats(off_level);
  REQUIRE_THROWS_AS(contract_loop(off_level, {}), NotInFiber);
}

TEST_CASE("circle winding numbers") {
  REQUIRE(winding_cp1(circle_frames(1, 64)).components == std::vector<int>{1});
  REQUIRE(winding_cp1(circle_frames(0, 64)).components == std::vector<int>{0});
  REQUIRE(winding_cp1(circle_frames(2, 64)).components == std::vector<int>{2});
  REQUIRE(winding_cp1(circle_frames(-1, 64)).components == std::vector<int>{-1});
}

TEST_CASE("winding is gauge and basepoint independent") {
  auto loop = circle_frames(1, 64);
  // a fixed unit scalar on every sample
  const Complex gauge(std::cos(0.7), std::sin(0.7));
  auto gauged = loop;
  for (auto& f : gauged) f.m *= gauge;
  REQUIRE(winding_cp1(gauged).components == std::vector<int>{1});

  // cyclic reparameterization, re-closed
  auto shifted = loop;
  std::rotate(shifted.begin(), shifted.begin() + 17, shifted.end() - 1);
  shifted.back() = shifted.front();
  REQUIRE(winding_cp1(shifted).components == std::vector<int>{1});
}

TEST_CASE("winding survives small perturbations") {
  auto loop = circle_frames(2, 64);
  Rng rng(9);
  for (size_t t = 0; t + 1 < loop.size(); ++t) {
    Matrix noise = random_gaussian(1, 2, rng);
    Matrix row = loop[t].m + 1e-3 * noise;
    loop[t].m = row / row.norm();
  }
  loop.back() = loop.front();
  REQUIRE(winding_cp1(loop).components == std::vector<int>{2});
}

TEST_CASE("winding rejects degenerate loops") {
  auto open_loop = circle_frames(1, 64);
  open_loop.back().m *= Complex(std::cos(0.3), std::sin(0.3));
  REQUIRE_THROWS_AS(winding_cp1(open_loop), NotInFiber);

  std::vector<Frame> coarse;
  for (int t = 0; t <= 2; ++t) {
    const double th = M_PI * t;
    Matrix f(1, 2);
    f(0, 0) = 1.0 / std::sqrt(2.0);
    f(0, 1) = Complex(std::cos(th), std::sin(th)) / std::sqrt(2.0);
    coarse.push_back(Frame{f});
  }
  coarse.back() = coarse.front();
  REQUIRE_THROWS_AS(winding_cp1(coarse), UndersampledLoop);

  Matrix z(1, 2);
  z(0, 0) = 1;
  z(0, 1) = 0;
  std::vector<Frame> zero_loop(5, Frame{z});
  REQUIRE_THROWS_AS(winding_cp1(zero_loop), ZeroEntry);
}

TEST_CASE("torus winding pairs on the pinned-coordinate fiber") {
  auto loop_for = [](int w2, int w3) {
    std::vector<ProjectionMatrix> loop;
    const double r = 1.0 / std::sqrt(3.0);
    for (int t = 0; t <= 64; ++t) {
      const double th = 2.0 * M_PI * t / 64;
      Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
      v(0) = r;
      v(1) = r * Complex(std::cos(w2 * th), std::sin(w2 * th));
      v(2) = r * Complex(std::cos(w3 * th), std::sin(w3 * th));
      Matrix p = v * v.adjoint();
      p(3, 3) = 1.0;
      loop.push_back(ProjectionMatrix{p});
    }
    loop.back() = loop.front();
    return loop;
  };
  REQUIRE(torus_invariant_ex53(loop_for(1, 0)).components == std::vector<int>{1, 0});
  REQUIRE(torus_invariant_ex53(loop_for(1, 1)).components == std::vector<int>{1, 1});
  REQUIRE(torus_invariant_ex53(loop_for(0, 0)).components == std::vector<int>{0, 0});

  // samples whose line has the wrong entry magnitudes are not fiber points
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  v(0) = 0.8;
  v(1) = 0.6;
  Matrix p = v * v.adjoint();
  p(3, 3) = 1.0;
  std::vector<ProjectionMatrix> bad(5, ProjectionMatrix{p});
  REQUIRE_THROWS_AS(torus_invariant_ex53(bad), NotInFiber);

  std::vector<ProjectionMatrix> off(5, gram_projection(random_frame(4, 2, 12)));
  REQUIRE_THROWS_AS(torus_invariant_ex53(off), NotInFiber);
}

TEST_CASE("the isolated-fiber sampling report checks both factors") {
  const FiberPointReport rep = verify_fiber_structure_ex52(505);
  REQUIRE(rep.pass);
  REQUIRE(rep.attempted == 50);
  REQUIRE(rep.frames_checked == 50);
  REQUIRE(rep.converged >= 1);
  REQUIRE(rep.max_level_distance <= 1e-6);
  REQUIRE(rep.max_right_block <= 1e-9);
  REQUIRE(rep.max_unitary_residual <= 1e-9);
}
