// Writes example loop files for the winding and contract-loop subcommands.
//
//   make_loop cp1 [turns] [out.json]     circle of 1x2 frames (1, e^{i*turns*t})/sqrt(2)
//   make_loop torus [w2] [w3] [out.json] projection loop fixing e_4 with windings (w2, w3)
//   make_loop random [n] [k] [out.json]  retracted random loop on the uniform level set

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "frametop/frametop.hpp"
#include "frametop/io.hpp"

using namespace frametop;

namespace {

constexpr int kSamples = 64;

std::vector<Frame> cp1_loop(int turns) {
  std::vector<Frame> loop;
  const double r = 1.0 / std::sqrt(2.0);
  for (int t = 0; t <= kSamples; ++t) {
    const double th = 2.0 * M_PI * turns * t / kSamples;
    Matrix f(1, 2);
    f(0, 0) = r;
    f(0, 1) = r * Complex(std::cos(th), std::sin(th));
    loop.push_back(Frame{f});
  }
  loop.back() = loop.front();
  return loop;
}

std::vector<ProjectionMatrix> torus_loop(int w2, int w3) {
  std::vector<ProjectionMatrix> loop;
  const double r = 1.0 / std::sqrt(3.0);
  for (int t = 0; t <= kSamples; ++t) {
    const double th = 2.0 * M_PI * t / kSamples;
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
}

}  // namespace

int main(int argc, char** argv) {
  const std::string kind = argc > 1 ? argv[1] : "cp1";
  io::json out;
  std::string path = "loop.json";

  if (kind == "cp1") {
    const int turns = argc > 2 ? std::atoi(argv[2]) : 1;
    if (argc > 3) path = argv[3];
    NormVector d;
    d.k = 1;
    d.d = RealVector::Constant(2, 0.5);
    out = io::loop_to_json(d, cp1_loop(turns));
  } else if (kind == "torus") {
    const int w2 = argc > 2 ? std::atoi(argv[2]) : 1;
    const int w3 = argc > 3 ? std::atoi(argv[3]) : 0;
    if (argc > 4) path = argv[4];
    NormVector d;
    d.k = 2;
    d.d.resize(4);
    d.d << 1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0;
    out = io::loop_to_json(d, torus_loop(w2, w3));
  } else if (kind == "random") {
    const int n = argc > 2 ? std::atoi(argv[2]) : 4;
    const int k = argc > 3 ? std::atoi(argv[3]) : 2;
    if (argc > 4) path = argv[4];
    const NormVector d = uniform_d(n, k);
    const ProjectionPath loop = random_level_loop(d, 0.2, 32, 20260814);
    out = io::loop_to_json(d, loop.samples);
  } else {
    std::fprintf(stderr, "unknown loop kind '%s'\n", kind.c_str());
    return 1;
  }

  out["provenance"] = io::provenance(20260814, io::json{{"cmd", "make_loop"}, {"kind", kind}});
  std::ofstream f(path, std::ios::binary);
  f << out.dump(2) << "\n";
  std::printf("wrote %s (%s)\n", path.c_str(), kind.c_str());
  return 0;
}
