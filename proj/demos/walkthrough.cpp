// A guided tour of the library: synthesize a tight frame with prescribed
// column norms, look at the critical strata of the ambient energy, retract a
// perturbed point back onto the level set, and connect two frames by a path.

#include <cstdio>

#include "frametop/frametop.hpp"

using namespace frametop;

int main() {
  const uint64_t seed = 20260814;

  // 1. A unit-norm tight frame of 5 vectors in C^2 corresponds to the scaled
  // diagonal target d = (2/5, ..., 2/5).
  const NormVector d = uniform_d(5, 2);
  const Frame f = construct_frame(d, Rng::derive(seed, "walkthrough"));
  const MembershipReport rep = verify_membership(f, d);
  std::printf("frame synthesis: tight residual %.2e, norm residual %.2e\n",
              rep.tight_residual, rep.max_norm_residual);
  std::printf("subset-sum hypothesis holds: %s (min subset sum %.3f)\n",
              satisfies_hypothesis(d) ? "yes" : "no", min_subset_sum(d));

  // 2. The hypothesis fails for d = (1,1,0,0); the energy then has a critical
  // stratum of complex codimension 1, which obstructs simple connectedness.
  NormVector bad;
  bad.k = 2;
  bad.d.resize(4);
  bad.d << 1, 1, 0, 0;
  std::printf("\nstrata over d = (1,1,0,0):\n");
  for (const auto& desc : enumerate_strata(bad)) {
    std::printf("  codim %d, energy %.3f, shift (", desc.codim_complex,
                desc.energy_level());
    for (Eigen::Index i = 0; i < desc.shift.size(); ++i)
      std::printf("%s%+.2f", i ? ", " : "", desc.shift(i));
    std::printf(")\n");
  }

  // 3. Retraction: start from a Haar-random projection and flow down to the
  // level set of d.
  const ProjectionMatrix p0 =
      gram_projection(random_frame(5, 2, Rng::derive(seed, "start")));
  const FlowResult flow = retract_to_level(p0, d);
  std::printf("\nretraction: %s after %d iterations, f = %.2e\n",
              to_string(flow.outcome), flow.iterations, flow.f_final);

  // 4. Connect two random frames on the level set by a piecewise-geodesic
  // path that is retracted back onto the fiber.
  const Frame f0 = construct_frame(d, Rng::derive(seed, "endpoint-0"));
  const Frame f1 = construct_frame(d, Rng::derive(seed, "endpoint-1"));
  const ConnectResult path = connect_frames(f0, f1, d);
  double worst = 0;
  for (const auto& g : path.frames)
    worst = std::max(worst, verify_membership(g, d).max_norm_residual);
  std::printf("connected %zu path samples, worst norm residual %.2e\n",
              path.frames.size(), worst);
  return 0;
}
