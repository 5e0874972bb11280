#include <algorithm>
#include <catch2/catch_amalgamated.hpp>

#include "frametop/moment_flow.hpp"
#include "frametop/strata.hpp"

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

const StratumDescriptor* find_shift(const std::vector<StratumDescriptor>& strata,
                                    std::initializer_list<double> shift) {
  RealVector want(static_cast<Eigen::Index>(shift.size()));
  Eigen::Index i = 0;
  for (double v : shift) want(i++) = v;
  for (const auto& s : strata)
    if ((s.shift - want).cwiseAbs().maxCoeff() <= 1e-12) return &s;
  return nullptr;
}
}  // namespace

TEST_CASE("two-block codimension formula") {
  REQUIRE(stratum_codim({2, 2}, {1, 1}) == 1);
  REQUIRE(stratum_codim({2, 2}, {2, 0}) == 4);
  REQUIRE(stratum_codim({1, 3}, {1, 1}) == 2);
  REQUIRE(stratum_codim({4}, {2}) == 0);
  // both closed forms of the two-block count agree with the general sum
  for (int n = 2; n <= 8; ++n)
    for (int k = 0; k <= n; ++k)
      for (int m1 = 1; m1 <= n - 1; ++m1) {
        const int m2 = n - m1;
        for (int c2 = std::max(0, k - m1); c2 <= std::min(m2, k); ++c2) {
          const int c1 = k - c2;
          const int codim = stratum_codim({m1, m2}, {c1, c2});
          REQUIRE(codim == c1 * (m2 - c2));
          REQUIRE(codim == c1 * (n - k - m1 + c1));
        }
      }
}

TEST_CASE("codimension inputs are validated") {
  REQUIRE_THROWS_AS(stratum_codim({2, 2}, {1}), BadComposition);
  REQUIRE_THROWS_AS(stratum_codim({2, 2}, {3, 0}), BadComposition);
  REQUIRE_THROWS_AS(stratum_codim({2, -1}, {1, 0}), BadComposition);
}

TEST_CASE("strata of the doubly-degenerate vertex target") {
  const NormVector nv = make({1, 1, 0, 0}, 2);
  const auto strata = enumerate_strata(nv);
  REQUIRE(strata.size() == 11);

  int zero_shifts = 0;
  for (const auto& s : strata)
    if (s.shift.cwiseAbs().maxCoeff() <= 1e-12) ++zero_shifts;
  REQUIRE(zero_shifts == 1);
  REQUIRE(strata.front().codim_complex == 0);
  REQUIRE(strata.front().energy_level() == 0.0);

  const StratumDescriptor* shallow = find_shift(strata, {-0.5, -0.5, 0.5, 0.5});
  REQUIRE(shallow != nullptr);
  REQUIRE(shallow->codim_complex == 1);
  REQUIRE(shallow->capacities == std::vector<int>{1, 1});
  REQUIRE(shallow->energy_level() == Catch::Approx(1.0).margin(1e-12));

  const StratumDescriptor* deep = find_shift(strata, {-1, -1, 1, 1});
  REQUIRE(deep != nullptr);
  REQUIRE(deep->codim_complex == 4);
  REQUIRE(deep->capacities == std::vector<int>{2, 0});
  REQUIRE(deep->energy_level() == Catch::Approx(4.0).margin(1e-12));

  REQUIRE(min_positive_codim(nv) == 1);
}

TEST_CASE("descriptor list is sorted and internally consistent") {
  const NormVector nv = sample_polytope(5, 2, 140);
  const auto strata = enumerate_strata(nv);
  REQUIRE(!strata.empty());
  for (size_t i = 1; i < strata.size(); ++i)
    REQUIRE(strata[i - 1].codim_complex <= strata[i].codim_complex);
  for (const auto& s : strata) {
    // levels strictly decrease and capacities account for the full rank
    for (Eigen::Index i = 1; i < s.levels.size(); ++i)
      REQUIRE(s.levels(i - 1) > s.levels(i));
    int total = 0;
    std::vector<int> mults;
    for (size_t b = 0; b < s.blocks.size(); ++b) {
      total += s.capacities[b];
      mults.push_back(static_cast<int>(s.blocks[b].size()));
      for (int j : s.blocks[b]) {
        REQUIRE(nv.d(j) + s.shift(j) >= -1e-9);
        REQUIRE(nv.d(j) + s.shift(j) <= 1 + 1e-9);
        REQUIRE(s.shift(j) == Catch::Approx(s.levels(b)).margin(1e-12));
      }
    }
    REQUIRE(total == nv.k);
    REQUIRE(s.codim_complex == stratum_codim(mults, s.capacities));
  }
}

TEST_CASE("uniform targets keep nonzero strata at codimension two or more") {
  REQUIRE(min_positive_codim(uniform_d(4, 2)) == 2);
  for (const auto& s : enumerate_strata(uniform_d(5, 2)))
    if (s.block_count() >= 2) REQUIRE(s.codim_complex >= 2);
}

TEST_CASE("stratum enumeration is permutation covariant") {
  const NormVector nv = sample_polytope(5, 2, 150);
  std::vector<int> sigma{4, 2, 0, 1, 3}, inv(5);
  for (int i = 0; i < 5; ++i) inv[sigma[i]] = i;
  NormVector moved;
  moved.k = nv.k;
  moved.d = permute_entries(nv.d, sigma);

  auto keyify = [](std::vector<StratumDescriptor> list) {
    std::vector<std::string> keys;
    for (const auto& s : list) {
      std::string key = std::to_string(s.codim_complex) + "|";
      for (Eigen::Index i = 0; i < s.shift.size(); ++i)
        key += std::to_string(s.shift(i)) + ",";
      keys.push_back(key);
    }
    std::sort(keys.begin(), keys.end());
    return keys;
  };
  auto base = enumerate_strata(nv);
  for (auto& s : base) s.shift = permute_entries(s.shift, sigma);
  REQUIRE(keyify(base) == keyify(enumerate_strata(moved)));
}

TEST_CASE("critical points realize their descriptors") {
  const NormVector nv = sample_polytope(5, 2, 160);
  for (const auto& desc : enumerate_strata(nv)) {
    const ProjectionMatrix p = critical_manifold_point(desc, nv, 9);
    const CriticalityCheck crit = is_critical(p, nv, 1e-8);
    REQUIRE(crit.critical);
    REQUIRE((crit.a - desc.shift).cwiseAbs().maxCoeff() <= 1e-8);
    REQUIRE(energy(p, nv) == Catch::Approx(desc.energy_level()).margin(1e-10));
    REQUIRE(stable_manifold_membership(p, desc, 1e-6));
  }
}

TEST_CASE("corrupted descriptors are rejected") {
  const NormVector nv = make({1, 1, 0, 0}, 2);
  const auto strata = enumerate_strata(nv);
  StratumDescriptor bad = strata.at(1);
  bad.capacities[0] += 1;
  REQUIRE_THROWS_AS(critical_manifold_point(bad, nv, 1), InfeasibleDescriptor);
  StratumDescriptor worse = strata.at(1);
  worse.shift(0) += 0.25;
  REQUIRE_THROWS_AS(critical_manifold_point(worse, nv, 1), InfeasibleDescriptor);
}

TEST_CASE("stable-manifold membership distinguishes the vertex from the saddle") {
  const NormVector nv = make({1, 1, 0, 0}, 2);
  const auto strata = enumerate_strata(nv);
  const StratumDescriptor* shallow = find_shift(strata, {-0.5, -0.5, 0.5, 0.5});
  REQUIRE(shallow != nullptr);
  ProjectionMatrix vertex;
  vertex.m = Matrix::Zero(4, 4);
  vertex.m(0, 0) = 1;
  vertex.m(1, 1) = 1;
  REQUIRE_FALSE(stable_manifold_membership(vertex, *shallow, 1e-6));
  const ProjectionMatrix on_stratum = critical_manifold_point(*shallow, nv, 3);
  REQUIRE(stable_manifold_membership(on_stratum, *shallow, 1e-6));
}

TEST_CASE("Hessian index oracle agrees with the combinatorial codimension") {
  const NormVector nv = make({1, 1, 0, 0}, 2);
  for (const auto& desc : enumerate_strata(nv))
    REQUIRE(hessian_index_oracle(desc, nv, 2026) == desc.codim_complex);

  for (int trial = 0; trial < 5; ++trial) {
    const NormVector d = sample_polytope(4, 2, Rng::derive(170, trial));
    for (const auto& desc : enumerate_strata(d))
      REQUIRE(hessian_index_oracle(desc, d, 2026) == desc.codim_complex);
  }
}

TEST_CASE("size guards") {
  REQUIRE_THROWS_AS(enumerate_strata(uniform_d(10, 5)), TooLarge);
  const NormVector nv = sample_polytope(7, 3, 180);
  const auto strata = enumerate_strata(nv);
  REQUIRE_THROWS_AS(hessian_index_oracle(strata.front(), nv, 1), TooLarge);
  REQUIRE_THROWS_AS(enumerate_strata(make({0.7, 0.7, 0.7}, 2)), NotInPolytope);
}

TEST_CASE("targets with no nonzero stratum report infeasibility") {
  REQUIRE_THROWS_AS(min_positive_codim(uniform_d(3, 0)), InfeasibleDescriptor);
  REQUIRE_THROWS_AS(min_positive_codim(uniform_d(3, 3)), InfeasibleDescriptor);
}
