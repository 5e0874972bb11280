#include <catch2/catch_amalgamated.hpp>

#include "frametop/polytope.hpp"

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
}  // namespace

TEST_CASE("polytope membership") {
  REQUIRE(in_polytope(uniform_d(5, 2)));
  REQUIRE(in_polytope(make({1, 1, 0, 0}, 2)));
  REQUIRE_FALSE(in_polytope(make({0.7, 0.7, 0.7}, 2)));       // sum 2.1
  REQUIRE_FALSE(in_polytope(make({1.2, 0.4, 0.4}, 2)));       // entry > 1
  REQUIRE_FALSE(in_polytope(make({0.5, -0.1, 0.6}, 1)));      // entry < 0
  REQUIRE_FALSE(in_polytope(make({0.5, 0.5}, 3)));            // k > n
}

TEST_CASE("smallest subset sums") {
  REQUIRE(min_subset_sum(uniform_d(5, 2)) == Catch::Approx(1.2).margin(1e-12));
  REQUIRE(min_subset_sum(make({1, 1, 0, 0}, 2)) == 0.0);
  REQUIRE(min_subset_sum(make({1.0 / 3, 1.0 / 3, 1.0 / 3, 1}, 2)) ==
          Catch::Approx(2.0 / 3).margin(1e-12));
  REQUIRE(min_subset_sum(make({1, 1, 1}, 3)) == 0.0);  // nothing to pick
}

TEST_CASE("subset-sum hypothesis on the uniform grid") {
  for (int n = 1; n <= 10; ++n)
    for (int k = 0; k <= n; ++k) {
      const bool expected = (n == k) || (k >= 2 && k <= n - 2);
      REQUIRE(satisfies_hypothesis(uniform_d(n, k)) == expected);
    }
}

TEST_CASE("hypothesis requires a valid target") {
  REQUIRE_THROWS_AS(satisfies_hypothesis(make({0.7, 0.7, 0.7}, 2)), NotInPolytope);
  REQUIRE_THROWS_AS(brute_force_hypothesis(make({0.7, 0.7, 0.7}, 2)), NotInPolytope);
}

TEST_CASE("fast hypothesis check agrees with subset enumeration") {
  for (int trial = 0; trial < 500; ++trial) {
    Rng rng(Rng::derive(99, trial));
    const int n = 1 + static_cast<int>(rng.next_below(10));
    const int k = static_cast<int>(rng.next_below(n + 1));
    const NormVector nv = sample_polytope(n, k, Rng::derive(1000, trial));
    REQUIRE(satisfies_hypothesis(nv) == brute_force_hypothesis(nv));
  }
}

TEST_CASE("subset enumeration refuses huge problems") {
  REQUIRE_THROWS_AS(brute_force_hypothesis(uniform_d(40, 20)), TooLarge);
}

TEST_CASE("polytope sampling stays inside and is reproducible") {
  for (int trial = 0; trial < 50; ++trial) {
    const NormVector nv = sample_polytope(6, 3, trial);
    REQUIRE(in_polytope(nv));
  }
  REQUIRE(sample_polytope(6, 3, 5).d == sample_polytope(6, 3, 5).d);
  REQUIRE((sample_polytope(6, 3, 5).d - sample_polytope(6, 3, 6).d)
              .cwiseAbs()
              .maxCoeff() > 1e-3);
}

TEST_CASE("sampling corner ranks") {
  REQUIRE(sample_polytope(4, 0, 1).d == RealVector::Zero(4));
  REQUIRE(sample_polytope(4, 4, 1).d == RealVector::Ones(4));
}

TEST_CASE("dimension validation") {
  REQUIRE_THROWS_AS(uniform_d(4, 5), BadDimensions);
  REQUIRE_THROWS_AS(uniform_d(0, 0), BadDimensions);
  REQUIRE_THROWS_AS(sample_polytope(3, -1, 0), BadDimensions);
}
