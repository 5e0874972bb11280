#include <catch2/catch_amalgamated.hpp>

#include "frametop/io.hpp"

using namespace frametop;
using frametop::io::json;

TEST_CASE("matrices round-trip through JSON exactly") {
  Rng rng(1);
  const Matrix m = random_gaussian(3, 5, rng);
  const Matrix back = io::matrix_from_json(io::matrix_to_json(m));
  REQUIRE(back.rows() == 3);
  REQUIRE(back.cols() == 5);
  REQUIRE(back == m);
}

TEST_CASE("frames and projections round-trip with their metadata") {
  const Frame f = random_frame(6, 2, 9);
  const Frame f2 = io::frame_from_json(io::frame_to_json(f));
  REQUIRE(f2.m == f.m);

  const ProjectionMatrix p = gram_projection(f);
  const ProjectionMatrix p2 = io::projection_from_json(io::projection_to_json(p));
  REQUIRE(p2.m == p.m);
}

TEST_CASE("norm vectors round-trip and validate") {
  const NormVector nv = sample_polytope(5, 2, 33);
  const NormVector back = io::normvector_from_json(io::normvector_to_json(nv));
  REQUIRE(back.k == 2);
  REQUIRE(back.d == nv.d);

  json j = io::normvector_to_json(nv);
  j["n"] = 7;
  REQUIRE_THROWS_AS(io::normvector_from_json(j), ParseError);
  REQUIRE_THROWS_AS(io::normvector_from_json(json{{"k", 2}}), ParseError);
  REQUIRE_THROWS_AS(io::normvector_from_json(json{{"k", 2}, {"d", "no"}}), ParseError);
}

TEST_CASE("frame JSON enforces consistent shape fields") {
  json j = io::frame_to_json(random_frame(5, 2, 4));
  j["k"] = 3;
  REQUIRE_THROWS_AS(io::frame_from_json(j), ParseError);
}

TEST_CASE("loops round-trip in both sample flavors") {
  const NormVector nv = uniform_d(4, 2);
  std::vector<Frame> frames{construct_frame(nv, 1), construct_frame(nv, 2),
                            construct_frame(nv, 1)};
  const io::LoopData floop = io::loop_from_json(io::loop_to_json(nv, frames));
  REQUIRE(floop.frame_samples);
  REQUIRE(floop.frames.size() == 3);
  REQUIRE(floop.frames[1].m == frames[1].m);
  REQUIRE(floop.d.d == nv.d);

  std::vector<ProjectionMatrix> projections{gram_projection(frames[0]),
                                            gram_projection(frames[1])};
  const io::LoopData ploop = io::loop_from_json(io::loop_to_json(nv, projections));
  REQUIRE_FALSE(ploop.frame_samples);
  REQUIRE(ploop.projections.size() == 2);
  REQUIRE(ploop.projections[0].m == projections[0].m);
}

TEST_CASE("loops refuse mixed or empty sample arrays") {
  const NormVector nv = uniform_d(4, 2);
  json mixed = io::loop_to_json(nv, std::vector<Frame>{construct_frame(nv, 1)});
  mixed["samples"].push_back(io::projection_to_json(gram_projection(construct_frame(nv, 2))));
  REQUIRE_THROWS_AS(io::loop_from_json(mixed), ParseError);

  json empty = io::loop_to_json(nv, std::vector<Frame>{});
  REQUIRE_THROWS_AS(io::loop_from_json(empty), ParseError);
}

TEST_CASE("text parsing wraps syntax errors") {
  REQUIRE_THROWS_AS(io::parse_text("{ nope"), ParseError);
  REQUIRE(io::parse_text("{\"a\": 1}").at("a").get<int>() == 1);
}

TEST_CASE("seventeen-digit floats survive a decimal round trip") {
  for (double x : {0.1, 1.0 / 3, 2.0 / 3, 1e-300, 12345.6789, 1.0}) {
    const std::string s = io::format_double(x);
    REQUIRE(std::stod(s) == x);
  }
  REQUIRE(io::format_double(0.5) == "0.5");
}

TEST_CASE("provenance carries the seed, the config, and the version") {
  const json p = io::provenance(42, json{{"cmd", "x"}});
  REQUIRE(p.at("seed").get<uint64_t>() == 42);
  REQUIRE(p.at("version").get<std::string>() == std::string(kVersion));
  REQUIRE(p.at("config").at("cmd").get<std::string>() == "x");

  const std::string header = io::csv_provenance(42, "cmd=x");
  REQUIRE(header.find("# seed=42") != std::string::npos);
  REQUIRE(header.find(kVersion) != std::string::npos);
  REQUIRE(header.find("cmd=x") != std::string::npos);
}

TEST_CASE("serialization is deterministic") {
  const NormVector nv = sample_polytope(6, 3, 7);
  const Frame f = construct_frame(nv, 8);
  REQUIRE(io::frame_to_json(f).dump(2) == io::frame_to_json(f).dump(2));
}
