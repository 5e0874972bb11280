#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "frametop/errors.hpp"
#include "frametop/homotopy.hpp"
#include "frametop/polytope.hpp"
#include "frametop/version.hpp"

namespace frametop::io {

using json = nlohmann::json;

// 17 significant digits: enough to round-trip any double in CSV cells
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline json matrix_to_json(const Matrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json rrow = json::array(), irow = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rrow.push_back(m(r, c).real());
      irow.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()},
              {"re", std::move(re)}, {"im", std::move(im)}};
}

inline Matrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") ||
      !j.contains("re") || !j.contains("im"))
    throw ParseError("matrix object needs rows/cols/re/im");
  Eigen::Index rows, cols;
  try {
    rows = j.at("rows").get<Eigen::Index>();
    cols = j.at("cols").get<Eigen::Index>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad matrix dimensions: ") + e.what());
  }
  if (rows < 0 || cols < 0) throw ParseError("negative matrix dimensions");
  const json& re = j.at("re");
  const json& im = j.at("im");
  if (!re.is_array() || !im.is_array() ||
      static_cast<Eigen::Index>(re.size()) != rows ||
      static_cast<Eigen::Index>(im.size()) != rows)
    throw ParseError("re/im row counts disagree with rows");
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& rrow = re.at(r);
    const json& irow = im.at(r);
    if (!rrow.is_array() || !irow.is_array() ||
        static_cast<Eigen::Index>(rrow.size()) != cols ||
        static_cast<Eigen::Index>(irow.size()) != cols)
      throw ParseError("re/im column counts disagree with cols");
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!rrow.at(c).is_number() || !irow.at(c).is_number())
        throw ParseError("matrix entries must be numbers");
      m(r, c) = Complex(rrow.at(c).get<double>(), irow.at(c).get<double>());
    }
  }
  return m;
}

inline json frame_to_json(const Frame& f) {
  json j = matrix_to_json(f.m);
  j["n"] = f.n();
  j["k"] = f.k();
  return j;
}

inline Frame frame_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("k"))
    throw ParseError("frame object needs n and k");
  Frame f{matrix_from_json(j)};
  if (f.n() != j.at("n").get<Eigen::Index>() ||
      f.k() != j.at("k").get<Eigen::Index>())
    throw ParseError("frame n/k fields disagree with the matrix shape");
  return f;
}

inline json projection_to_json(const ProjectionMatrix& p) {
  json j = matrix_to_json(p.m);
  j["n"] = p.n();
  return j;
}

inline ProjectionMatrix projection_from_json(const json& j) {
  ProjectionMatrix p{matrix_from_json(j)};
  if (p.m.rows() != p.m.cols()) throw ParseError("projection must be square");
  if (j.contains("n") && j.at("n").get<Eigen::Index>() != p.n())
    throw ParseError("projection n field disagrees with the matrix shape");
  return p;
}

inline json normvector_to_json(const NormVector& nv) {
  json d = json::array();
  for (Eigen::Index i = 0; i < nv.d.size(); ++i) d.push_back(nv.d(i));
  return json{{"n", nv.n()}, {"k", nv.k}, {"d", std::move(d)}};
}

inline NormVector normvector_from_json(const json& j) {
  if (!j.is_object() || !j.contains("k") || !j.contains("d"))
    throw ParseError("norm vector object needs k and d");
  NormVector nv;
  try {
    nv.k = j.at("k").get<int>();
    const json& d = j.at("d");
    if (!d.is_array()) throw ParseError("d must be an array");
    nv.d.resize(d.size());
    for (size_t i = 0; i < d.size(); ++i) {
      if (!d.at(i).is_number()) throw ParseError("d entries must be numbers");
      nv.d(i) = d.at(i).get<double>();
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad norm vector: ") + e.what());
  }
  if (j.contains("n") &&
      j.at("n").get<Eigen::Index>() != static_cast<Eigen::Index>(nv.n()))
    throw ParseError("norm vector n field disagrees with d length");
  return nv;
}

// loop files: {"d": {...}, "samples": [...]}; samples carrying a "k" field are
// frames, bare matrices are projections
struct LoopData {
  NormVector d;
  bool frame_samples = false;
  std::vector<Frame> frames;
  std::vector<ProjectionMatrix> projections;
};

inline LoopData loop_from_json(const json& j) {
  if (!j.is_object() || !j.contains("d") || !j.contains("samples"))
    throw ParseError("loop object needs d and samples");
  LoopData loop;
  loop.d = normvector_from_json(j.at("d"));
  const json& samples = j.at("samples");
  if (!samples.is_array() || samples.empty())
    throw ParseError("samples must be a non-empty array");
  loop.frame_samples = samples.front().contains("k");
  for (const auto& s : samples) {
    if (s.contains("k") != loop.frame_samples)
      throw ParseError("samples mix frames and projections");
    if (loop.frame_samples)
      loop.frames.push_back(frame_from_json(s));
    else
      loop.projections.push_back(projection_from_json(s));
  }
  return loop;
}

inline json loop_to_json(const NormVector& d, const std::vector<Frame>& frames) {
  json samples = json::array();
  for (const auto& f : frames) samples.push_back(frame_to_json(f));
  return json{{"d", normvector_to_json(d)}, {"samples", std::move(samples)}};
}

inline json loop_to_json(const NormVector& d,
                         const std::vector<ProjectionMatrix>& projections) {
  json samples = json::array();
  for (const auto& p : projections) samples.push_back(projection_to_json(p));
  return json{{"d", normvector_to_json(d)}, {"samples", std::move(samples)}};
}

// every output embeds seed, flags, and toolkit version
inline json provenance(uint64_t seed, json config) {
  return json{{"seed", seed}, {"config", std::move(config)},
              {"version", kVersion}};
}

inline std::string csv_provenance(uint64_t seed, const std::string& config) {
  std::string out = "# frametop ";
  out += kVersion;
  out += "\n# seed=" + std::to_string(seed);
  out += "\n# config=" + config + "\n";
  return out;
}

inline json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace frametop::io
