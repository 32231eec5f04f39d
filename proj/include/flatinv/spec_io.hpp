// Declarative instance descriptions (JSON documents) and structured result
// reports for the command-line front end.
#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "duality.hpp"
#include "instances.hpp"
#include "superconnection.hpp"

namespace flatinv {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// InstanceSpec

struct InstanceSpec {
  // base
  std::string kind = "point";  // point | circle | torus
  std::array<int, 2> resolution{1, 1};
  std::array<double, 2> periods{1.0, 1.0};
  // bundle
  int rank = 0;
  std::string field = "complex";  // real | complex
  std::vector<Eigen::MatrixXcd> holonomies;
  std::string metric = "parallel";  // parallel | seeded-random
  // complex (graded data; empty when absent)
  std::vector<int> graded_ranks;
  Eigen::MatrixXcd differential;
  std::vector<double> volumes;
  // duality (epsilon == 0 when absent)
  int epsilon = 0;
  Eigen::MatrixXcd pairing;
  std::string j_spec = "seeded-random";
  int r0 = 0, r1 = 0, middle = 0;
  double amplitude = 0.4;
  bool injective_w1 = true;
  // quadrature
  double t_min = 1e-6, t_max = 1e6, tolerance = 1e-9;
  // seed (mandatory for any randomized spec)
  bool has_seed = false;
  std::uint64_t seed = 0;

  BaseGrid base_grid() const {
    if (kind == "point") return BaseGrid::point();
    if (kind == "circle") return BaseGrid::circle(resolution[0], periods[0]);
    if (kind == "torus")
      return BaseGrid::torus(resolution[0], resolution[1], periods[0], periods[1]);
    throw std::invalid_argument("InstanceSpec: unknown base kind '" + kind + "'");
  }
};

namespace detail_io {

inline Complex parse_entry(const Json& e) {
  if (e.is_number()) return Complex(e.get<double>(), 0.0);
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return Complex(e[0].get<double>(), e[1].get<double>());
  throw std::invalid_argument("spec: matrix entry must be a number or [re, im]");
}

inline Eigen::MatrixXcd parse_matrix(const Json& m) {
  if (!m.is_array() || m.empty() || !m[0].is_array())
    throw std::invalid_argument("spec: matrix must be a nested row-major array");
  const int rows = static_cast<int>(m.size());
  const int cols = static_cast<int>(m[0].size());
  Eigen::MatrixXcd out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(m[i].size()) != cols)
      throw std::invalid_argument("spec: ragged matrix rows");
    for (int j = 0; j < cols; ++j) out(i, j) = parse_entry(m[i][j]);
  }
  return out;
}

inline Json dump_matrix(const Eigen::MatrixXcd& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) {
      if (m(i, j).imag() == 0.0)
        row.push_back(m(i, j).real());
      else
        row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace detail_io

inline InstanceSpec parse_spec(const Json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("spec: document must be an object");
  InstanceSpec s;
  if (!doc.contains("base") || !doc["base"].is_object())
    throw std::invalid_argument("spec: missing 'base' section");
  const Json& base = doc["base"];
  s.kind = base.value("kind", std::string("point"));
  if (base.contains("resolution")) {
    const Json& r = base["resolution"];
    if (r.is_number())
      s.resolution = {r.get<int>(), r.get<int>()};
    else if (r.is_array() && !r.empty()) {
      s.resolution[0] = r[0].get<int>();
      s.resolution[1] = r.size() > 1 ? r[1].get<int>() : r[0].get<int>();
    }
  }
  if (base.contains("periods")) {
    const Json& p = base["periods"];
    if (p.is_number())
      s.periods = {p.get<double>(), p.get<double>()};
    else if (p.is_array() && !p.empty()) {
      s.periods[0] = p[0].get<double>();
      s.periods[1] = p.size() > 1 ? p[1].get<double>() : p[0].get<double>();
    }
  }
  if (doc.contains("bundle")) {
    const Json& b = doc["bundle"];
    s.rank = b.value("rank", 0);
    s.field = b.value("field", std::string("complex"));
    s.metric = b.value("metric", std::string("parallel"));
    if (b.contains("holonomies"))
      for (const Json& h : b["holonomies"]) s.holonomies.push_back(detail_io::parse_matrix(h));
  }
  if (doc.contains("complex")) {
    const Json& c = doc["complex"];
    if (c.contains("graded_ranks"))
      for (const Json& g : c["graded_ranks"]) s.graded_ranks.push_back(g.get<int>());
    if (c.contains("differential")) s.differential = detail_io::parse_matrix(c["differential"]);
    if (c.contains("volumes"))
      for (const Json& v : c["volumes"]) s.volumes.push_back(v.get<double>());
  }
  if (doc.contains("duality")) {
    const Json& d = doc["duality"];
    s.epsilon = d.value("epsilon", 0);
    if (s.epsilon != 1 && s.epsilon != -1)
      throw std::invalid_argument("spec: duality.epsilon must be +1 or -1");
    if (d.contains("pairing")) s.pairing = detail_io::parse_matrix(d["pairing"]);
    s.j_spec = d.value("j_spec", std::string("seeded-random"));
    s.r0 = d.value("r0", 0);
    s.r1 = d.value("r1", 0);
    s.middle = d.value("middle", 0);
    s.amplitude = d.value("amplitude", 0.4);
    s.injective_w1 = d.value("injective_w1", true);
  }
  if (doc.contains("quadrature")) {
    const Json& q = doc["quadrature"];
    s.t_min = q.value("t_min", 1e-6);
    s.t_max = q.value("t_max", 1e6);
    s.tolerance = q.value("tolerance", 1e-9);
  }
  if (doc.contains("seed")) {
    s.has_seed = true;
    s.seed = doc["seed"].get<std::uint64_t>();
  }
  const bool randomized = s.metric == "seeded-random" || s.j_spec == "seeded-random";
  if ((doc.contains("duality") || s.metric == "seeded-random") && randomized && !s.has_seed)
    throw std::invalid_argument("spec: seed is mandatory for randomized specs");
  return s;
}

inline InstanceSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("spec: cannot open '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("spec parse error: ") + e.what());
  }
  return parse_spec(doc);
}

inline Json spec_to_json(const InstanceSpec& s) {
  Json doc;
  doc["base"] = {{"kind", s.kind},
                 {"resolution", {s.resolution[0], s.resolution[1]}},
                 {"periods", {s.periods[0], s.periods[1]}}};
  if (s.rank > 0 || !s.holonomies.empty()) {
    Json b;
    b["rank"] = s.rank;
    b["field"] = s.field;
    b["metric"] = s.metric;
    Json hols = Json::array();
    for (const auto& h : s.holonomies) hols.push_back(detail_io::dump_matrix(h));
    b["holonomies"] = hols;
    doc["bundle"] = b;
  }
  if (!s.graded_ranks.empty()) {
    Json c;
    c["graded_ranks"] = s.graded_ranks;
    if (s.differential.size() > 0) c["differential"] = detail_io::dump_matrix(s.differential);
    if (!s.volumes.empty()) c["volumes"] = s.volumes;
    doc["complex"] = c;
  }
  if (s.epsilon != 0) {
    Json d;
    d["epsilon"] = s.epsilon;
    if (s.pairing.size() > 0) d["pairing"] = detail_io::dump_matrix(s.pairing);
    d["j_spec"] = s.j_spec;
    d["r0"] = s.r0;
    d["r1"] = s.r1;
    d["middle"] = s.middle;
    d["amplitude"] = s.amplitude;
    d["injective_w1"] = s.injective_w1;
    doc["duality"] = d;
  }
  doc["quadrature"] = {{"t_min", s.t_min}, {"t_max", s.t_max}, {"tolerance", s.tolerance}};
  if (s.has_seed) doc["seed"] = s.seed;
  return doc;
}

// FNV-1a digest of the canonical serialized spec: changes iff a field changes.
inline std::string spec_digest(const InstanceSpec& s) {
  const std::string dump = spec_to_json(s).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

// ---------------------------------------------------------------------------
// Report

struct Residual {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct Report {
  std::string command;
  std::string digest;
  std::vector<std::pair<std::string, double>> invariants;
  std::vector<Residual> residuals;
  double seconds = 0.0;

  void add_invariant(const std::string& name, double v) { invariants.emplace_back(name, v); }
  void add_residual(const std::string& name, double value, double tol) {
    residuals.push_back({name, value, tol, value < tol});
  }
  bool all_pass() const {
    for (const auto& r : residuals)
      if (!r.pass) return false;
    return true;
  }
  Json to_json() const {
    Json doc;
    doc["command"] = command;
    doc["instance_digest"] = digest;
    Json inv;
    for (const auto& [k, v] : invariants) inv[k] = v;
    doc["invariants"] = inv;
    Json res = Json::array();
    for (const auto& r : residuals)
      res.push_back({{"name", r.name},
                     {"value", r.value},
                     {"tolerance", r.tolerance},
                     {"verdict", r.pass ? "pass" : "fail"}});
    doc["residuals"] = res;
    doc["all_pass"] = all_pass();
    doc["timing_seconds"] = seconds;
    return doc;
  }
};

}  // namespace flatinv
