#pragma once
// JSON and CSV interchange.
//
//   matrix / tensor  {"dims": [..], "entries": [[re, im], ..]}   row-major
//   circuit          {"width": n, "gates": [{"kind", "targets", "controls", "payload"}]}
//   encoding         {"alpha", "a", "s", "eps", "unitary": matrix-or-circuit}
//   spec             {"y": [[re, im], ..], "terms": [[matrix, ..], ..]}
//
// Circuits are recognized by a "width" key, matrices by "dims".  Floats in
// CSV output use 17 significant digits so runs reproduce byte for byte.

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include <pltcp/combine.hpp>

namespace pltcp {

using nlohmann::json;

inline std::string format_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Parse with line/column diagnostics instead of nlohmann's byte offsets.
inline json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = e.byte > 0 ? std::min(text.size(), e.byte - 1) : 0;
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw std::runtime_error("JSON parse error at line " + std::to_string(line) + ", column " +
                             std::to_string(col) + ": " + e.what());
  }
}

namespace detail {

inline Complex complex_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::runtime_error(where + ": expected a [re, im] pair");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

inline json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

}  // namespace detail

inline json matrix_to_json(const CMatrix& m) {
  json entries = json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) entries.push_back(detail::complex_to_json(m(i, j)));
  return json{{"dims", {m.rows(), m.cols()}}, {"entries", std::move(entries)}};
}

inline CMatrix matrix_from_json(const json& j, const std::string& where = "matrix") {
  if (!j.is_object() || !j.contains("dims") || !j.contains("entries"))
    throw std::runtime_error(where + ": expected an object with \"dims\" and \"entries\"");
  const json& dims = j["dims"];
  if (!dims.is_array() || dims.size() != 2)
    throw std::runtime_error(where + ": \"dims\" must be [rows, cols]");
  const Index rows = dims[0].get<Index>(), cols = dims[1].get<Index>();
  if (rows < 1 || cols < 1) throw std::runtime_error(where + ": dims must be positive");
  const json& entries = j["entries"];
  if (!entries.is_array() || static_cast<Index>(entries.size()) != rows * cols)
    throw std::runtime_error(where + ": expected " + std::to_string(rows * cols) + " entries, got " +
                             std::to_string(entries.size()));
  CMatrix m(rows, cols);
  for (Index at = 0; at < rows * cols; ++at)
    m(at / cols, at % cols) = detail::complex_from_json(entries[static_cast<std::size_t>(at)],
                                                        where + " entry " + std::to_string(at));
  return m;
}

inline json tensor_to_json(const DenseTensor& t) {
  json entries = json::array();
  for (const Complex& z : t.entries) entries.push_back(detail::complex_to_json(z));
  return json{{"dims", t.dims}, {"entries", std::move(entries)}};
}

inline DenseTensor tensor_from_json(const json& j, const std::string& where = "tensor") {
  if (!j.is_object() || !j.contains("dims") || !j.contains("entries"))
    throw std::runtime_error(where + ": expected an object with \"dims\" and \"entries\"");
  std::vector<Index> dims;
  for (const json& d : j["dims"]) dims.push_back(d.get<Index>());
  DenseTensor t(dims);
  const json& entries = j["entries"];
  if (static_cast<std::size_t>(entries.size()) != t.entries.size())
    throw std::runtime_error(where + ": expected " + std::to_string(t.entries.size()) +
                             " entries, got " + std::to_string(entries.size()));
  for (std::size_t i = 0; i < t.entries.size(); ++i)
    t.entries[i] = detail::complex_from_json(entries[i], where + " entry " + std::to_string(i));
  return t;
}

inline json circuit_to_json(const Circuit& c) {
  json gates = json::array();
  for (const Gate& g : c.gates) {
    json jg;
    switch (g.kind) {
      case GateKind::unitary: jg["kind"] = "unitary"; break;
      case GateKind::controlled_unitary: jg["kind"] = "controlled_unitary"; break;
      case GateKind::swap: jg["kind"] = "swap"; break;
    }
    jg["targets"] = g.targets;
    json controls = json::array();
    for (const auto& [q, pol] : g.controls) controls.push_back(json::array({q, pol}));
    jg["controls"] = std::move(controls);
    if (g.kind != GateKind::swap) jg["payload"] = matrix_to_json(g.payload);
    gates.push_back(std::move(jg));
  }
  return json{{"width", c.width}, {"gates", std::move(gates)}};
}

inline Circuit circuit_from_json(const json& j, const std::string& where = "circuit") {
  if (!j.is_object() || !j.contains("width") || !j.contains("gates"))
    throw std::runtime_error(where + ": expected an object with \"width\" and \"gates\"");
  Circuit c(j["width"].get<int>());
  std::size_t at = 0;
  for (const json& jg : j["gates"]) {
    const std::string here = where + " gate " + std::to_string(at++);
    Gate g;
    const std::string kind = jg.at("kind").get<std::string>();
    if (kind == "unitary")
      g.kind = GateKind::unitary;
    else if (kind == "controlled_unitary")
      g.kind = GateKind::controlled_unitary;
    else if (kind == "swap")
      g.kind = GateKind::swap;
    else
      throw std::runtime_error(here + ": unknown kind \"" + kind + "\"");
    for (const json& t : jg.at("targets")) g.targets.push_back(t.get<int>());
    if (jg.contains("controls"))
      for (const json& ctl : jg["controls"]) {
        if (!ctl.is_array() || ctl.size() != 2)
          throw std::runtime_error(here + ": controls must be [qubit, polarity] pairs");
        g.controls.emplace_back(ctl[0].get<int>(), ctl[1].get<int>());
      }
    if (g.kind != GateKind::swap) g.payload = matrix_from_json(jg.at("payload"), here + " payload");
    try {
      c.add(std::move(g));
    } catch (const std::exception& e) {
      throw std::runtime_error(here + ": " + e.what());
    }
  }
  return c;
}

inline json encoding_to_json(const BlockEncoding& be) {
  json j{{"alpha", be.alpha}, {"a", be.a}, {"s", be.s}, {"eps", be.eps}};
  j["unitary"] = be.is_dense() ? matrix_to_json(be.dense()) : circuit_to_json(be.circuit());
  return j;
}

inline BlockEncoding encoding_from_json(const json& j, const std::string& where = "encoding") {
  for (const char* key : {"alpha", "a", "s", "eps", "unitary"})
    if (!j.is_object() || !j.contains(key))
      throw std::runtime_error(where + ": missing \"" + key + "\"");
  const json& u = j["unitary"];
  try {
    if (u.is_object() && u.contains("width"))
      return BlockEncoding(circuit_from_json(u, where + " unitary"), j["alpha"].get<double>(),
                           j["a"].get<int>(), j["s"].get<int>(), j["eps"].get<double>());
    return BlockEncoding(matrix_from_json(u, where + " unitary"), j["alpha"].get<double>(),
                         j["a"].get<int>(), j["s"].get<int>(), j["eps"].get<double>());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(where + ": " + e.what());
  }
}

inline json spec_to_json(const CPLikeSpec& spec) {
  json y = json::array();
  for (const Complex& z : spec.coefficients) y.push_back(detail::complex_to_json(z));
  json terms = json::array();
  for (const auto& term : spec.terms) {
    json factors = json::array();
    for (const CMatrix& f : term) factors.push_back(matrix_to_json(f));
    terms.push_back(std::move(factors));
  }
  return json{{"y", std::move(y)}, {"terms", std::move(terms)}};
}

inline CPLikeSpec spec_from_json(const json& j) {
  if (!j.is_object() || !j.contains("y") || !j.contains("terms"))
    throw std::runtime_error("spec: expected an object with \"y\" and \"terms\"");
  CPLikeSpec spec;
  std::size_t at = 0;
  for (const json& z : j["y"])
    spec.coefficients.push_back(detail::complex_from_json(z, "spec y[" + std::to_string(at++) + "]"));
  at = 0;
  for (const json& jt : j["terms"]) {
    const std::string here = "spec term " + std::to_string(at++);
    if (!jt.is_array() || jt.empty())
      throw std::runtime_error(here + ": expected a non-empty array of factor matrices");
    std::vector<CMatrix> term;
    std::size_t fat = 0;
    for (const json& jf : jt)
      term.push_back(matrix_from_json(jf, here + " factor " + std::to_string(fat++)));
    spec.terms.push_back(std::move(term));
  }
  // Signal width follows from the first term's factor sizes; validate() then
  // checks every term against it and reports the offender by index.
  int s = 0;
  if (!spec.terms.empty())
    for (const CMatrix& f : spec.terms[0]) {
      Index d = f.rows();
      while (d > 1 && d % 2 == 0) {
        ++s;
        d /= 2;
      }
    }
  spec.signal_qubits = s;
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("spec: ") + e.what());
  }
  return spec;
}

}  // namespace pltcp
