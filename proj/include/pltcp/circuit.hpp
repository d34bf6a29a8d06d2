#pragma once

// Minimal gate-list IR. Qubits are 1-based and qubit 1 is the most
// significant bit of a basis index; gates act in list order (the first gate
// hits the state first). The same IR feeds dense evaluation, state
// application, and gate censuses; CNOT costs come from closed-form counts.

#include <pltcp/numerics.hpp>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pltcp {

enum class GateKind { unitary, controlled_unitary, swap };

struct Gate {
  GateKind kind = GateKind::unitary;
  std::vector<int> targets;                  // payload bit k belongs to targets[k]
  std::vector<std::pair<int, int>> controls; // (qubit, polarity), polarity 0 or 1
  CMatrix payload;                           // 2^|targets| square; empty for swap
};

inline Gate unitary_gate(std::vector<int> targets, CMatrix payload,
                         std::vector<std::pair<int, int>> controls = {}) {
  Gate g;
  g.kind = controls.empty() ? GateKind::unitary : GateKind::controlled_unitary;
  g.targets = std::move(targets);
  g.controls = std::move(controls);
  g.payload = std::move(payload);
  return g;
}

inline Gate swap_gate(int a, int b) {
  Gate g;
  g.kind = GateKind::swap;
  g.targets = {a, b};
  return g;
}

struct Circuit {
  int width = 0;
  std::vector<Gate> gates;

  Circuit() = default;
  explicit Circuit(int w) : width(w) {
    if (w < 1) throw std::invalid_argument("Circuit: width must be positive");
  }

  void add(Gate g) {
    validate(g);
    gates.push_back(std::move(g));
  }

  void append(const Circuit& other) {
    if (other.width != width) throw std::invalid_argument("Circuit: width mismatch on append");
    for (const Gate& g : other.gates) add(g);
  }

  void validate(const Gate& g) const {
    if (g.targets.empty()) throw std::invalid_argument("Gate: no targets");
    std::vector<bool> seen(static_cast<std::size_t>(width) + 1, false);
    auto claim = [&](int q, const char* what) {
      if (q < 1 || q > width)
        throw std::invalid_argument(std::string("Gate: ") + what + " qubit " + std::to_string(q) +
                                    " outside width " + std::to_string(width));
      if (seen[static_cast<std::size_t>(q)])
        throw std::invalid_argument(std::string("Gate: qubit ") + std::to_string(q) +
                                    " used twice");
      seen[static_cast<std::size_t>(q)] = true;
    };
    for (int q : g.targets) claim(q, "target");
    for (const auto& [q, pol] : g.controls) {
      claim(q, "control");
      if (pol != 0 && pol != 1) throw std::invalid_argument("Gate: control polarity must be 0 or 1");
    }
    if (g.kind == GateKind::swap) {
      if (g.targets.size() != 2) throw std::invalid_argument("Gate: swap needs two targets");
      if (g.payload.size() != 0) throw std::invalid_argument("Gate: swap carries no payload");
    } else {
      if (g.targets.size() > 30) throw std::invalid_argument("Gate: too many targets");
      const Index d = Index(1) << g.targets.size();
      if (g.payload.rows() != d || g.payload.cols() != d)
        throw std::invalid_argument("Gate: payload dimension " + std::to_string(g.payload.rows()) +
                                    " does not match 2^" + std::to_string(g.targets.size()));
    }
  }
};

namespace detail {

// Applies one gate to every column of `m`, whose rows index basis states.
inline void apply_gate_to_columns(const Gate& g, int width, CMatrix& m) {
  const Index dim = m.rows();
  auto bit_of = [&](int q) { return Index(1) << (width - q); };

  Index control_mask = 0, control_want = 0;
  for (const auto& [q, pol] : g.controls) {
    control_mask |= bit_of(q);
    if (pol == 1) control_want |= bit_of(q);
  }

  if (g.kind == GateKind::swap) {
    const Index b1 = bit_of(g.targets[0]);
    const Index b2 = bit_of(g.targets[1]);
    for (Index idx = 0; idx < dim; ++idx) {
      if ((idx & b1) == 0 || (idx & b2) != 0) continue;
      if ((idx & control_mask) != control_want) continue;
      m.row(idx).swap(m.row(idx ^ b1 ^ b2));
    }
    return;
  }

  const int t = static_cast<int>(g.targets.size());
  const Index d = Index(1) << t;
  std::vector<Index> tbit(static_cast<std::size_t>(t));
  Index target_mask = 0;
  for (int k = 0; k < t; ++k) {
    tbit[static_cast<std::size_t>(k)] = bit_of(g.targets[static_cast<std::size_t>(k)]);
    target_mask |= tbit[static_cast<std::size_t>(k)];
  }
  std::vector<Index> scatter(static_cast<std::size_t>(d));
  for (Index local = 0; local < d; ++local) {
    Index s = 0;
    for (int k = 0; k < t; ++k)
      if (local & (Index(1) << (t - 1 - k))) s |= tbit[static_cast<std::size_t>(k)];
    scatter[static_cast<std::size_t>(local)] = s;
  }

  CMatrix sub(d, m.cols());
  for (Index idx = 0; idx < dim; ++idx) {
    if ((idx & target_mask) != 0) continue;
    if ((idx & control_mask) != control_want) continue;
    for (Index local = 0; local < d; ++local)
      sub.row(local) = m.row(idx | scatter[static_cast<std::size_t>(local)]);
    const CMatrix out = g.payload * sub;
    for (Index local = 0; local < d; ++local)
      m.row(idx | scatter[static_cast<std::size_t>(local)]) = out.row(local);
  }
}

inline void apply_circuit_to_columns(const Circuit& c, CMatrix& m) {
  for (const Gate& g : c.gates) apply_gate_to_columns(g, c.width, m);
}

}  // namespace detail

inline CMatrix evaluate(const Circuit& c) {
  if (c.width > max_dense_qubits())
    throw std::invalid_argument("evaluate: width " + std::to_string(c.width) +
                                " exceeds the dense cap of " + std::to_string(max_dense_qubits()) +
                                " qubits (PLTCP_MAX_QUBITS overrides)");
  CMatrix m = identity(Index(1) << c.width);
  detail::apply_circuit_to_columns(c, m);
  return m;
}

inline CVector apply_to_state(const Circuit& c, const CVector& psi) {
  if (c.width > max_state_qubits())
    throw std::invalid_argument("apply_to_state: width " + std::to_string(c.width) +
                                " exceeds the state cap of " + std::to_string(max_state_qubits()) +
                                " qubits (PLTCP_MAX_QUBITS overrides)");
  if (psi.size() != Index(1) << c.width)
    throw std::invalid_argument("apply_to_state: state length does not match circuit width");
  CMatrix m = psi;
  detail::apply_circuit_to_columns(c, m);
  return CVector(m.col(0));
}

// A controlled gate that permutes two qubits, in either representation.
inline bool is_fredkin(const Gate& g) {
  if (g.controls.empty()) return false;
  if (g.kind == GateKind::swap) return true;
  if (g.kind != GateKind::controlled_unitary || g.targets.size() != 2) return false;
  CMatrix swap4 = CMatrix::Zero(4, 4);
  swap4(0, 0) = swap4(1, 2) = swap4(2, 1) = swap4(3, 3) = Complex(1, 0);
  return (g.payload - swap4).cwiseAbs().maxCoeff() == 0.0;
}

inline int fredkin_count(const Circuit& c) {
  int n = 0;
  for (const Gate& g : c.gates) n += is_fredkin(g) ? 1 : 0;
  return n;
}

struct CostReport {
  int s = 0;
  std::string regime;
  double state_prep = 0.0;
  double swap = 0.0;
  double select = 0.0;
  double total = 0.0;
};

// Leading-order CNOT counts for the three blocks of a single synthesis step.
// The state-preparation and swap counts do not depend on the regime; only the
// select block has an approximate variant, parameterized by its tolerance.
inline CostReport cnot_cost(int s, const std::string& regime,
                            std::optional<double> eps = std::nullopt) {
  if (s < 2) throw std::invalid_argument("cnot_cost: s must be at least 2");
  CostReport r;
  r.s = s;
  r.regime = regime;
  r.state_prep = (23.0 / 24.0) * s;
  r.swap = 6.0 * s;
  const double lg = std::log2(static_cast<double>(s));
  if (regime == "exact") {
    if (eps.has_value()) throw std::invalid_argument("cnot_cost: exact regime takes no eps");
    r.select = 11.0 * s * s * lg * lg;
  } else if (regime == "approx") {
    if (!eps.has_value()) throw std::invalid_argument("cnot_cost: approx regime needs eps");
    if (!(*eps > 0.0 && *eps < 1.0))
      throw std::invalid_argument("cnot_cost: eps must lie in (0, 1)");
    r.select = 11.0 * s * s * lg * std::log2(1.0 / *eps);
  } else {
    throw std::invalid_argument("cnot_cost: regime must be exact or approx");
  }
  r.total = r.state_prep + r.swap + r.select;
  return r;
}

}  // namespace pltcp
