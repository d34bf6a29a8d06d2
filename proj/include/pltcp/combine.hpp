#pragma once

// Combinators over block encodings: Kronecker products of encodings via a
// SWAP network that regroups ancillas above signals, linear combinations via
// a state-preparation pair and a select oracle, and the full sum-of-Kronecker
// synthesis pipeline with an optional shared (Fredkin-free) SWAP register.

#include <pltcp/encoding.hpp>

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pltcp {

struct StatePrepPair {
  CMatrix p_unitary;
  CMatrix q_unitary;
  double beta = 0.0;
  int b = 0;
  double eps = 0.0;
};

struct CPLikeSpec {
  std::vector<Complex> coefficients;
  std::vector<std::vector<CMatrix>> terms;
  int signal_qubits = 0;

  void validate() const {
    if (coefficients.empty()) throw std::invalid_argument("CPLikeSpec: no terms");
    if (terms.size() != coefficients.size())
      throw std::invalid_argument("CPLikeSpec: coefficient/term count mismatch");
    if (signal_qubits < 1) throw std::invalid_argument("CPLikeSpec: signal_qubits must be >= 1");
    for (const Complex& c : coefficients)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw std::invalid_argument("CPLikeSpec: non-finite coefficient");
    for (std::size_t j = 0; j < terms.size(); ++j) {
      if (terms[j].empty())
        throw std::invalid_argument("CPLikeSpec: term " + std::to_string(j) + " has no factors");
      int total = 0;
      for (const CMatrix& f : terms[j]) {
        if (f.size() == 0 || f.rows() != f.cols())
          throw std::invalid_argument("CPLikeSpec: term " + std::to_string(j) +
                                      " has a non-square factor");
        int bits = 0;
        while ((Index(1) << bits) < f.rows()) ++bits;
        if ((Index(1) << bits) != f.rows() || bits < 1)
          throw std::invalid_argument("CPLikeSpec: term " + std::to_string(j) +
                                      " has a factor whose dimension is not a power of two");
        total += bits;
      }
      if (total != signal_qubits)
        throw std::invalid_argument("CPLikeSpec: term " + std::to_string(j) + " spans " +
                                    std::to_string(total) + " qubits, expected " +
                                    std::to_string(signal_qubits));
    }
  }
};

// SWAP network moving the s signal qubits of the first register past the b
// ancillas of the second, on a + s + b + t wires. Later signal qubits hop
// first, so each travels the whole ancilla block and signal order survives;
// the ancillas may land internally permuted, which the all-zeros projection
// cannot distinguish.
inline Circuit swap_register(int a, int s, int b, int t) {
  if (a < 0 || s < 0 || b < 0 || t < 0)
    throw std::invalid_argument("swap_register: negative register size");
  const int width = a + s + b + t;
  if (width == 0) return Circuit();
  Circuit c(width);
  if (s == 0 || b == 0) return c;
  for (int i = s; i >= 1; --i) c.add(swap_gate(a + i, a + b + i));
  return c;
}

namespace detail {

// After running the swap gates, wire w holds what wire sources[w] held.
inline std::vector<int> wire_content_sources(const Circuit& swaps) {
  std::vector<int> sources(static_cast<std::size_t>(swaps.width) + 1);
  for (int w = 0; w <= swaps.width; ++w) sources[static_cast<std::size_t>(w)] = w;
  for (const Gate& g : swaps.gates) {
    if (g.kind != GateKind::swap || !g.controls.empty())
      throw std::logic_error("wire_content_sources: expected plain swap gates");
    std::swap(sources[static_cast<std::size_t>(g.targets[0])],
              sources[static_cast<std::size_t>(g.targets[1])]);
  }
  return sources;
}

// S M S^H for a swap-only circuit S, computed as an exact index relabeling.
inline CMatrix conjugate_by_swaps(const CMatrix& m, const Circuit& swaps) {
  if (swaps.gates.empty()) return m;
  const int w = swaps.width;
  const Index dim = Index(1) << w;
  if (m.rows() != dim || m.cols() != dim)
    throw std::invalid_argument("conjugate_by_swaps: dimension mismatch");
  const std::vector<int> sources = wire_content_sources(swaps);
  std::vector<Index> sigma(static_cast<std::size_t>(dim));
  for (Index z = 0; z < dim; ++z) {
    Index out = 0;
    for (int wire = 1; wire <= w; ++wire)
      out |= ((z >> (w - sources[static_cast<std::size_t>(wire)])) & 1) << (w - wire);
    sigma[static_cast<std::size_t>(z)] = out;
  }
  CMatrix res(dim, dim);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j)
      res(sigma[static_cast<std::size_t>(i)], sigma[static_cast<std::size_t>(j)]) = m(i, j);
  return res;
}

}  // namespace detail

inline BlockEncoding kron_encodings(const BlockEncoding& e1, const BlockEncoding& e2) {
  const double alpha = e1.alpha * e2.alpha;
  const int a = e1.a + e2.a;
  const int s = e1.s + e2.s;
  const double eps = e1.alpha * e2.eps + e2.alpha * e1.eps + e1.eps * e2.eps;
  const Circuit sw = swap_register(e1.a, e1.s, e2.a, e2.s);
  if (e1.is_dense() && e2.is_dense() && a + s <= kDenseCombineMaxQubits) {
    CMatrix u = detail::conjugate_by_swaps(kron(e1.dense(), e2.dense()), sw);
    return BlockEncoding(std::move(u), alpha, a, s, eps);
  }
  Circuit c(a + s);
  for (auto it = sw.gates.rbegin(); it != sw.gates.rend(); ++it) c.add(*it);
  for (const Gate& g : e1.as_circuit().gates) c.add(g);
  for (Gate g : e2.as_circuit().gates) {
    for (int& q : g.targets) q += e1.width();
    for (auto& [q, pol] : g.controls) q += e1.width();
    c.add(std::move(g));
  }
  for (const Gate& g : sw.gates) c.add(g);
  return BlockEncoding(std::move(c), alpha, a, s, eps);
}

// Fold of kron_encodings with the first-order error sum
// eps = sum_i eps_i * prod_{k != i} alpha_k replacing the accumulated one.
inline BlockEncoding kron_many(const std::vector<BlockEncoding>& bes) {
  if (bes.empty()) throw std::invalid_argument("kron_many: empty list");
  if (bes.size() == 1) return bes[0];
  BlockEncoding acc = kron_encodings(bes[0], bes[1]);
  for (std::size_t i = 2; i < bes.size(); ++i) acc = kron_encodings(acc, bes[i]);
  double eps = 0.0;
  for (std::size_t i = 0; i < bes.size(); ++i) {
    double scale = 1.0;
    for (std::size_t k = 0; k < bes.size(); ++k)
      if (k != i) scale *= bes[k].alpha;
    eps += bes[i].eps * scale;
  }
  acc.eps = eps;
  return acc;
}

// Sum_j |beta * conj(p_j) * q_j - y_j| with y zero-padded to 2^b entries.
inline double prep_residual(const StatePrepPair& pair, const std::vector<Complex>& y) {
  const Index dim = pair.p_unitary.rows();
  if (pair.q_unitary.rows() != dim)
    throw std::invalid_argument("prep_residual: mismatched pair matrices");
  double acc = 0.0;
  for (Index j = 0; j < dim; ++j) {
    const Complex target =
        j < static_cast<Index>(y.size()) ? y[static_cast<std::size_t>(j)] : Complex(0, 0);
    acc += std::abs(pair.beta * std::conj(pair.p_unitary(j, 0)) * pair.q_unitary(j, 0) - target);
  }
  return acc;
}

// Canonical preparation pair for a coefficient vector: q holds magnitudes,
// p additionally carries the conjugated phases, so beta conj(p_j) q_j = y_j.
inline StatePrepPair state_prep_pair(const std::vector<Complex>& y,
                                     std::optional<int> b_opt = std::nullopt) {
  if (y.empty()) throw std::invalid_argument("state_prep_pair: empty coefficient vector");
  double beta = 0.0;
  for (const Complex& c : y) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw std::invalid_argument("state_prep_pair: non-finite coefficient");
    beta += std::abs(c);
  }
  if (beta == 0.0) throw std::invalid_argument("state_prep_pair: all coefficients are zero");
  int b = 1;
  while ((std::size_t(1) << b) < y.size()) ++b;
  if (b_opt.has_value()) {
    if (*b_opt < 1) throw std::invalid_argument("state_prep_pair: b must be at least 1");
    if (*b_opt < 63 && (std::size_t(1) << *b_opt) < y.size())
      throw std::invalid_argument("state_prep_pair: 2^b is smaller than the coefficient count");
    b = *b_opt;
  }
  const Index dim = Index(1) << b;
  CVector p = CVector::Zero(dim);
  CVector q = CVector::Zero(dim);
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double mag = std::sqrt(std::abs(y[j]) / beta);
    q(static_cast<Index>(j)) = Complex(mag, 0.0);
    p(static_cast<Index>(j)) = std::polar(mag, -std::arg(y[j]));
  }
  p /= p.norm();
  q /= q.norm();
  StatePrepPair pair{complete_unitary(p), complete_unitary(q), beta, b, 0.0};
  pair.eps = prep_residual(pair, y);
  return pair;
}

// Block-diagonal select: gate j fires on the b-bit control pattern of j;
// patterns j >= m are left alone, giving the identity branch.
inline Circuit select_oracle(const std::vector<BlockEncoding>& encodings, int b) {
  if (encodings.empty()) throw std::invalid_argument("select_oracle: no encodings");
  const int a = encodings[0].a;
  const int s = encodings[0].s;
  for (const BlockEncoding& e : encodings)
    if (e.a != a || e.s != s)
      throw std::invalid_argument("select_oracle: encodings differ in ancilla or signal count");
  const std::size_t m = encodings.size();
  if (b < 0 || (b < 63 && (std::size_t(1) << b) < m))
    throw std::invalid_argument("select_oracle: more terms than control patterns");
  const int n = a + s;
  Circuit c(b + n);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<std::pair<int, int>> controls;
    controls.reserve(static_cast<std::size_t>(b));
    for (int k = 1; k <= b; ++k)
      controls.emplace_back(k, static_cast<int>((j >> (b - k)) & 1));
    if (encodings[j].is_dense()) {
      std::vector<int> targets(static_cast<std::size_t>(n));
      for (int q = 1; q <= n; ++q) targets[static_cast<std::size_t>(q - 1)] = b + q;
      c.add(unitary_gate(std::move(targets), encodings[j].dense(), controls));
    } else {
      for (Gate g : encodings[j].circuit().gates) {
        for (int& q : g.targets) q += b;
        for (auto& [q, pol] : g.controls) q += b;
        g.controls.insert(g.controls.end(), controls.begin(), controls.end());
        if (g.kind == GateKind::unitary) g.kind = GateKind::controlled_unitary;
        c.add(std::move(g));
      }
    }
  }
  return c;
}

inline BlockEncoding lcu(const StatePrepPair& pair, const std::vector<BlockEncoding>& encodings) {
  if (encodings.empty()) throw std::invalid_argument("lcu: no encodings");
  if (pair.b < 1) throw std::invalid_argument("lcu: preparation pair needs b >= 1");
  const double alpha = encodings[0].alpha;
  const int a = encodings[0].a;
  const int s = encodings[0].s;
  double eps2 = 0.0;
  bool all_dense = true;
  for (const BlockEncoding& e : encodings) {
    if (e.a != a || e.s != s || std::abs(e.alpha - alpha) > 1e-12 * alpha)
      throw std::invalid_argument("lcu: encodings must agree in alpha, a, and s");
    eps2 = std::max(eps2, e.eps);
    all_dense = all_dense && e.is_dense();
  }
  if ((std::size_t(1) << pair.b) < encodings.size())
    throw std::invalid_argument("lcu: preparation pair is too small for the term count");
  if (pair.p_unitary.rows() != Index(1) << pair.b)
    throw std::invalid_argument("lcu: preparation pair dimension mismatch");

  const int n = a + s;
  const int width = pair.b + n;
  const double eps = alpha * pair.eps + pair.beta * eps2;

  if (all_dense && width <= kDenseCombineMaxQubits) {
    const Index dn = Index(1) << n;
    CMatrix w = identity(Index(1) << width);
    for (std::size_t j = 0; j < encodings.size(); ++j)
      w.block(static_cast<Index>(j) * dn, static_cast<Index>(j) * dn, dn, dn) =
          encodings[j].dense();
    CMatrix u = kron(CMatrix(pair.p_unitary.adjoint()), identity(dn)) * w *
                kron(pair.q_unitary, identity(dn));
    return BlockEncoding(std::move(u), alpha * pair.beta, a + pair.b, s, eps);
  }

  Circuit c(width);
  std::vector<int> prep_targets(static_cast<std::size_t>(pair.b));
  for (int q = 1; q <= pair.b; ++q) prep_targets[static_cast<std::size_t>(q - 1)] = q;
  c.add(unitary_gate(prep_targets, pair.q_unitary));
  for (const Gate& g : select_oracle(encodings, pair.b).gates) c.add(g);
  c.add(unitary_gate(prep_targets, CMatrix(pair.p_unitary.adjoint())));
  return BlockEncoding(std::move(c), alpha * pair.beta, a + pair.b, s, eps);
}

namespace detail {

struct FactorShape {
  int s = 0;
  int a = 0;
  bool operator==(const FactorShape&) const = default;
};

struct PreparedTerms {
  std::vector<std::vector<BlockEncoding>> factor_encodings;
  std::vector<std::vector<FactorShape>> shapes;
  std::vector<double> term_alpha;
  std::size_t distinct_dilations = 0;
  bool uniform = true;
  int b = 1;
  int s = 0;
};

inline std::string matrix_key(const CMatrix& m) {
  std::string key;
  const Index r = m.rows(), c = m.cols();
  key.append(reinterpret_cast<const char*>(&r), sizeof(r));
  key.append(reinterpret_cast<const char*>(&c), sizeof(c));
  key.append(reinterpret_cast<const char*>(m.data()),
             static_cast<std::size_t>(m.size()) * sizeof(Complex));
  return key;
}

inline PreparedTerms prepare_terms(const CPLikeSpec& spec) {
  spec.validate();
  PreparedTerms out;
  out.s = spec.signal_qubits;
  const std::size_t m = spec.coefficients.size();
  while ((std::size_t(1) << out.b) < m) ++out.b;
  std::map<std::string, BlockEncoding> cache;
  out.factor_encodings.resize(m);
  out.shapes.resize(m);
  out.term_alpha.assign(m, 1.0);
  for (std::size_t j = 0; j < m; ++j) {
    for (const CMatrix& f : spec.terms[j]) {
      const std::string key = matrix_key(f);
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, dilate(f)).first;
      const BlockEncoding& enc = it->second;
      out.factor_encodings[j].push_back(enc);
      out.shapes[j].push_back({enc.s, enc.a});
      out.term_alpha[j] *= enc.alpha;
    }
    if (j > 0 && !(out.shapes[j] == out.shapes[0])) out.uniform = false;
  }
  out.distinct_dilations = cache.size();
  return out;
}

// One SWAP network for a whole term: successive registers are merged left to
// right, so its gate list matches what folding kron_encodings would produce.
inline Circuit term_swap_network(const std::vector<FactorShape>& shapes, int width, int offset) {
  Circuit c(width);
  int a_acc = shapes[0].a;
  int s_acc = shapes[0].s;
  for (std::size_t i = 1; i < shapes.size(); ++i) {
    const int bi = shapes[i].a;
    if (bi > 0 && s_acc > 0)
      for (int k = s_acc; k >= 1; --k)
        c.add(swap_gate(offset + a_acc + k, offset + a_acc + bi + k));
    a_acc += bi;
    s_acc += shapes[i].s;
  }
  return c;
}

// Select oracle with the term-internal SWAP register hoisted out of the
// controlled branches: S^H, then per-term controlled factor gates acting on
// the un-regrouped registers, then S. No controlled SWAP survives.
inline Circuit build_shared_select(const PreparedTerms& prep) {
  const std::vector<FactorShape>& shapes = prep.shapes[0];
  int a_term = 0;
  for (const FactorShape& f : shapes) a_term += f.a;
  const int n = a_term + prep.s;
  const int width = prep.b + n;
  Circuit c(width);
  const Circuit swaps = term_swap_network(shapes, width, prep.b);
  for (auto it = swaps.gates.rbegin(); it != swaps.gates.rend(); ++it) c.add(*it);
  for (std::size_t j = 0; j < prep.factor_encodings.size(); ++j) {
    std::vector<std::pair<int, int>> controls;
    for (int k = 1; k <= prep.b; ++k)
      controls.emplace_back(k, static_cast<int>((j >> (prep.b - k)) & 1));
    int pos = prep.b;
    for (const BlockEncoding& enc : prep.factor_encodings[j]) {
      const int fw = enc.width();
      std::vector<int> targets(static_cast<std::size_t>(fw));
      for (int q = 1; q <= fw; ++q) targets[static_cast<std::size_t>(q - 1)] = pos + q;
      c.add(unitary_gate(std::move(targets), enc.dense(), controls));
      pos += fw;
    }
  }
  for (const Gate& g : swaps.gates) c.add(g);
  return c;
}

}  // namespace detail

inline Circuit shared_swap_select(const CPLikeSpec& spec) {
  const detail::PreparedTerms prep = detail::prepare_terms(spec);
  if (!prep.uniform)
    throw std::invalid_argument(
        "shared_swap_select: terms must share one factor-size pattern");
  return detail::build_shared_select(prep);
}

struct CpSynthesis {
  BlockEncoding encoding;
  StatePrepPair pair;
  int term_ancillas = 0;
  int lcu_ancillas = 0;
  std::size_t distinct_dilations = 0;
  bool shared_swap_circuit = false;
};

// Full pipeline: dilate factors, Kronecker-assemble terms, pad to a uniform
// ancilla count, fold per-term subnormalizations into the coefficients (each
// term then counts as subnormalization 1), prepare the coefficient state, and
// take the linear combination. Wide circuit-backed results use the shared
// SWAP register whenever the terms share one factor pattern.
inline CpSynthesis synthesize_cp(const CPLikeSpec& spec) {
  const detail::PreparedTerms prep = detail::prepare_terms(spec);
  const std::size_t m = spec.coefficients.size();

  std::vector<BlockEncoding> terms;
  terms.reserve(m);
  int a_max = 0;
  for (std::size_t j = 0; j < m; ++j) {
    terms.push_back(kron_many(prep.factor_encodings[j]));
    a_max = std::max(a_max, terms.back().a);
  }

  std::vector<Complex> folded(m);
  std::vector<BlockEncoding> units;
  units.reserve(m);
  double eps2 = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    folded[j] = spec.coefficients[j] * prep.term_alpha[j];
    BlockEncoding t = pad_ancillas(terms[j], a_max);
    t.eps = terms[j].eps / prep.term_alpha[j];
    t.alpha = 1.0;
    eps2 = std::max(eps2, t.eps);
    units.push_back(std::move(t));
  }

  StatePrepPair pair = state_prep_pair(folded, prep.b);

  CpSynthesis out;
  out.pair = pair;
  out.term_ancillas = a_max;
  out.lcu_ancillas = pair.b;
  out.distinct_dilations = prep.distinct_dilations;

  const int width = pair.b + a_max + spec.signal_qubits;
  bool all_dense = true;
  for (const BlockEncoding& u : units) all_dense = all_dense && u.is_dense();

  if (all_dense && width <= kDenseCombineMaxQubits) {
    out.encoding = lcu(pair, units);
    return out;
  }

  Circuit c(width);
  std::vector<int> prep_targets(static_cast<std::size_t>(pair.b));
  for (int q = 1; q <= pair.b; ++q) prep_targets[static_cast<std::size_t>(q - 1)] = q;
  c.add(unitary_gate(prep_targets, pair.q_unitary));
  if (prep.uniform) {
    for (const Gate& g : detail::build_shared_select(prep).gates) c.add(g);
    out.shared_swap_circuit = true;
  } else {
    for (const Gate& g : select_oracle(units, pair.b).gates) c.add(g);
  }
  c.add(unitary_gate(prep_targets, CMatrix(pair.p_unitary.adjoint())));
  out.encoding = BlockEncoding(std::move(c), pair.beta, a_max + pair.b, spec.signal_qubits,
                               pair.eps + pair.beta * eps2);
  return out;
}

}  // namespace pltcp
