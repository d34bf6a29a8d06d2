#pragma once

// Block encodings: a unitary on a ancilla qubits plus s signal qubits whose
// top-left 2^s block approximates A / alpha. Ancillas sit above the signal
// register (most significant bits), so the encoded block is literally the
// top-left corner and post-selection keeps the first 2^s amplitudes.

#include <pltcp/circuit.hpp>
#include <pltcp/numerics.hpp>

#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>

namespace pltcp {

// Dense results from combinators stay dense up to this many total qubits;
// past it they become circuit-backed so nothing materializes a huge unitary.
inline constexpr int kDenseCombineMaxQubits = 10;

struct BlockEncoding {
  double alpha = 1.0;
  int a = 0;
  int s = 1;
  double eps = 0.0;

  std::optional<CMatrix> dense_u;
  std::optional<Circuit> circuit_u;

  BlockEncoding() = default;

  BlockEncoding(CMatrix u, double alpha_, int a_, int s_, double eps_)
      : alpha(alpha_), a(a_), s(s_), eps(eps_), dense_u(std::move(u)) {
    check_params();
    const Index dim = Index(1) << (a + s);
    if (dense_u->rows() != dim || dense_u->cols() != dim)
      throw std::invalid_argument("BlockEncoding: unitary dimension does not match 2^(a+s)");
    const double residual =
        spectral_norm(CMatrix(dense_u->adjoint() * (*dense_u) - identity(dim)));
    if (residual > 1e-10)
      throw std::invalid_argument("BlockEncoding: matrix is not unitary (residual " +
                                  std::to_string(residual) + ")");
  }

  BlockEncoding(Circuit c, double alpha_, int a_, int s_, double eps_)
      : alpha(alpha_), a(a_), s(s_), eps(eps_), circuit_u(std::move(c)) {
    check_params();
    if (circuit_u->width != a + s)
      throw std::invalid_argument("BlockEncoding: circuit width does not match a + s");
  }

  void check_params() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("BlockEncoding: alpha must be positive");
    if (a < 0) throw std::invalid_argument("BlockEncoding: negative ancilla count");
    if (s < 1) throw std::invalid_argument("BlockEncoding: need at least one signal qubit");
    if (!(eps >= 0.0)) throw std::invalid_argument("BlockEncoding: eps must be nonnegative");
  }

  int width() const { return a + s; }
  bool is_dense() const { return dense_u.has_value(); }

  const CMatrix& dense() const {
    if (!dense_u) throw std::logic_error("BlockEncoding: no dense backing");
    return *dense_u;
  }

  const Circuit& circuit() const {
    if (!circuit_u) throw std::logic_error("BlockEncoding: no circuit backing");
    return *circuit_u;
  }

  // Circuit view regardless of backing; a dense unitary becomes one gate.
  Circuit as_circuit() const {
    if (circuit_u) return *circuit_u;
    Circuit c(width());
    std::vector<int> targets(static_cast<std::size_t>(width()));
    for (int q = 1; q <= width(); ++q) targets[static_cast<std::size_t>(q - 1)] = q;
    c.add(unitary_gate(std::move(targets), *dense_u));
    return c;
  }
};

inline CMatrix leading_block(const BlockEncoding& be) {
  const Index block = Index(1) << be.s;
  if (be.is_dense()) return be.dense().topLeftCorner(block, block);
  if (be.width() > max_state_qubits())
    throw std::invalid_argument("leading_block: circuit too wide to apply");
  // Columns are |0...0> (x) |j>; with ancillas on top those are the first
  // 2^s basis states, and the projected block is the first 2^s rows.
  CMatrix m = CMatrix::Zero(Index(1) << be.width(), block);
  for (Index j = 0; j < block; ++j) m(j, j) = Complex(1, 0);
  detail::apply_circuit_to_columns(be.circuit(), m);
  return m.topRows(block);
}

inline double encoding_error(const BlockEncoding& be, const CMatrix& target) {
  const Index block = Index(1) << be.s;
  if (target.rows() != block || target.cols() != block)
    throw std::invalid_argument("encoding_error: target dimension does not match 2^s");
  return spectral_norm(CMatrix(target - be.alpha * leading_block(be)));
}

// Unitary dilation with one ancilla:
//   [ B            sqrt(I - B B^H) ]
//   [ sqrt(I - B^H B)    -B^H      ]
// for B = A / alpha. A unitary input with no explicit alpha needs no ancilla
// at all and comes back as a (1, 0, 0)-encoding of itself.
inline BlockEncoding dilate(const CMatrix& a_mat, std::optional<double> alpha = std::nullopt) {
  if (a_mat.size() == 0 || a_mat.rows() != a_mat.cols())
    throw std::invalid_argument("dilate: matrix must be square and nonempty");
  const Index n = a_mat.rows();
  int s = 0;
  while ((Index(1) << s) < n) ++s;
  if ((Index(1) << s) != n || s < 1)
    throw std::invalid_argument("dilate: dimension must be 2^s with s >= 1");

  const double nrm = spectral_norm(a_mat);
  double sub;
  if (alpha.has_value()) {
    if (!(*alpha > 0.0)) throw std::invalid_argument("dilate: alpha must be positive");
    if (*alpha < nrm * (1.0 - 1e-12))
      throw std::invalid_argument("dilate: alpha " + std::to_string(*alpha) +
                                  " is below the spectral norm " + std::to_string(nrm));
    sub = *alpha;
  } else {
    if (nrm == 0.0)
      throw std::invalid_argument("dilate: zero matrix needs an explicit alpha");
    if (spectral_norm(CMatrix(a_mat.adjoint() * a_mat - identity(n))) <= 1e-10)
      return BlockEncoding(a_mat, 1.0, 0, s, 0.0);
    sub = nrm;
  }

  // Both square roots come from one SVD of B = W S V^H, so
  // sqrt(I - B B^H) = W sqrt(I - S^2) W^H and sqrt(I - B^H B) = V sqrt(I - S^2) V^H
  // share their singular values and the off-diagonal blocks of U^H U cancel to
  // machine precision even when alpha equals the norm and S touches 1.
  const CMatrix b = a_mat / sub;
  Eigen::JacobiSVD<CMatrix> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::VectorXd comp = svd.singularValues();
  for (Index i = 0; i < comp.size(); ++i) {
    const double gap = 1.0 - comp(i) * comp(i);
    if (gap < -1e-10)
      throw std::invalid_argument("dilate: block exceeds the subnormalization");
    comp(i) = gap > 0.0 ? std::sqrt(gap) : 0.0;
  }
  const CMatrix tr = svd.matrixU() * comp.asDiagonal() * svd.matrixU().adjoint();
  const CMatrix bl = svd.matrixV() * comp.asDiagonal() * svd.matrixV().adjoint();
  CMatrix u(2 * n, 2 * n);
  u.topLeftCorner(n, n) = b;
  u.topRightCorner(n, n) = tr;
  u.bottomLeftCorner(n, n) = bl;
  u.bottomRightCorner(n, n) = -b.adjoint();
  return BlockEncoding(std::move(u), sub, 1, s, 0.0);
}

inline BlockEncoding pad_ancillas(const BlockEncoding& be, int a_new) {
  if (a_new < be.a)
    throw std::invalid_argument("pad_ancillas: cannot drop ancillas (" + std::to_string(a_new) +
                                " < " + std::to_string(be.a) + ")");
  if (a_new == be.a) return be;
  const int delta = a_new - be.a;
  if (be.is_dense() && a_new + be.s <= kDenseCombineMaxQubits) {
    CMatrix u = kron(identity(Index(1) << delta), be.dense());
    return BlockEncoding(std::move(u), be.alpha, a_new, be.s, be.eps);
  }
  Circuit shifted(a_new + be.s);
  for (Gate g : be.as_circuit().gates) {
    for (int& q : g.targets) q += delta;
    for (auto& [q, pol] : g.controls) q += delta;
    shifted.add(std::move(g));
  }
  return BlockEncoding(std::move(shifted), be.alpha, a_new, be.s, be.eps);
}

struct ApplyOutcome {
  CVector projected;           // (leading block) * psi, unnormalized
  double success_probability = 0.0;
  double expected_repetitions = std::numeric_limits<double>::infinity();
};

inline ApplyOutcome apply(const BlockEncoding& be, const CVector& psi) {
  const Index block = Index(1) << be.s;
  if (psi.size() != block)
    throw std::invalid_argument("apply: state length does not match 2^s");
  if (std::abs(psi.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("apply: state is not normalized within 1e-10");
  ApplyOutcome out;
  if (be.is_dense()) {
    out.projected = be.dense().topLeftCorner(block, block) * psi;
  } else {
    if (be.width() > max_state_qubits())
      throw std::invalid_argument("apply: circuit too wide to apply");
    CVector full = CVector::Zero(Index(1) << be.width());
    full.head(block) = psi;
    out.projected = apply_to_state(be.circuit(), full).head(block);
  }
  const double amp = out.projected.norm();
  out.success_probability = amp * amp;
  if (amp > 0.0) out.expected_repetitions = 1.0 / amp;
  return out;
}

}  // namespace pltcp
