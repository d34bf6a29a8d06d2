#pragma once

// Example operator families: transverse-field chains, the spin-1 chain with
// its zero-padded embedding, and sums of the M..L..M Kronecker form.

#include <pltcp/combine.hpp>

namespace pltcp {

inline CMatrix pauli_i() { return identity(2); }

inline CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

inline CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// Spin-1 generators in the standard representation; each has eigenvalues
// {1, 0, -1} and therefore unit spectral norm.
inline CMatrix spin1_x() {
  const double r = 1.0 / std::sqrt(2.0);
  CMatrix m = CMatrix::Zero(3, 3);
  m(0, 1) = m(1, 0) = m(1, 2) = m(2, 1) = r;
  return m;
}

inline CMatrix spin1_y() {
  const double r = 1.0 / std::sqrt(2.0);
  CMatrix m = CMatrix::Zero(3, 3);
  m(0, 1) = m(1, 2) = Complex(0, -r);
  m(1, 0) = m(2, 1) = Complex(0, r);
  return m;
}

inline CMatrix spin1_z() {
  CMatrix m = CMatrix::Zero(3, 3);
  m(0, 0) = 1;
  m(2, 2) = -1;
  return m;
}

struct ModelPair {
  CPLikeSpec spec;
  CMatrix dense;
};

// H = -sum_i Z_i Z_{i+1} - h sum_i X_i on s sites. Terms with zero
// coefficient (the X row at h = 0) are omitted, so m = 2s-1 only when h != 0.
inline ModelPair tfim(int s, double h) {
  if (s < 2) throw std::invalid_argument("tfim: need at least two sites");
  ModelPair out;
  out.spec.signal_qubits = s;
  const CMatrix id = pauli_i();
  auto add_term = [&](const std::vector<CMatrix>& factors, double coeff) {
    out.spec.terms.push_back(factors);
    out.spec.coefficients.emplace_back(coeff, 0.0);
  };
  for (int i = 0; i + 1 < s; ++i) {
    std::vector<CMatrix> fs(static_cast<std::size_t>(s), id);
    fs[static_cast<std::size_t>(i)] = pauli_z();
    fs[static_cast<std::size_t>(i) + 1] = pauli_z();
    add_term(fs, -1.0);
  }
  if (h != 0.0) {
    for (int i = 0; i < s; ++i) {
      std::vector<CMatrix> fs(static_cast<std::size_t>(s), id);
      fs[static_cast<std::size_t>(i)] = pauli_x();
      add_term(fs, -h);
    }
  }
  const Index dim = Index(1) << s;
  out.dense = CMatrix::Zero(dim, dim);
  for (std::size_t j = 0; j < out.spec.terms.size(); ++j)
    out.dense += out.spec.coefficients[j] * kron_all(out.spec.terms[j]);
  return out;
}

struct XyzModel {
  CPLikeSpec spec;
  CMatrix dense3;
  CMatrix dense4;
};

// Isotropic spin-1 chain H = sum_i X_i X_{i+1} + Y_i Y_{i+1} + Z_i Z_{i+1}.
// dense3 lives on the native 3^s space; dense4 embeds it on 4^s by padding
// each site, and the spec's factors are the padded 4x4 site operators, with
// the padded identity diag(1,1,1,0) on inactive sites so the embedding is
// reproduced exactly.
inline XyzModel xyz(int s) {
  if (s < 2) throw std::invalid_argument("xyz: need at least two sites");
  XyzModel out;
  out.spec.signal_qubits = 2 * s;
  const std::vector<CMatrix> gen3 = {spin1_x(), spin1_y(), spin1_z()};
  const CMatrix id3 = identity(3);
  const CMatrix id4 = pad_to_pow2(id3);

  Index dim3 = 1;
  for (int i = 0; i < s; ++i) dim3 *= 3;
  out.dense3 = CMatrix::Zero(dim3, dim3);
  for (int i = 0; i + 1 < s; ++i) {
    for (const CMatrix& g : gen3) {
      std::vector<CMatrix> fs3(static_cast<std::size_t>(s), id3);
      fs3[static_cast<std::size_t>(i)] = g;
      fs3[static_cast<std::size_t>(i) + 1] = g;
      out.dense3 += kron_all(fs3);

      std::vector<CMatrix> fs4(static_cast<std::size_t>(s), id4);
      fs4[static_cast<std::size_t>(i)] = pad_to_pow2(g);
      fs4[static_cast<std::size_t>(i) + 1] = pad_to_pow2(g);
      out.spec.terms.push_back(std::move(fs4));
      out.spec.coefficients.emplace_back(1.0, 0.0);
    }
  }

  // embedding by base-3 to base-4 digit relabeling, independent of the terms
  const Index dim4 = Index(1) << (2 * s);
  out.dense4 = CMatrix::Zero(dim4, dim4);
  std::vector<Index> embed(static_cast<std::size_t>(dim3));
  for (Index z = 0; z < dim3; ++z) {
    Index rest = z, mapped = 0, scale = 1;
    for (int i = 0; i < s; ++i) {
      mapped += (rest % 3) * scale;
      rest /= 3;
      scale *= 4;
    }
    embed[static_cast<std::size_t>(z)] = mapped;
  }
  for (Index i = 0; i < dim3; ++i)
    for (Index j = 0; j < dim3; ++j)
      out.dense4(embed[static_cast<std::size_t>(i)], embed[static_cast<std::size_t>(j)]) =
          out.dense3(i, j);
  return out;
}

// sum_j M_1 x ... x M_{j-1} x L_j x M_{j+1} x ... x M_d with unit weights.
inline ModelPair laplace_like(const std::vector<CMatrix>& m_list,
                              const std::vector<CMatrix>& l_list) {
  if (m_list.empty() || m_list.size() != l_list.size())
    throw std::invalid_argument("laplace_like: operator lists must be non-empty and equal length");
  const std::size_t d = m_list.size();
  for (std::size_t k = 0; k < d; ++k)
    if (m_list[k].rows() != l_list[k].rows() || m_list[k].cols() != l_list[k].cols())
      throw std::invalid_argument("laplace_like: slot " + std::to_string(k) +
                                  " has inconsistent dimensions");
  ModelPair out;
  int total = 0;
  for (const CMatrix& m : m_list) {
    if (m.size() == 0 || m.rows() != m.cols())
      throw std::invalid_argument("laplace_like: operators must be square");
    int bits = 0;
    while ((Index(1) << bits) < m.rows()) ++bits;
    if ((Index(1) << bits) != m.rows() || bits < 1)
      throw std::invalid_argument("laplace_like: operator dimensions must be powers of two");
    total += bits;
  }
  out.spec.signal_qubits = total;
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<CMatrix> fs(m_list.begin(), m_list.end());
    fs[j] = l_list[j];
    out.spec.terms.push_back(std::move(fs));
    out.spec.coefficients.emplace_back(1.0, 0.0);
  }
  const Index dim = Index(1) << total;
  out.dense = CMatrix::Zero(dim, dim);
  for (std::size_t j = 0; j < d; ++j) out.dense += kron_all(out.spec.terms[j]);
  return out;
}

}  // namespace pltcp
