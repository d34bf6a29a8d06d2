#pragma once

// Dense complex linear algebra used by every other header: Kronecker products,
// spectral norms, principal square roots of PSD matrices, unitary completion
// of a column, Haar-random state vectors, and a flat dense tensor type.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace pltcp {

using Complex = std::complex<double>;
using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using Index = Eigen::Index;

// Dense evaluation is capped at this many qubits unless PLTCP_MAX_QUBITS says
// otherwise. State application gets a higher ceiling since a vector of
// amplitudes is exponentially cheaper than a full unitary.
inline int max_dense_qubits() {
  if (const char* env = std::getenv("PLTCP_MAX_QUBITS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1 && v <= 62) return static_cast<int>(v);
  }
  return 14;
}

inline int max_state_qubits() { return std::max(26, max_dense_qubits()); }

inline CMatrix identity(Index n) { return CMatrix::Identity(n, n); }

// Seed mixing for reproducible per-task RNG streams (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
  std::uint64_t h = mix_seed(base);
  h = mix_seed(h ^ a);
  h = mix_seed(h ^ b);
  h = mix_seed(h ^ c);
  return h;
}

// kron(a, b)(i*p + k, j*q + l) = a(i, j) * b(k, l) for b of shape p x q.
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  if (a.size() == 0 || b.size() == 0)
    throw std::invalid_argument("kron: empty operand");
  const Index max_dim = Index(1) << max_dense_qubits();
  if (a.rows() > max_dim / b.rows() || a.cols() > max_dim / b.cols())
    throw std::invalid_argument("kron: result exceeds the dense dimension cap of 2^" +
                                std::to_string(max_dense_qubits()));
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline CMatrix kron_all(const std::vector<CMatrix>& factors) {
  if (factors.empty()) throw std::invalid_argument("kron_all: no factors");
  CMatrix out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
  return out;
}

// Zero-pad a square matrix to the next power-of-two dimension (at least 2),
// placing the padded levels last.
inline CMatrix pad_to_pow2(const CMatrix& m) {
  if (m.size() == 0 || m.rows() != m.cols())
    throw std::invalid_argument("pad_to_pow2: matrix must be square and non-empty");
  Index dim = 2;
  while (dim < m.rows()) dim *= 2;
  if (dim == m.rows()) return m;
  CMatrix out = CMatrix::Zero(dim, dim);
  out.topLeftCorner(m.rows(), m.cols()) = m;
  return out;
}

namespace detail {

inline CVector random_unit_vector(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVector v(dim);
  double norm = 0.0;
  do {
    for (Index i = 0; i < dim; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      v(i) = Complex(re, im);
    }
    norm = v.norm();
  } while (norm == 0.0);
  return v / norm;
}

// Power iteration on a^H a. Converges to the top singular value; stops when
// successive estimates agree to 1e-13 relative. Always a lower bound up to
// roundoff, which is the safe direction for every caller in this library.
template <class ApplyA, class ApplyAH>
double power_iteration_norm(Index cols, ApplyA apply_a, ApplyAH apply_ah,
                            std::mt19937_64& rng, int max_iters = 20000) {
  CVector v = random_unit_vector(cols, rng);
  double sigma = 0.0;
  for (int iter = 0; iter < max_iters; ++iter) {
    CVector w = apply_a(v);
    const double s = w.norm();
    if (s == 0.0) return 0.0;
    CVector z = apply_ah(w);
    const double zn = z.norm();
    if (zn == 0.0) return s;
    v = z / zn;
    if (iter > 0 && std::abs(s - sigma) <= 1e-13 * std::max(1.0, s)) return s;
    sigma = s;
  }
  return sigma;
}

}  // namespace detail

// Largest singular value. Exact SVD up to 256 rows/cols, seeded power
// iteration beyond that.
inline double spectral_norm(const CMatrix& a) {
  if (a.size() == 0) throw std::invalid_argument("spectral_norm: empty matrix");
  if (a.rows() <= 256 && a.cols() <= 256) {
    Eigen::JacobiSVD<CMatrix> svd(a);
    return svd.singularValues()(0);
  }
  std::mt19937_64 rng(0x9d2c5680u);
  return detail::power_iteration_norm(
      a.cols(), [&](const CVector& v) { return CVector(a * v); },
      [&](const CVector& w) { return CVector(a.adjoint() * w); }, rng);
}

// Principal square root of a Hermitian PSD matrix. Eigenvalues in
// [-1e-10, 0) are treated as roundoff and clamped to zero; anything below
// that is a genuine negative direction and gets rejected.
inline CMatrix psd_sqrt(const CMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("psd_sqrt: matrix not square");
  if (a.size() == 0) throw std::invalid_argument("psd_sqrt: empty matrix");
  if (spectral_norm(CMatrix(a - a.adjoint())) > 1e-10)
    throw std::invalid_argument("psd_sqrt: matrix not Hermitian within 1e-10");
  const CMatrix sym = (a + a.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
  if (es.info() != Eigen::Success) throw std::runtime_error("psd_sqrt: eigensolver failed");
  Eigen::VectorXd lam = es.eigenvalues();
  for (Index i = 0; i < lam.size(); ++i) {
    if (lam(i) < -1e-10)
      throw std::invalid_argument("psd_sqrt: eigenvalue " + std::to_string(lam(i)) +
                                  " below the PSD tolerance");
    if (lam(i) < 0.0) lam(i) = 0.0;
  }
  const Eigen::VectorXd root = lam.array().sqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

// Deterministic unitary whose first column is v: a Householder reflection
// carrying e0 to e^{-i arg(v0)} v, scaled back by the phase.
inline CMatrix complete_unitary(const CVector& v) {
  if (v.size() == 0) throw std::invalid_argument("complete_unitary: empty vector");
  if (std::abs(v.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("complete_unitary: vector not normalized within 1e-12");
  const Index n = v.size();
  const Complex phase = (v(0) == Complex(0.0, 0.0))
                            ? Complex(1.0, 0.0)
                            : Complex(std::polar(1.0, std::arg(v(0))));
  CVector tilted = v / phase;  // first component now real and nonnegative
  CVector w = -tilted;
  w(0) += 1.0;  // e0 - tilted
  const double wn = w.norm();
  CMatrix u;
  if (wn < 1e-14) {
    u = identity(n);
  } else {
    w /= wn;
    u = identity(n) - 2.0 * (w * w.adjoint());
  }
  return phase * u;
}

inline CVector haar_state(Index dim, std::mt19937_64& rng) {
  if (dim < 1) throw std::invalid_argument("haar_state: dimension must be positive");
  return detail::random_unit_vector(dim, rng);
}

inline CVector haar_state(Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return haar_state(dim, rng);
}

// Flat row-major tensor: the first mode varies slowest.
struct DenseTensor {
  std::vector<Index> dims;
  std::vector<Complex> entries;

  DenseTensor() = default;

  explicit DenseTensor(std::vector<Index> mode_dims)
      : dims(std::move(mode_dims)), entries(checked_total(dims), Complex(0.0, 0.0)) {}

  DenseTensor(std::vector<Index> mode_dims, std::vector<Complex> values)
      : dims(std::move(mode_dims)), entries(std::move(values)) {
    if (entries.size() != static_cast<std::size_t>(checked_total(dims)))
      throw std::invalid_argument("DenseTensor: entry count does not match mode dims");
  }

  static Index checked_total(const std::vector<Index>& mode_dims) {
    if (mode_dims.empty()) throw std::invalid_argument("DenseTensor: no modes");
    Index total = 1;
    for (Index d : mode_dims) {
      if (d < 1) throw std::invalid_argument("DenseTensor: nonpositive mode dim");
      if (total > (Index(1) << 40) / d) throw std::invalid_argument("DenseTensor: too large");
      total *= d;
    }
    return total;
  }

  Index total() const { return static_cast<Index>(entries.size()); }
  Index order() const { return static_cast<Index>(dims.size()); }

  Index linear_index(const std::vector<Index>& idx) const {
    if (idx.size() != dims.size()) throw std::invalid_argument("DenseTensor: index arity");
    Index lin = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      if (idx[k] < 0 || idx[k] >= dims[k]) throw std::out_of_range("DenseTensor: index");
      lin = lin * dims[k] + idx[k];
    }
    return lin;
  }

  Complex& at(const std::vector<Index>& idx) { return entries[linear_index(idx)]; }
  const Complex& at(const std::vector<Index>& idx) const { return entries[linear_index(idx)]; }

  double norm() const {
    double acc = 0.0;
    for (const Complex& e : entries) acc += std::norm(e);
    return std::sqrt(acc);
  }
};

}  // namespace pltcp
