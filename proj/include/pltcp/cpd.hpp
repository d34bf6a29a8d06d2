#pragma once

// Tensorization of operators with site structure and alternating
// least-squares CP decomposition for rank compression.

#include <pltcp/combine.hpp>

#include <limits>
#include <optional>
#include <random>
#include <vector>

namespace pltcp {

struct CPModel {
  int rank = 0;
  std::vector<double> weights;
  std::vector<CMatrix> factor_matrices;  // one (mode_dim x rank) matrix per mode
  bool over_parameterized = false;
};

namespace detail {

inline void check_site_dims(const std::vector<int>& site_dims) {
  if (site_dims.empty()) throw std::invalid_argument("site_dims must be non-empty");
  for (int d : site_dims)
    if (d < 2) throw std::invalid_argument("site dims must be at least 2");
}

inline std::vector<Index> site_digits(Index value, const std::vector<int>& site_dims) {
  std::vector<Index> digits(site_dims.size());
  for (std::size_t k = site_dims.size(); k-- > 0;) {
    digits[k] = value % site_dims[k];
    value /= site_dims[k];
  }
  return digits;
}

}  // namespace detail

// Reorder a D x D matrix with D = prod(site_dims) into one mode per site;
// mode k has dimension site_dims[k]^2 and index r_k * site_dims[k] + c_k,
// where r_k, c_k are the site-k digits of the matrix row and column.
inline DenseTensor tensorize(const CMatrix& b, const std::vector<int>& site_dims) {
  detail::check_site_dims(site_dims);
  Index total = 1;
  for (int d : site_dims) total *= d;
  if (b.rows() != total || b.cols() != total)
    throw std::invalid_argument("tensorize: matrix dimension does not match the site dims");
  std::vector<Index> mode_dims(site_dims.size());
  for (std::size_t k = 0; k < site_dims.size(); ++k)
    mode_dims[k] = Index(site_dims[k]) * site_dims[k];
  DenseTensor t(mode_dims);
  std::vector<Index> idx(site_dims.size());
  for (Index i = 0; i < total; ++i) {
    const std::vector<Index> rows = detail::site_digits(i, site_dims);
    for (Index j = 0; j < total; ++j) {
      const std::vector<Index> cols = detail::site_digits(j, site_dims);
      for (std::size_t k = 0; k < site_dims.size(); ++k)
        idx[k] = rows[k] * site_dims[k] + cols[k];
      t.at(idx) = b(i, j);
    }
  }
  return t;
}

inline CMatrix detensorize(const DenseTensor& t, const std::vector<int>& site_dims) {
  detail::check_site_dims(site_dims);
  if (t.dims.size() != site_dims.size())
    throw std::invalid_argument("detensorize: mode count does not match the site dims");
  Index total = 1;
  for (std::size_t k = 0; k < site_dims.size(); ++k) {
    if (t.dims[k] != Index(site_dims[k]) * site_dims[k])
      throw std::invalid_argument("detensorize: mode " + std::to_string(k) +
                                  " is not the square of its site dim");
    total *= site_dims[k];
  }
  CMatrix b(total, total);
  std::vector<Index> idx(site_dims.size());
  for (Index i = 0; i < total; ++i) {
    const std::vector<Index> rows = detail::site_digits(i, site_dims);
    for (Index j = 0; j < total; ++j) {
      const std::vector<Index> cols = detail::site_digits(j, site_dims);
      for (std::size_t k = 0; k < site_dims.size(); ++k)
        idx[k] = rows[k] * site_dims[k] + cols[k];
      b(i, j) = t.at(idx);
    }
  }
  return b;
}

namespace detail {

// Scratch buffers for the ALS sweeps, reused across calls so the hot loop
// never touches the allocator after the first sweep.
struct MttkrpWork {
  std::vector<Complex> tail;  // tensor folded with the last-mode factor
  std::vector<Complex> a, b;  // ping-pong buffers for the remaining folds
};

// T contracted with conj(A_j) on every mode except k, written to `out` as a
// (dims[k] x rank) matrix. Trailing modes are folded first (the far end as a
// single GEMM), then leading modes; each later step is an elementwise
// length-rank row operation, so the cost stays near (#entries x rank).
// The last-mode GEMM depends only on factors[d-1], which a sweep updates
// last, so its result is computed when refresh_tail is set (at k == 0) and
// reused for every k < d-1 within the sweep.
inline void mttkrp(const DenseTensor& t, const std::vector<CMatrix>& factors, std::size_t k,
                   bool refresh_tail, MttkrpWork& work, CMatrix& out) {
  const std::size_t d = factors.size();
  const Index rank = factors[0].cols();
  if (d == 1) {
    // the Khatri-Rao product of no modes is the all-ones row
    out.resize(t.dims[0], rank);
    for (Index r = 0; r < rank; ++r)
      out.col(r) = Eigen::Map<const CVector>(t.entries.data(), t.total());
    return;
  }
  std::size_t hi, lo;       // modes [lo, hi) remain uncontracted, rows row-major
  Index rows;               // row count of the current fold
  Complex* cur;             // buffer holding the current fold
  if (k + 1 < d) {
    const Index last = t.dims[d - 1];
    rows = t.total() / last;
    work.tail.resize(static_cast<std::size_t>(rows * rank));
    if (refresh_tail) {
      Eigen::Map<const CMatrix> tm(t.entries.data(), rows, last);
      Eigen::Map<CMatrix> w(work.tail.data(), rows, rank);
      w.noalias() = tm * factors[d - 1].conjugate();
    }
    cur = work.tail.data();
    hi = d - 1;
    lo = 0;
  } else {
    // k is the last mode, so start from the front instead
    const Index first = t.dims[0];
    rows = t.total() / first;
    work.a.resize(static_cast<std::size_t>(rows * rank));
    Eigen::Map<const CMatrix> tm(t.entries.data(), first, rows);
    Eigen::Map<CMatrix> w(work.a.data(), rows, rank);
    w.noalias() = tm.transpose() * factors[0].conjugate();
    cur = work.a.data();
    hi = d;
    lo = 1;
  }
  work.a.resize(std::max(work.a.size(), static_cast<std::size_t>(rows * rank)));
  work.b.resize(work.a.size());
  // the tail buffer is read-only here; folds bounce between a and b
  const auto next_buffer = [&](const Complex* from) {
    return from == work.a.data() ? work.b.data() : work.a.data();
  };
  while (hi > k + 1) {
    const Index dim = t.dims[hi - 1];
    const Index groups = rows / dim;
    Complex* dst_buf = next_buffer(cur);
    Eigen::Map<const CMatrix> w(cur, rows, rank);
    Eigen::Map<CMatrix> next(dst_buf, groups, rank);
    const CMatrix fc = factors[hi - 1].conjugate();
    for (Index g = 0; g < groups; ++g) {
      auto dst = next.row(g).array();
      dst = w.row(g * dim).array() * fc.row(0).array();
      for (Index m = 1; m < dim; ++m) dst += w.row(g * dim + m).array() * fc.row(m).array();
    }
    cur = dst_buf;
    rows = groups;
    --hi;
  }
  while (lo < k) {
    const Index dim = t.dims[lo];
    const Index rest = rows / dim;
    Complex* dst_buf = next_buffer(cur);
    Eigen::Map<const CMatrix> w(cur, rows, rank);
    Eigen::Map<CMatrix> next(dst_buf, rest, rank);
    const CMatrix fc = factors[lo].conjugate();
    next.array() = w.topRows(rest).array().rowwise() * fc.row(0).array();
    for (Index m = 1; m < dim; ++m)
      next.array() += w.middleRows(m * rest, rest).array().rowwise() * fc.row(m).array();
    cur = dst_buf;
    rows = rest;
    ++lo;
  }
  out = Eigen::Map<const CMatrix>(cur, rows, rank);
}

// Khatri-Rao chain over modes [1, d); rows ordered row-major in those modes.
inline CMatrix khatri_rao_tail(const std::vector<CMatrix>& factors) {
  const int rank = static_cast<int>(factors[0].cols());
  CMatrix p = CMatrix::Ones(1, rank);
  for (std::size_t j = 1; j < factors.size(); ++j) {
    const CMatrix& a = factors[j];
    CMatrix next(p.rows() * a.rows(), rank);
    for (Index u = 0; u < p.rows(); ++u)
      for (Index m = 0; m < a.rows(); ++m)
        next.row(u * a.rows() + m).array() = p.row(u).array() * a.row(m).array();
    p = std::move(next);
  }
  return p;
}

// ||T - T_hat||_F / ||T||_F by direct reconstruction. Direct accumulation
// keeps the value meaningful well below 1e-8, where the Gram-based shortcut
// loses everything to cancellation. The tail Khatri-Rao row for each
// position is built on the fly, so nothing of tensor size is materialized.
inline double cp_rel_error(const DenseTensor& t, const std::vector<CMatrix>& factors,
                           double t_norm) {
  const std::size_t d = factors.size();
  const Index rank = factors[0].cols();
  const Index n0 = t.dims[0];
  const Index slice = t.total() / n0;
  std::vector<Index> digits(d, 0);
  std::vector<const Complex*> row(d, nullptr);  // current tail-mode factor rows
  for (std::size_t j = 1; j < d; ++j) row[j] = factors[j].data();
  std::vector<Complex> kr(static_cast<std::size_t>(rank), Complex(1.0, 0.0));
  const Complex* a0 = factors[0].data();
  double acc = 0.0;
  for (Index u = 0; u < slice; ++u) {
    if (d > 1) {
      const Complex* r1 = row[1];
      for (Index q = 0; q < rank; ++q) kr[static_cast<std::size_t>(q)] = r1[q];
      for (std::size_t j = 2; j < d; ++j) {
        const Complex* rj = row[j];
        for (Index q = 0; q < rank; ++q) kr[static_cast<std::size_t>(q)] *= rj[q];
      }
    }
    for (Index m0 = 0; m0 < n0; ++m0) {
      const Complex* arow = a0 + m0 * rank;
      Complex rec(0.0, 0.0);
      for (Index q = 0; q < rank; ++q) rec += arow[q] * kr[static_cast<std::size_t>(q)];
      acc += std::norm(rec - t.entries[static_cast<std::size_t>(m0 * slice + u)]);
    }
    for (std::size_t j = d; j-- > 1;) {
      if (++digits[j] < t.dims[j]) {
        row[j] += rank;
        break;
      }
      digits[j] = 0;
      row[j] = factors[j].data();
    }
  }
  return std::sqrt(acc) / t_norm;
}

}  // namespace detail

struct CpAlsResult {
  CPModel model;
  double rel_error = 0.0;
  int iterations = 0;
};

inline CpAlsResult cp_als(const DenseTensor& t, int rank, int max_iters = 500,
                          double tol = 1e-10, std::uint64_t seed = 0) {
  if (rank < 1) throw std::invalid_argument("cp_als: rank must be at least 1");
  if (max_iters < 1) throw std::invalid_argument("cp_als: need at least one sweep");
  const double t_norm = t.norm();
  if (t_norm == 0.0) throw std::invalid_argument("cp_als: zero tensor");
  const std::size_t d = t.dims.size();

  Index largest = 0, total = 1;
  for (Index dim : t.dims) {
    largest = std::max(largest, dim);
    total *= dim;
  }
  const bool over_parameterized = Index(rank) > total / largest;

  std::vector<CMatrix> factors(d);
  std::vector<CMatrix> grams(d);
  for (std::size_t k = 0; k < d; ++k) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(k) + 1));
    std::normal_distribution<double> dist(0.0, 1.0);
    factors[k].resize(t.dims[k], rank);
    for (Index i = 0; i < t.dims[k]; ++i)
      for (Index r = 0; r < rank; ++r) factors[k](i, r) = Complex(dist(rng), dist(rng));
    grams[k] = factors[k].adjoint() * factors[k];
  }

  const double ridge = 1e-12;
  double prev_err = std::numeric_limits<double>::infinity();
  double err = prev_err;
  int iters = 0;
  detail::MttkrpWork work;
  CMatrix m;
  for (int sweep = 1; sweep <= max_iters; ++sweep) {
    for (std::size_t k = 0; k < d; ++k) {
      detail::mttkrp(t, factors, k, k == 0, work, m);
      CMatrix g = CMatrix::Ones(rank, rank);
      for (std::size_t j = 0; j < d; ++j)
        if (j != k) g = g.cwiseProduct(grams[j]);
      g += ridge * CMatrix::Identity(rank, rank);
      // solve A conj(G) = M; G is Hermitian, so conj(G)^T = G
      factors[k] = g.ldlt().solve(m.transpose()).transpose();
      grams[k] = factors[k].adjoint() * factors[k];
    }
    err = detail::cp_rel_error(t, factors, t_norm);
    iters = sweep;
    if (std::abs(prev_err - err) < tol) break;
    prev_err = err;
  }

  CPModel model;
  model.rank = rank;
  model.over_parameterized = over_parameterized;
  model.weights.assign(static_cast<std::size_t>(rank), 1.0);
  model.factor_matrices = std::move(factors);
  for (Index r = 0; r < rank; ++r) {
    double w = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double nrm = model.factor_matrices[k].col(r).norm();
      if (nrm > 0.0)
        model.factor_matrices[k].col(r) /= nrm;
      else
        model.factor_matrices[k](0, r) = Complex(1.0, 0.0);
      w *= nrm;
    }
    model.weights[static_cast<std::size_t>(r)] = w;
  }

  // error of the returned (normalized) model
  std::vector<CMatrix> weighted = model.factor_matrices;
  for (Index r = 0; r < rank; ++r)
    weighted[0].col(r) *= model.weights[static_cast<std::size_t>(r)];
  return CpAlsResult{std::move(model), detail::cp_rel_error(t, weighted, t_norm), iters};
}

inline DenseTensor reconstruct(const CPModel& model) {
  if (model.factor_matrices.empty()) throw std::invalid_argument("reconstruct: empty model");
  std::vector<CMatrix> weighted = model.factor_matrices;
  for (Index r = 0; r < model.rank; ++r)
    weighted[0].col(r) *= model.weights[static_cast<std::size_t>(r)];
  std::vector<Index> dims;
  for (const CMatrix& f : model.factor_matrices) dims.push_back(f.rows());
  DenseTensor t(dims);
  const CMatrix p = detail::khatri_rao_tail(weighted);
  const Index slice = p.rows();
  for (Index m0 = 0; m0 < weighted[0].rows(); ++m0) {
    const CVector rec = p * weighted[0].row(m0).transpose();
    for (Index u = 0; u < slice; ++u) t.entries[static_cast<std::size_t>(m0 * slice + u)] = rec(u);
  }
  return t;
}

struct RankSweepRow {
  int rank = 0;
  int restarts = 0;
  double best_rel_error = 0.0;
  int iterations_of_best = 0;
  CPModel best_model;
};

// Per rank, the best of `restarts` seeded runs. Restarts use derived seeds in
// a fixed order, so results are reproducible; if stop_below is given, later
// restarts for a rank are skipped once the best error falls below it.
inline std::vector<RankSweepRow> rank_sweep(const DenseTensor& t, const std::vector<int>& ranks,
                                            int restarts, std::uint64_t seed,
                                            std::optional<double> stop_below = std::nullopt,
                                            int max_iters = 500, double tol = 1e-10) {
  if (ranks.empty()) throw std::invalid_argument("rank_sweep: no ranks");
  if (restarts < 1) throw std::invalid_argument("rank_sweep: need at least one restart");
  std::vector<RankSweepRow> rows;
  rows.reserve(ranks.size());
  for (int rank : ranks) {
    RankSweepRow row;
    row.rank = rank;
    row.best_rel_error = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
      CpAlsResult run = cp_als(t, rank, max_iters, tol,
                               derive_seed(seed, static_cast<std::uint64_t>(rank),
                                           static_cast<std::uint64_t>(r)));
      ++row.restarts;
      if (run.rel_error < row.best_rel_error) {
        row.best_rel_error = run.rel_error;
        row.iterations_of_best = run.iterations;
        row.best_model = std::move(run.model);
      }
      if (stop_below.has_value() && row.best_rel_error < *stop_below) break;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// Each CP term becomes one Kronecker term: column r of the mode-k factor is
// reshaped to a site_dims[k] square matrix (row digit major) and zero-padded
// to the next power of two; the weight becomes the coefficient. Zero-weight
// columns are dropped.
inline CPLikeSpec cp_to_spec(const CPModel& model, const std::vector<int>& site_dims) {
  detail::check_site_dims(site_dims);
  if (model.factor_matrices.size() != site_dims.size())
    throw std::invalid_argument("cp_to_spec: mode count does not match the site dims");
  if (model.weights.size() != static_cast<std::size_t>(model.rank))
    throw std::invalid_argument("cp_to_spec: weight count does not match the rank");
  for (std::size_t k = 0; k < site_dims.size(); ++k) {
    if (model.factor_matrices[k].rows() != Index(site_dims[k]) * site_dims[k] ||
        model.factor_matrices[k].cols() != model.rank)
      throw std::invalid_argument("cp_to_spec: factor matrix " + std::to_string(k) +
                                  " has the wrong shape");
  }
  CPLikeSpec spec;
  spec.signal_qubits = 0;
  for (int dsite : site_dims) {
    int bits = 1;
    while ((Index(1) << bits) < dsite) ++bits;
    spec.signal_qubits += bits;
  }
  for (Index r = 0; r < model.rank; ++r) {
    if (model.weights[static_cast<std::size_t>(r)] == 0.0) continue;
    std::vector<CMatrix> factors;
    for (std::size_t k = 0; k < site_dims.size(); ++k) {
      const int dsite = site_dims[k];
      CMatrix site(dsite, dsite);
      for (int row = 0; row < dsite; ++row)
        for (int col = 0; col < dsite; ++col)
          site(row, col) = model.factor_matrices[k](Index(row) * dsite + col, r);
      factors.push_back(pad_to_pow2(site));
    }
    spec.terms.push_back(std::move(factors));
    spec.coefficients.emplace_back(model.weights[static_cast<std::size_t>(r)], 0.0);
  }
  if (spec.terms.empty()) throw std::invalid_argument("cp_to_spec: all weights are zero");
  return spec;
}

}  // namespace pltcp
