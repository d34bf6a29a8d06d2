#include <catch2/catch_amalgamated.hpp>

#include <pltcp/numerics.hpp>

#include <complex>
#include <random>
#include <vector>

using namespace pltcp;

namespace {

CMatrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
  return m;
}

// Entries are small integers over 4, so triple products stay exact in binary
// floating point and associativity can be checked with equality.
CMatrix random_dyadic_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(-8, 8);
  CMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = Complex(pick(rng) / 4.0, pick(rng) / 4.0);
  return m;
}

// Independent Kronecker oracle: plain loops over flat storage, no Eigen blocks.
std::vector<Complex> kron_oracle(const CMatrix& a, const CMatrix& b) {
  const Index ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
  std::vector<Complex> out(static_cast<std::size_t>(ar * br * ac * bc));
  for (Index i = 0; i < ar; ++i)
    for (Index j = 0; j < ac; ++j)
      for (Index k = 0; k < br; ++k)
        for (Index l = 0; l < bc; ++l)
          out[static_cast<std::size_t>((i * br + k) * (ac * bc) + (j * bc + l))] =
              a(i, j) * b(k, l);
  return out;
}

// Independent norm oracle: power iteration on a^H a written from scratch.
double norm_oracle(const CMatrix& a, int iters = 4000) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVector v(a.cols());
  for (Index i = 0; i < v.size(); ++i) v(i) = Complex(gauss(rng), gauss(rng));
  v /= v.norm();
  double sigma = 0.0;
  for (int it = 0; it < iters; ++it) {
    CVector w = a * v;
    sigma = w.norm();
    CVector z = a.adjoint() * w;
    if (z.norm() == 0.0) break;
    v = z / z.norm();
  }
  return sigma;
}

}  // namespace

TEST_CASE("kron matches an index-formula oracle on random matrices") {
  const CMatrix a = random_matrix(3, 3, 11);
  const CMatrix b = random_matrix(3, 3, 12);
  const CMatrix k = kron(a, b);
  const std::vector<Complex> expected = kron_oracle(a, b);
  REQUIRE(k.rows() == 9);
  REQUIRE(k.cols() == 9);
  for (Index i = 0; i < 9; ++i)
    for (Index j = 0; j < 9; ++j)
      REQUIRE(k(i, j) == expected[static_cast<std::size_t>(i * 9 + j)]);
}

TEST_CASE("kron reproduces hand-computed small products") {
  const CMatrix i4 = kron(identity(2), identity(2));
  REQUIRE(spectral_norm(CMatrix(i4 - identity(4))) == 0.0);

  CMatrix sx(2, 2), sz(2, 2);
  sx << Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0);
  sz << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(-1, 0);
  const CMatrix k = kron(sx, sz);
  CMatrix expected(4, 4);
  expected.setZero();
  expected(0, 2) = Complex(1, 0);
  expected(1, 3) = Complex(-1, 0);
  expected(2, 0) = Complex(1, 0);
  expected(3, 1) = Complex(-1, 0);
  REQUIRE((k - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kron is associative") {
  SECTION("exactly, on dyadic-rational entries") {
    const CMatrix a = random_dyadic_matrix(2, 3, 21);
    const CMatrix b = random_dyadic_matrix(3, 2, 22);
    const CMatrix c = random_dyadic_matrix(2, 2, 23);
    const CMatrix left = kron(kron(a, b), c);
    const CMatrix right = kron(a, kron(b, c));
    REQUIRE(left.rows() == right.rows());
    REQUIRE(left.cols() == right.cols());
    REQUIRE((left - right).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("to roundoff, on generic entries") {
    const CMatrix a = random_matrix(2, 3, 31);
    const CMatrix b = random_matrix(3, 2, 32);
    const CMatrix c = random_matrix(2, 2, 33);
    const CMatrix left = kron(kron(a, b), c);
    const CMatrix right = kron(a, kron(b, c));
    REQUIRE((left - right).cwiseAbs().maxCoeff() <= 1e-15 * left.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("kron rejects results beyond the dense cap") {
  const CMatrix big = CMatrix::Zero(200, 200);
  REQUIRE_THROWS_AS(kron(big, big), std::invalid_argument);
  REQUIRE_THROWS_AS(kron(big, CMatrix()), std::invalid_argument);
}

TEST_CASE("spectral_norm agrees with an independent power-iteration oracle") {
  const CMatrix a = random_matrix(16, 16, 41);
  REQUIRE(spectral_norm(a) == Catch::Approx(norm_oracle(a)).epsilon(1e-10));
}

TEST_CASE("spectral_norm handles known matrices") {
  REQUIRE(spectral_norm(identity(8)) == 1.0);
  CMatrix d = CMatrix::Zero(3, 3);
  d(0, 0) = Complex(3, 0);
  d(1, 1) = Complex(1, 0);
  REQUIRE(spectral_norm(d) == 3.0);
}

TEST_CASE("spectral_norm is multiplicative over kron") {
  const CMatrix a = random_matrix(5, 4, 51);
  const CMatrix b = random_matrix(3, 3, 52);
  const double product = spectral_norm(a) * spectral_norm(b);
  REQUIRE(std::abs(spectral_norm(kron(a, b)) - product) <= 1e-9 * product);
}

TEST_CASE("spectral_norm power-iteration path matches the SVD path") {
  // Embed a small block in a larger zero matrix so the 300-dim call takes the
  // iterative branch while the reference value comes from exact SVD.
  const CMatrix small = random_matrix(16, 16, 61);
  CMatrix big = CMatrix::Zero(300, 300);
  big.block(0, 0, 16, 16) = small;
  const double got = spectral_norm(big);
  REQUIRE(got == Catch::Approx(spectral_norm(small)).epsilon(1e-10));
  REQUIRE(spectral_norm(big) == got);  // deterministic
}

TEST_CASE("psd_sqrt squares back to its input") {
  const CMatrix a = random_matrix(6, 6, 71);
  const CMatrix psd = CMatrix(a.adjoint() * a) + 0.1 * identity(6);
  const CMatrix root = psd_sqrt(psd);
  REQUIRE(spectral_norm(CMatrix(root * root - psd)) <= 1e-10 * spectral_norm(psd));
  REQUIRE(spectral_norm(CMatrix(root - root.adjoint())) <= 1e-10);
}

TEST_CASE("psd_sqrt of a diagonal matrix takes entrywise roots") {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = Complex(4, 0);
  d(1, 1) = Complex(9, 0);
  const CMatrix root = psd_sqrt(d);
  REQUIRE(std::abs(root(0, 0) - Complex(2, 0)) <= 1e-12);
  REQUIRE(std::abs(root(1, 1) - Complex(3, 0)) <= 1e-12);
  REQUIRE(std::abs(root(0, 1)) <= 1e-12);
}

TEST_CASE("psd_sqrt rejects bad inputs") {
  REQUIRE_THROWS_AS(psd_sqrt(random_matrix(4, 4, 81)), std::invalid_argument);
  CMatrix neg = CMatrix::Zero(2, 2);
  neg(0, 0) = Complex(1, 0);
  neg(1, 1) = Complex(-0.5, 0);
  REQUIRE_THROWS_AS(psd_sqrt(neg), std::invalid_argument);
  REQUIRE_THROWS_AS(psd_sqrt(random_matrix(3, 4, 82)), std::invalid_argument);
}

TEST_CASE("complete_unitary extends a column to a unitary") {
  std::mt19937_64 rng(91);
  for (int rep = 0; rep < 20; ++rep) {
    const CVector v = haar_state(8, rng);
    const CMatrix u = complete_unitary(v);
    REQUIRE((u.col(0) - v).norm() <= 1e-12);
    REQUIRE(spectral_norm(CMatrix(u.adjoint() * u - identity(8))) <= 1e-10);
  }
}

TEST_CASE("complete_unitary handles degenerate first components") {
  CVector e0 = CVector::Zero(4);
  e0(0) = Complex(1, 0);
  REQUIRE(spectral_norm(CMatrix(complete_unitary(e0) - identity(4))) <= 1e-14);

  CVector v = CVector::Zero(3);
  v(1) = Complex(0, 1);  // zero first component
  const CMatrix u = complete_unitary(v);
  REQUIRE((u.col(0) - v).norm() <= 1e-12);
  REQUIRE(spectral_norm(CMatrix(u.adjoint() * u - identity(3))) <= 1e-10);

  CVector one(1);
  one(0) = Complex(0, 1);
  const CMatrix u1 = complete_unitary(one);
  REQUIRE(std::abs(u1(0, 0) - Complex(0, 1)) <= 1e-14);
}

TEST_CASE("complete_unitary rejects unnormalized input") {
  CVector v = CVector::Zero(2);
  v(0) = Complex(0.5, 0);
  REQUIRE_THROWS_AS(complete_unitary(v), std::invalid_argument);
}

TEST_CASE("haar_state draws normalized vectors with uniform energy per component") {
  std::mt19937_64 rng(101);
  double acc = 0.0;
  const int samples = 10000;
  for (int i = 0; i < samples; ++i) {
    const CVector psi = haar_state(4, rng);
    REQUIRE(std::abs(psi.norm() - 1.0) <= 1e-12);
    acc += std::norm(psi(0));
  }
  REQUIRE(std::abs(acc / samples - 0.25) <= 0.02);

  REQUIRE(std::abs(std::abs(haar_state(1, std::uint64_t(5))(0)) - 1.0) <= 1e-12);
  REQUIRE((haar_state(8, std::uint64_t(7)) - haar_state(8, std::uint64_t(7))).norm() == 0.0);
}

TEST_CASE("DenseTensor uses row-major linearization with the first mode slowest") {
  DenseTensor t({2, 3, 4});
  REQUIRE(t.total() == 24);
  REQUIRE(t.linear_index({1, 2, 3}) == 23);
  REQUIRE(t.linear_index({0, 1, 2}) == 6);
  t.at({1, 0, 2}) = Complex(2, -1);
  REQUIRE(t.entries[14] == Complex(2, -1));
  REQUIRE_THROWS_AS(t.linear_index({0, 0}), std::invalid_argument);
  REQUIRE_THROWS_AS(t.linear_index({0, 3, 0}), std::out_of_range);
  REQUIRE_THROWS_AS(DenseTensor({2, 2}, std::vector<Complex>(3)), std::invalid_argument);
}

TEST_CASE("derive_seed separates lanes deterministically") {
  REQUIRE(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  REQUIRE(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
  REQUIRE(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
}
