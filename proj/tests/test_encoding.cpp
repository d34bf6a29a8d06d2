#include <catch2/catch_amalgamated.hpp>

#include <pltcp/encoding.hpp>

#include <random>

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

CMatrix random_unitary(Index dim, std::uint64_t seed) {
  Eigen::HouseholderQR<CMatrix> qr(random_matrix(dim, dim, seed));
  return qr.householderQ();
}

CMatrix pauli_x() {
  CMatrix x(2, 2);
  x << Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0);
  return x;
}

}  // namespace

TEST_CASE("dilate wraps a contraction into a unitary with the block on top") {
  for (std::uint64_t seed : {101, 102, 103}) {
    const CMatrix a = random_matrix(4, 4, seed);
    const BlockEncoding be = dilate(a);
    REQUIRE(be.a == 1);
    REQUIRE(be.s == 2);
    REQUIRE(be.eps == 0.0);
    REQUIRE(be.alpha == spectral_norm(a));
    const CMatrix u = be.dense();
    REQUIRE(u.rows() == 8);
    REQUIRE(spectral_norm(CMatrix(u.adjoint() * u - identity(8))) <= 1e-12);
    REQUIRE(encoding_error(be, a) <= 1e-12 * be.alpha);
  }
}

TEST_CASE("dilate accepts a larger explicit subnormalization") {
  const CMatrix a = random_matrix(4, 4, 111);
  const double big = 2.0 * spectral_norm(a);
  const BlockEncoding be = dilate(a, big);
  REQUIRE(be.alpha == big);
  REQUIRE(encoding_error(be, a) <= 1e-12 * big);
}

TEST_CASE("dilate short-circuits unitary input") {
  const BlockEncoding be = dilate(pauli_x());
  REQUIRE(be.a == 0);
  REQUIRE(be.alpha == 1.0);
  REQUIRE((be.dense() - pauli_x()).cwiseAbs().maxCoeff() == 0.0);

  // An explicit alpha forces a genuine dilation even for a unitary.
  const BlockEncoding scaled = dilate(pauli_x(), 2.0);
  REQUIRE(scaled.a == 1);
  REQUIRE(scaled.alpha == 2.0);
  REQUIRE(encoding_error(scaled, pauli_x()) <= 1e-12);
}

TEST_CASE("dilate encodes fixed diagonal data exactly") {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = Complex(0.5, 0);
  d(1, 1) = Complex(1.0 / 3.0, 0);
  const BlockEncoding be = dilate(d);
  REQUIRE(std::abs(be.alpha - 0.5) <= 1e-15);
  const CMatrix block = leading_block(be);
  REQUIRE(std::abs(block(0, 0) - Complex(1, 0)) <= 1e-12);
  REQUIRE(std::abs(block(1, 1) - Complex(2.0 / 3.0, 0)) <= 1e-12);

  const CMatrix zero = CMatrix::Zero(2, 2);
  const BlockEncoding zbe = dilate(zero, 1.0);
  REQUIRE(encoding_error(zbe, zero) <= 1e-14);
}

TEST_CASE("dilate rejects impossible requests") {
  const CMatrix a = random_matrix(4, 4, 121);
  REQUIRE_THROWS_AS(dilate(a, 0.5 * spectral_norm(a)), std::invalid_argument);
  REQUIRE_THROWS_AS(dilate(CMatrix::Zero(2, 2)), std::invalid_argument);
  REQUIRE_THROWS_AS(dilate(random_matrix(3, 3, 122)), std::invalid_argument);
  REQUIRE_THROWS_AS(dilate(random_matrix(2, 3, 123)), std::invalid_argument);
  REQUIRE_THROWS_AS(dilate(CMatrix::Zero(1, 1)), std::invalid_argument);
  REQUIRE_THROWS_AS(dilate(a, -1.0), std::invalid_argument);
}

TEST_CASE("leading_block agrees between dense and circuit backings") {
  const CMatrix u = random_unitary(32, 131);
  const BlockEncoding dense_be(u, 1.0, 2, 3, 0.0);

  Circuit c(5);
  c.add(unitary_gate({1, 2, 3, 4, 5}, u));
  const BlockEncoding circ_be(c, 1.0, 2, 3, 0.0);

  REQUIRE((leading_block(dense_be) - leading_block(circ_be)).cwiseAbs().maxCoeff() <= 1e-14);

  Circuit mixed(5);
  mixed.add(unitary_gate({2, 4}, random_unitary(4, 132)));
  mixed.add(swap_gate(1, 3));
  mixed.add(unitary_gate({5}, random_unitary(2, 133), {{2, 1}}));
  const BlockEncoding mixed_be(mixed, 1.0, 2, 3, 0.0);
  const CMatrix expected = evaluate(mixed).topLeftCorner(8, 8);
  REQUIRE((leading_block(mixed_be) - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("encoding_error measures spectral distance to the scaled block") {
  const CMatrix a = random_matrix(4, 4, 141);
  const BlockEncoding be = dilate(a);
  CMatrix bumped = a;
  bumped(1, 2) += Complex(0.25, 0);
  REQUIRE(encoding_error(be, bumped) == Catch::Approx(0.25).margin(1e-10));
  REQUIRE_THROWS_AS(encoding_error(be, random_matrix(8, 8, 142)), std::invalid_argument);
}

TEST_CASE("pad_ancillas preserves the encoded block") {
  const CMatrix a = random_matrix(4, 4, 151);
  const BlockEncoding be = dilate(a);
  const BlockEncoding padded = pad_ancillas(be, 3);
  REQUIRE(padded.a == 3);
  REQUIRE(padded.s == 2);
  REQUIRE(padded.alpha == be.alpha);
  REQUIRE(padded.eps == be.eps);
  REQUIRE((leading_block(padded) - leading_block(be)).cwiseAbs().maxCoeff() <= 1e-13);
  REQUIRE_THROWS_AS(pad_ancillas(be, 0), std::invalid_argument);

  // Past the dense threshold the padded encoding becomes circuit-backed.
  const BlockEncoding wide = pad_ancillas(be, 9);
  REQUIRE_FALSE(wide.is_dense());
  REQUIRE(wide.width() == 11);
  REQUIRE((leading_block(wide) - leading_block(be)).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("apply post-selects the ancillas and reports success statistics") {
  const BlockEncoding xbe = dilate(pauli_x());
  CVector e0 = CVector::Zero(2);
  e0(0) = Complex(1, 0);
  const ApplyOutcome hit = pltcp::apply(xbe, e0);
  REQUIRE(std::abs(hit.projected(1) - Complex(1, 0)) <= 1e-14);
  REQUIRE(hit.success_probability == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(hit.expected_repetitions == Catch::Approx(1.0).margin(1e-12));

  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = Complex(0.5, 0);
  d(1, 1) = Complex(1.0 / 3.0, 0);
  const BlockEncoding dbe = dilate(d);
  CVector e1 = CVector::Zero(2);
  e1(1) = Complex(1, 0);
  const ApplyOutcome partial = pltcp::apply(dbe, e1);
  REQUIRE(partial.success_probability == Catch::Approx(4.0 / 9.0).margin(1e-12));
  REQUIRE(partial.expected_repetitions == Catch::Approx(1.5).margin(1e-12));

  CVector unnormalized = CVector::Zero(2);
  unnormalized(0) = Complex(0.5, 0);
  REQUIRE_THROWS_AS(pltcp::apply(dbe, unnormalized), std::invalid_argument);
}

TEST_CASE("apply agrees between dense and circuit backings") {
  std::mt19937_64 rng(161);
  const CMatrix u = random_unitary(16, 162);
  const BlockEncoding dense_be(u, 1.0, 1, 3, 0.0);
  Circuit c(4);
  c.add(unitary_gate({1, 2, 3, 4}, u));
  const BlockEncoding circ_be(c, 1.0, 1, 3, 0.0);
  for (int rep = 0; rep < 5; ++rep) {
    const CVector psi = haar_state(8, rng);
    const ApplyOutcome da = pltcp::apply(dense_be, psi);
    const ApplyOutcome ca = pltcp::apply(circ_be, psi);
    REQUIRE((da.projected - ca.projected).norm() <= 1e-13);
    REQUIRE(da.success_probability == Catch::Approx(ca.success_probability).margin(1e-12));
  }
}

TEST_CASE("encoded blocks of dilations are contractions") {
  for (std::uint64_t seed = 201; seed < 221; ++seed) {
    const Index dim = (seed % 2 == 0) ? 2 : 4;
    const BlockEncoding be = dilate(random_matrix(dim, dim, seed));
    REQUIRE(spectral_norm(leading_block(be)) <= 1.0 + 1e-10);
  }
}

TEST_CASE("block encoding construction validates its fields") {
  REQUIRE_THROWS_AS(BlockEncoding(random_matrix(4, 4, 171), 1.0, 1, 1, 0.0),
                    std::invalid_argument);
  const CMatrix u = random_unitary(4, 172);
  REQUIRE_THROWS_AS(BlockEncoding(u, 0.0, 1, 1, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(BlockEncoding(u, 1.0, -1, 2, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(BlockEncoding(u, 1.0, 1, 0, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(BlockEncoding(u, 1.0, 1, 1, -1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(BlockEncoding(u, 1.0, 2, 1, 0.0), std::invalid_argument);
  Circuit c(3);
  REQUIRE_THROWS_AS(BlockEncoding(c, 1.0, 1, 1, 0.0), std::invalid_argument);
}
