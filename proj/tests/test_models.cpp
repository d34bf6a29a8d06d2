#include <catch2/catch_amalgamated.hpp>

#include <pltcp/models.hpp>

#include <vector>

namespace {

using namespace pltcp;

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

CMatrix spec_dense(const CPLikeSpec& spec) {
  const Index dim = Index(1) << spec.signal_qubits;
  CMatrix out = CMatrix::Zero(dim, dim);
  for (std::size_t j = 0; j < spec.terms.size(); ++j)
    out += spec.coefficients[j] * kron_all(spec.terms[j]);
  return out;
}

}  // namespace

TEST_CASE("pauli basics") {
  REQUIRE(spectral_norm(pauli_x() * pauli_z() + pauli_z() * pauli_x()) < 1e-15);
  for (const CMatrix& p : {pauli_x(), pauli_y(), pauli_z()}) {
    REQUIRE(spectral_norm(p - p.adjoint()) < 1e-15);
    REQUIRE(spectral_norm(p * p - identity(2)) < 1e-15);
  }
}

TEST_CASE("spin-1 generators") {
  const CMatrix x = spin1_x(), y = spin1_y(), z = spin1_z();
  const Complex i(0, 1);
  REQUIRE(spectral_norm(commutator(x, y) - i * z) < 1e-14);
  REQUIRE(spectral_norm(commutator(y, z) - i * x) < 1e-14);
  REQUIRE(spectral_norm(commutator(z, x) - i * y) < 1e-14);
  for (const CMatrix& g : {x, y, z}) {
    REQUIRE(spectral_norm(g - g.adjoint()) < 1e-14);
    REQUIRE(spectral_norm(g) == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("pad_to_pow2") {
  const CMatrix padded = pad_to_pow2(identity(3));
  REQUIRE(padded.rows() == 4);
  REQUIRE(padded(3, 3) == Complex(0, 0));
  REQUIRE(padded(2, 2) == Complex(1, 0));
  REQUIRE((pad_to_pow2(pauli_x()) - pauli_x()).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(pad_to_pow2(CMatrix::Zero(1, 1)).rows() == 2);
  REQUIRE_THROWS_AS(pad_to_pow2(CMatrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("transverse-field chain") {
  SECTION("no field leaves only the coupling term") {
    const ModelPair m = tfim(2, 0.0);
    REQUIRE(m.spec.terms.size() == 1);
    REQUIRE((m.dense + kron(pauli_z(), pauli_z())).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m.dense);
    REQUIRE(es.eigenvalues().minCoeff() == Catch::Approx(-1.0).margin(1e-12));
  }

  SECTION("two sites, field strength two") {
    const ModelPair m = tfim(2, 2.0);
    REQUIRE(m.spec.terms.size() == 3);
    double total = 0.0;
    for (const Complex& c : m.spec.coefficients) total += std::abs(c);
    REQUIRE(total == 5.0);
    CMatrix oracle(4, 4);
    oracle << -1, -2, -2, 0,
              -2, 1, 0, -2,
              -2, 0, 1, -2,
              0, -2, -2, -1;
    REQUIRE((m.dense - oracle).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((m.dense - spec_dense(m.spec)).cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("three sites") {
    const ModelPair m = tfim(3, 2.0);
    REQUIRE(m.spec.terms.size() == 5);
    REQUIRE(std::abs(m.dense.trace()) < 1e-14);
    REQUIRE(spectral_norm(m.dense - m.dense.adjoint()) < 1e-12);
    REQUIRE((m.dense - spec_dense(m.spec)).cwiseAbs().maxCoeff() == 0.0);
  }

  REQUIRE_THROWS_AS(tfim(1, 1.0), std::invalid_argument);
}

TEST_CASE("spin-1 chain") {
  SECTION("two sites against an explicit oracle") {
    const XyzModel m = xyz(2);
    REQUIRE(m.spec.terms.size() == 3);
    const CMatrix oracle = kron(spin1_x(), spin1_x()) + kron(spin1_y(), spin1_y()) +
                           kron(spin1_z(), spin1_z());
    REQUIRE((m.dense3 - oracle).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(spectral_norm(m.dense3 - m.dense3.adjoint()) < 1e-12);
    REQUIRE(std::abs(m.dense3.trace()) < 1e-13);
  }

  SECTION("term counts at the published sizes") {
    REQUIRE(xyz(3).spec.terms.size() == 6);
    REQUIRE(xyz(4).spec.terms.size() == 9);
  }

  SECTION("embedding and spec evaluation agree") {
    for (int s : {2, 3}) {
      const XyzModel m = xyz(s);
      REQUIRE((spec_dense(m.spec) - m.dense4).cwiseAbs().maxCoeff() == 0.0);
      // spot-check the digit embedding: entry (i,j) of dense3 must appear at
      // the base-4 relabeled position
      Index dim3 = 1;
      for (int k = 0; k < s; ++k) dim3 *= 3;
      auto embed = [&](Index z) {
        Index rest = z, mapped = 0, scale = 1;
        for (int k = 0; k < s; ++k) {
          mapped += (rest % 3) * scale;
          rest /= 3;
          scale *= 4;
        }
        return mapped;
      };
      for (Index i = 0; i < dim3; i += 5)
        for (Index j = 0; j < dim3; j += 7)
          REQUIRE(m.dense4(embed(i), embed(j)) == m.dense3(i, j));
    }
  }

  SECTION("total spin-z symmetry") {
    for (int s : {2, 3}) {
      const XyzModel m = xyz(s);
      const Index dim3 = m.dense3.rows();
      CMatrix sz = CMatrix::Zero(dim3, dim3);
      for (int i = 0; i < s; ++i) {
        std::vector<CMatrix> fs(static_cast<std::size_t>(s), identity(3));
        fs[static_cast<std::size_t>(i)] = spin1_z();
        sz += kron_all(fs);
      }
      REQUIRE(spectral_norm(commutator(m.dense3, sz)) < 1e-10);
    }
  }

  SECTION("padded site operators cost one ancilla each") {
    for (const CMatrix& g : {spin1_x(), spin1_y(), spin1_z()}) {
      const BlockEncoding e = dilate(pad_to_pow2(g));
      REQUIRE(e.a == 1);
      REQUIRE(e.alpha == Catch::Approx(1.0).margin(1e-12));
    }
  }

  REQUIRE_THROWS_AS(xyz(1), std::invalid_argument);
}

TEST_CASE("laplace-like sums") {
  SECTION("single slot") {
    const ModelPair m = laplace_like({identity(2)}, {pauli_z()});
    REQUIRE(m.spec.terms.size() == 1);
    REQUIRE((m.dense - pauli_z()).cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("two slots of sigma-z") {
    const ModelPair m = laplace_like({identity(2), identity(2)}, {pauli_z(), pauli_z()});
    CMatrix oracle = CMatrix::Zero(4, 4);
    oracle(0, 0) = 2;
    oracle(3, 3) = -2;
    REQUIRE((m.dense - oracle).cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("repeated non-unitary slot dilates once") {
    CMatrix l(2, 2);
    l << 2, 0, 0, -1;
    const std::vector<CMatrix> ms(3, identity(2));
    const std::vector<CMatrix> ls(3, l);
    const ModelPair m = laplace_like(ms, ls);
    const CpSynthesis synth = synthesize_cp(m.spec);
    REQUIRE(synth.distinct_dilations == 2);
    REQUIRE(encoding_error(synth.encoding, m.dense) < 1e-10);
  }

  SECTION("rejections") {
    REQUIRE_THROWS_AS(laplace_like({}, {}), std::invalid_argument);
    REQUIRE_THROWS_AS(laplace_like({identity(2)}, {identity(2), identity(2)}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(laplace_like({identity(2)}, {identity(4)}), std::invalid_argument);
    REQUIRE_THROWS_AS(laplace_like({identity(3)}, {identity(3)}), std::invalid_argument);
  }
}
