#include <doctest.h>

#include "oracles.hpp"
#include "perturbatrix/cyclicity.hpp"
#include "perturbatrix/linalg.hpp"
#include "perturbatrix/sectorial.hpp"

using namespace perturbatrix;

namespace {

MatrixC diag(std::initializer_list<double> v) {
  MatrixC d = MatrixC::Zero(Index(v.size()), Index(v.size()));
  Index i = 0;
  for (double x : v) d(i, i) = x, ++i;
  return d;
}

MatrixC rank2_b() {
  VectorC e1(5), e2(5);
  e1 << 2, 2, 2, 2, 2;
  e2 << 3, 3, -2, -2, -2;
  return e1 * e1.adjoint() + e2 * e2.adjoint();
}

// Rank of [B, AB, ..., A^{N-1}B] with normalized columns.
Index controllability_rank(const MatrixC& a, const MatrixC& b) {
  const Index n = a.rows();
  MatrixC k(n, n * n);
  MatrixC block = b;
  for (Index j = 0; j < n; ++j) {
    k.middleCols(j * n, n) = block;
    block = a * block;
  }
  for (Index c = 0; c < k.cols(); ++c)
    if (k.col(c).norm() > 0) k.col(c).normalize();
  Eigen::JacobiSVD<MatrixC> svd(k);
  const VectorR s = svd.singularValues();
  return (s.array() > 1e-9 * s(0)).count();
}

void check_structure(const KrylovDecomposition& kd, const MatrixC& a) {
  const Index n = a.rows();
  Index offset = 0;
  std::vector<Index> starts;
  for (const MatrixC& r : kd.subspaces) starts.push_back(offset), offset += r.cols();
  CHECK(offset == kd.basis.cols());
  CHECK((kd.basis.adjoint() * kd.basis - MatrixC::Identity(offset, offset)).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(kd.cyclic == (offset == n));
  const double na = oracle::spectral_norm(a);
  for (size_t i = 0; i < kd.subspaces.size(); ++i) {
    for (size_t j = i + 2; j < kd.subspaces.size(); ++j) {
      const MatrixC blk = kd.tridiagonal.block(starts[i], starts[j], kd.subspaces[i].cols(), kd.subspaces[j].cols());
      CHECK(oracle::spectral_norm(blk) <= 1e-10 * na);
    }
  }
}

}  // namespace

TEST_CASE("krylov_decompose examples") {
  const MatrixC a = diag({1, 2, 3, 4, 5});
  const VectorC e = VectorC::Ones(5) / std::sqrt(5.0);
  const auto kd = krylov_decompose(a, MatrixC(e * e.adjoint()));
  CHECK(kd.cyclic);
  CHECK(kd.dimensions() == std::vector<Index>{1, 1, 1, 1, 1});
  check_structure(kd, a);

  VectorC e1 = VectorC::Zero(3);
  e1(0) = 1.0;
  const auto nc = krylov_decompose(diag({1, 1, 2}), MatrixC(e1 * e1.adjoint()));
  CHECK_FALSE(nc.cyclic);

  const auto r2 = krylov_decompose(a, rank2_b());
  CHECK(r2.cyclic);
  CHECK(controllability_rank(a, rank2_b()) == 5);
  check_structure(r2, a);

  try {
    krylov_decompose(a, MatrixC::Identity(3, 3));
    FAIL("expected DimensionMismatch");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::DimensionMismatch);
  }
}

TEST_CASE("cyclicity agrees with the controllability rank on random inputs") {
  oracle::Rng rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    const Index n = rng.integer(2, 9);
    MatrixC a;
    if (trial % 3 == 0) {
      VectorR ev = rng.separated_spectrum(n, -3, 3, 0.05);
      ev(1) = ev(0);  // repeated eigenvalue; rank-one B cannot be cyclic
      a = rng.hermitian_with_spectrum(ev);
    } else {
      a = rng.hermitian(n);
    }
    const Index m = trial % 3 == 0 ? 1 : rng.integer(1, 2);
    const MatrixC b = rng.sectorial(n, m, 0.3, 0.3);
    const auto kd = krylov_decompose(a, b);
    check_structure(kd, a);
    CHECK(kd.cyclic == (controllability_rank(a, b) == n));
    if (trial % 3 == 0) CHECK_FALSE(kd.cyclic);
  }
}

TEST_CASE("non-cyclic pairs: projector annihilates exponential and resolvent orbits") {
  oracle::Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = rng.integer(3, 8);
    VectorR ev = rng.separated_spectrum(n, -2, 2, 0.1);
    ev(2) = ev(1);
    const MatrixC a = rng.hermitian_with_spectrum(ev);
    const MatrixC b = rng.sectorial(n, 1, 0.2, 0.2);
    const auto kd = krylov_decompose(a, b);
    REQUIRE_FALSE(kd.cyclic);
    const MatrixC x = MatrixC::Identity(n, n) - kd.basis * kd.basis.adjoint();
    CHECK(oracle::spectral_norm(x) > 0.5);
    for (double t : {0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0}) {
      const MatrixC u = oracle::expm(MatrixC(cplx(0, t) * a));
      CHECK(oracle::spectral_norm(x * u * b) <= 1e-8);
      CHECK(oracle::spectral_norm(x * matrix_exp(MatrixC(cplx(0, 1) * a), t) * b) <= 1e-8);
    }
    for (int k = 0; k < 5; ++k) {
      const cplx z(rng.uniform(-3, 3), rng.uniform(0.2, 2.0) * (k % 2 ? 1 : -1));
      const MatrixC res = (z * MatrixC::Identity(n, n) - a).inverse();
      CHECK(oracle::spectral_norm(x * res * b) <= 1e-8);
    }
  }
}

TEST_CASE("verify_upper_halfplane examples") {
  const MatrixC a = diag({1, 2, 3, 4, 5});
  const auto rep = verify_upper_halfplane(a, rank2_b(), cplx(0, 1));
  CHECK(rep.eigenvalues.size() == 5);
  CHECK(rep.all_upper());
  CHECK(rep.multiplicities_bounded());

  try {
    verify_upper_halfplane(a, rank2_b(), 0.0);
    FAIL("expected HypothesisViolated");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::HypothesisViolated);
  }

  VectorC e1 = VectorC::Zero(3);
  e1(0) = 1.0;
  CHECK_THROWS_AS(verify_upper_halfplane(diag({1, 1, 2}), MatrixC(e1 * e1.adjoint()), cplx(0, 1)), Error);
  CHECK_THROWS_AS(verify_upper_halfplane(a, rank2_b(), cplx(0, -1)), Error);

  oracle::Rng rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = rng.integer(2, 8);
    const MatrixC ar = rng.hermitian_with_spectrum(rng.separated_spectrum(n, -3, 3, 0.1));
    const VectorC e = rng.unit_vector(n);
    const cplx gamma = std::polar(rng.uniform(0.1, 4.0), rng.uniform(0.05, oracle::pi - 0.05));
    const auto r = verify_upper_halfplane(ar, MatrixC(e * e.adjoint()), gamma);
    CHECK(r.all_upper());
    for (Index g : r.geometric_multiplicity) CHECK(g == 1);
  }
}

TEST_CASE("contraction and exponential decay of exp(i A_gamma t)") {
  oracle::Rng rng(44);
  for (int trial = 0; trial < 15; ++trial) {
    const Index n = rng.integer(2, 7);
    const MatrixC a = rng.hermitian(n);
    const double s1 = rng.uniform(0, 0.8), s2 = rng.uniform(0, 0.8);
    const MatrixC b = rng.sectorial(n, rng.integer(1, static_cast<int>(n)), s1, s2);
    if (!krylov_decompose(a, b).cyclic) continue;
    const CouplingSector cs = coupling_sector(analyze_sectorial(b));
    const cplx gamma = std::polar(rng.uniform(0.2, 2.0), rng.uniform(cs.theta_min() + 0.05, cs.theta_max() - 0.05));
    const MatrixC z = cplx(0, 1) * (a + gamma * b);
    Eigen::ComplexEigenSolver<MatrixC> es(a + gamma * b);
    const double c = es.eigenvalues().imag().minCoeff() - 1e-10;
    REQUIRE(c > 0);
    const MatrixC v = es.eigenvectors();
    const double cond = oracle::spectral_norm(v) * oracle::spectral_norm(MatrixC(v.inverse()));
    for (double t = 0.1; t <= 10.0 + 1e-12; t += 0.7) {
      const double nrm = oracle::spectral_norm(matrix_exp(z, t));
      CHECK(nrm <= 1.0 + 1e-10);
      CHECK(nrm <= std::max(1.0, cond) * std::exp(-c * t) * (1.0 + 1e-8));
    }
  }
}
