#include "perturbatrix/cyclicity.hpp"

#include <algorithm>

#include "perturbatrix/sectorial.hpp"

namespace perturbatrix {

std::vector<Index> KrylovDecomposition::dimensions() const {
  std::vector<Index> dims;
  for (const MatrixC& r : subspaces) dims.push_back(r.cols());
  return dims;
}

namespace {

// Projects v against the first `count` columns of q, twice.
VectorC orthogonalize(const MatrixC& q, Index count, VectorC v) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Index j = 0; j < count; ++j) v -= q.col(j).dot(v) * q.col(j);
  }
  return v;
}

}  // namespace

KrylovDecomposition krylov_decompose(const MatrixC& a, const MatrixC& b, const KrylovOptions& opt) {
  require_square(a, "krylov_decompose");
  require_square(b, "krylov_decompose");
  if (a.rows() != b.rows()) fail(ErrorKind::DimensionMismatch, "krylov_decompose: A and B sizes differ");
  if (hermitian_residual(a) > 1e-12) fail(ErrorKind::NotHermitian, "krylov_decompose: A is not Hermitian");
  const Index n = a.rows();

  KrylovDecomposition out;
  MatrixC q(n, n);
  Index filled = 0;
  MatrixC block = range_basis<double>(b, opt.range_tol);
  for (Index j = 0; j < block.cols(); ++j) q.col(filled++) = block.col(j);
  if (block.cols() > 0) out.subspaces.push_back(block);

  while (block.cols() > 0 && filled < n) {
    const MatrixC candidates = a * block;
    const Index start = filled;
    for (Index j = 0; j < candidates.cols() && filled < n; ++j) {
      const VectorC v = candidates.col(j);
      const double vn = v.norm();
      if (vn == 0.0) continue;
      const VectorC w = orthogonalize(q, filled, v);
      const double wn = w.norm();
      if (wn > opt.accept_tol * vn) q.col(filled++) = w / wn;
    }
    block = q.middleCols(start, filled - start);
    if (block.cols() > 0) out.subspaces.push_back(block);
  }

  out.basis = q.leftCols(filled);
  out.tridiagonal = truncate(a, out.basis);
  out.cyclic = filled == n;
  return out;
}

bool HalfPlaneReport::multiplicities_bounded() const {
  return std::all_of(geometric_multiplicity.begin(), geometric_multiplicity.end(),
                     [this](Index g) { return g <= rank; });
}

HalfPlaneReport verify_upper_halfplane(const MatrixC& a, const MatrixC& b, cplx gamma, double null_tol) {
  if (gamma == cplx(0.0)) fail(ErrorKind::HypothesisViolated, "verify_upper_halfplane: gamma must be non-zero");
  const SectorialDecomposition dec = analyze_sectorial(b);
  if (!coupling_sector(dec).contains(gamma)) {
    fail(ErrorKind::HypothesisViolated, "verify_upper_halfplane: gamma lies outside the coupling sector");
  }
  if (!krylov_decompose(a, b).cyclic) fail(ErrorKind::HypothesisViolated, "verify_upper_halfplane: B is not cyclic for A");

  const MatrixC ag = a + gamma * b;
  const double scale = operator_norm(ag);
  HalfPlaneReport rep;
  rep.rank = dec.rank;
  rep.eigenvalues = general_eig(ag).eigenvalues;
  rep.min_imag = rep.eigenvalues.imag().minCoeff();
  const Index n = a.rows();
  for (Index k = 0; k < n; ++k) {
    const MatrixC shifted = ag - rep.eigenvalues(k) * MatrixC::Identity(n, n);
    const VectorR s = svd(shifted).s;
    rep.geometric_multiplicity.push_back((s.array() <= null_tol * scale).count());
  }
  return rep;
}

}  // namespace perturbatrix
