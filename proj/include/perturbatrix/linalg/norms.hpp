#pragma once

#include <cmath>

#include "perturbatrix/linalg/hermitian_eig.hpp"

namespace perturbatrix {

/// Largest singular value. Power iteration on A^*A; falls back to a full Hermitian
/// eigensolve when the iteration stalls.
template <typename Real>
Real operator_norm(const CMatrix<Real>& a) {
  const Index n = a.cols();
  if (a.size() == 0) return Real(0);
  if (!a.allFinite()) fail(ErrorKind::InvalidArgument, "operator_norm: non-finite entry");
  const Real fro = a.norm();
  if (fro == Real(0)) return Real(0);
  const CMatrix<Real> scaled = a / fro;

  CVector<Real> x(n);
  for (Index j = 0; j < n; ++j) {
    const Real p = Real(j);
    x(j) = std::complex<Real>(Real(1) + Real(0.5) * std::cos(Real(0.7) * p), Real(0.3) * std::sin(Real(1.3) * p + Real(0.2)));
  }
  x.normalize();
  Real rho = Real(0);
  for (int it = 0; it < 500; ++it) {
    const CVector<Real> y = scaled.adjoint() * (scaled * x);
    const Real next = x.dot(y).real();
    const Real ny = y.norm();
    if (ny == Real(0)) break;
    const Real resid = (y - next * x).norm();
    const bool settled = std::abs(next - rho) <= Real(1e-13) * next && resid <= Real(1e-5) * next;
    rho = next;
    x = y / ny;
    if (settled) return fro * std::sqrt(rho);
  }
  HermitianEigOptions opt;
  opt.vectors = false;
  const CMatrix<Real> gram = scaled.adjoint() * scaled;
  const RVector<Real> ev = hermitian_eig<Real>((gram + gram.adjoint()) * Real(0.5), opt).eigenvalues;
  return fro * std::sqrt(std::max(Real(0), ev(ev.size() - 1)));
}

}  // namespace perturbatrix
