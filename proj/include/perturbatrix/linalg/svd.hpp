#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "perturbatrix/core.hpp"

namespace perturbatrix {

/// A = U diag(s) V^*, singular values descending. U is m x k, V is n x k, k = min(m, n);
/// columns of U for zero singular values are left as zero.
template <typename Real>
struct SingularValueDecomposition {
  CMatrix<Real> u;
  RVector<Real> s;
  CMatrix<Real> v;
};

namespace detail {

// One-sided (Hestenes) Jacobi on the columns of w (rows >= cols). v accumulates the rotations.
template <typename Real>
void hestenes(CMatrix<Real>& w, CMatrix<Real>& v) {
  const Index n = w.cols();
  const Real eps = std::numeric_limits<Real>::epsilon();
  const int max_sweeps = 60;
  const Real negligible = eps * eps * w.squaredNorm();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (Index i = 0; i + 1 < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        const Real alpha = w.col(i).squaredNorm();
        const Real beta = w.col(j).squaredNorm();
        const std::complex<Real> gamma = w.col(i).dot(w.col(j));
        const Real g = std::abs(gamma);
        if (g == Real(0) || g <= eps * std::sqrt(alpha * beta)) continue;
        if (alpha <= negligible || beta <= negligible) continue;
        rotated = true;
        const std::complex<Real> phase = std::conj(gamma) / g;
        const Real zeta = (beta - alpha) / (Real(2) * g);
        const Real t = (zeta >= Real(0) ? Real(1) : Real(-1)) / (std::abs(zeta) + std::sqrt(Real(1) + zeta * zeta));
        const Real c = Real(1) / std::sqrt(Real(1) + t * t);
        const Real s = c * t;
        for (CMatrix<Real>* m : {&w, &v}) {
          for (Index r = 0; r < m->rows(); ++r) {
            const std::complex<Real> x = (*m)(r, i), y = phase * (*m)(r, j);
            (*m)(r, i) = c * x - s * y;
            (*m)(r, j) = s * x + c * y;
          }
        }
      }
    }
    if (!rotated) return;
  }
  fail(ErrorKind::NoConvergence, "svd: Jacobi sweeps did not converge");
}

}  // namespace detail

template <typename Real>
SingularValueDecomposition<Real> svd(const CMatrix<Real>& a) {
  require_finite(a, "svd");
  const Index m = a.rows(), n = a.cols();
  const bool wide = m < n;
  CMatrix<Real> w = wide ? CMatrix<Real>(a.adjoint()) : a;
  const Index k = w.cols();
  CMatrix<Real> v = CMatrix<Real>::Identity(k, k);
  detail::hestenes(w, v);

  std::vector<Index> order(static_cast<size_t>(k));
  RVector<Real> norms(k);
  for (Index j = 0; j < k; ++j) norms(j) = w.col(j).norm();
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return norms(x) > norms(y); });

  SingularValueDecomposition<Real> out;
  out.s.resize(k);
  CMatrix<Real> left = CMatrix<Real>::Zero(w.rows(), k), right(k, k);
  for (Index j = 0; j < k; ++j) {
    const Index src = order[static_cast<size_t>(j)];
    out.s(j) = norms(src);
    if (norms(src) > Real(0)) left.col(j) = w.col(src) / norms(src);
    right.col(j) = v.col(src);
  }
  if (wide) {
    out.u = std::move(right);
    out.v = std::move(left);
  } else {
    out.u = std::move(left);
    out.v = std::move(right);
  }
  return out;
}

/// Number of singular values above rel_tol * sigma_max.
template <typename Real>
Index numerical_rank(const CMatrix<Real>& a, Real rel_tol = Real(1e-12)) {
  if (a.size() == 0) return 0;
  const RVector<Real> s = svd(a).s;
  if (s.size() == 0 || s(0) == Real(0)) return 0;
  return (s.array() > rel_tol * s(0)).count();
}

/// Orthonormal basis of the numerical range of a.
template <typename Real>
CMatrix<Real> range_basis(const CMatrix<Real>& a, Real rel_tol = Real(1e-12)) {
  if (a.size() == 0) return CMatrix<Real>(a.rows(), 0);
  const SingularValueDecomposition<Real> d = svd(a);
  Index r = 0;
  if (d.s.size() > 0 && d.s(0) > Real(0)) r = (d.s.array() > rel_tol * d.s(0)).count();
  return d.u.leftCols(r);
}

/// Orthonormal basis of the numerical null space of a (singular values <= abs_tol).
template <typename Real>
CMatrix<Real> null_space(const CMatrix<Real>& a, Real abs_tol) {
  const Index n = a.cols();
  if (n == 0) return CMatrix<Real>(0, 0);
  CMatrix<Real> padded = a;
  if (a.rows() < n) {
    padded = CMatrix<Real>::Zero(n, n);
    padded.topRows(a.rows()) = a;
  }
  const SingularValueDecomposition<Real> d = svd(padded);
  Index r = (d.s.array() > abs_tol).count();
  return d.v.rightCols(n - r);
}

}  // namespace perturbatrix
