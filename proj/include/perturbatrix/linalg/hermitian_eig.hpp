#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "perturbatrix/linalg/householder.hpp"

namespace perturbatrix {

/// Eigenvalues ascending, eigenvectors in the columns of a unitary matrix.
template <typename Real>
struct HermitianEigenSystem {
  RVector<Real> eigenvalues;
  CMatrix<Real> eigenvectors;
};

struct HermitianEigOptions {
  double hermitian_tol = 1e-12;  // relative Frobenius residual of A - A^*
  int sweep_factor = 30;         // QL sweeps allowed per eigenvalue = sweep_factor * N
  bool vectors = true;
};

template <typename Real>
Real hermitian_residual(const CMatrix<Real>& a) {
  const Real scale = a.norm();
  if (scale == Real(0)) return Real(0);
  return (a - a.adjoint()).norm() / scale;
}

namespace detail {

// Implicit QL with Wilkinson-type shifts on a real symmetric tridiagonal matrix
// (diag d, subdiag e stored in e[1..n-1]), EISPACK tql2 layout.
template <typename Real>
void tridiagonal_ql(std::vector<Real>& d, std::vector<Real>& e, RMatrix<Real>* z, int max_sweeps) {
  const int n = static_cast<int>(d.size());
  if (n <= 1) return;
  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = Real(0);

  Real f = Real(0);
  Real tst1 = Real(0);
  const Real eps = std::numeric_limits<Real>::epsilon();
  for (int l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    int m = l;
    while (m < n) {
      if (std::abs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > max_sweeps) {
          fail(ErrorKind::NoConvergence, "hermitian_eig: QL sweep cap reached");
        }
        Real g = d[l];
        Real p = (d[l + 1] - g) / (Real(2) * e[l]);
        Real r = std::hypot(p, Real(1));
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const Real dl1 = d[l + 1];
        Real h = g - d[l];
        for (int i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        Real c = Real(1), c2 = c, c3 = c;
        const Real el1 = e[l + 1];
        Real s = Real(0), s2 = Real(0);
        for (int i = m - 1; i >= l; --i) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          if (z != nullptr) {
            for (int k = 0; k < n; ++k) {
              h = (*z)(k, i + 1);
              (*z)(k, i + 1) = s * (*z)(k, i) + c * h;
              (*z)(k, i) = c * (*z)(k, i) - s * h;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = Real(0);
  }
}

}  // namespace detail

/// Householder reduction to tridiagonal form, diagonal phase scaling to a real
/// symmetric tridiagonal, then implicit QL.
template <typename Real>
HermitianEigenSystem<Real> hermitian_eig(const CMatrix<Real>& a, const HermitianEigOptions& opt = {}) {
  require_square(a, "hermitian_eig");
  require_finite(a, "hermitian_eig");
  if (hermitian_residual(a) > Real(opt.hermitian_tol)) {
    fail(ErrorKind::NotHermitian, "hermitian_eig: symmetry residual exceeds tolerance");
  }
  const Index n = a.rows();
  HermitianEigenSystem<Real> out;
  if (n == 0) return out;

  const CMatrix<Real> sym = (a + a.adjoint()) * Real(0.5);
  HessenbergForm<Real> hf = hessenberg<Real>(sym, opt.vectors);

  std::vector<Real> d(static_cast<size_t>(n)), e(static_cast<size_t>(n), Real(0));
  CVector<Real> phase(n);
  phase(0) = std::complex<Real>(1);
  for (Index k = 0; k < n; ++k) d[static_cast<size_t>(k)] = hf.h(k, k).real();
  for (Index k = 0; k + 1 < n; ++k) {
    const std::complex<Real> s = hf.h(k + 1, k);
    const Real as = std::abs(s);
    e[static_cast<size_t>(k + 1)] = as;
    phase(k + 1) = as > Real(0) ? phase(k) * (s / as) : phase(k);
  }

  RMatrix<Real> z;
  if (opt.vectors) z = RMatrix<Real>::Identity(n, n);
  detail::tridiagonal_ql(d, e, opt.vectors ? &z : nullptr, opt.sweep_factor * static_cast<int>(n));

  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return d[static_cast<size_t>(i)] < d[static_cast<size_t>(j)]; });

  out.eigenvalues.resize(n);
  for (Index k = 0; k < n; ++k) out.eigenvalues(k) = d[static_cast<size_t>(order[static_cast<size_t>(k)])];
  if (opt.vectors) {
    const CMatrix<Real> qd = hf.q * phase.asDiagonal();
    const CMatrix<Real> u = qd * z.template cast<std::complex<Real>>();
    out.eigenvectors.resize(n, n);
    for (Index k = 0; k < n; ++k) out.eigenvectors.col(k) = u.col(order[static_cast<size_t>(k)]);
  }
  return out;
}

template <typename Real>
RVector<Real> hermitian_eigenvalues(const CMatrix<Real>& a) {
  HermitianEigOptions opt;
  opt.vectors = false;
  return hermitian_eig(a, opt).eigenvalues;
}

}  // namespace perturbatrix
