#pragma once

#include <cmath>
#include <vector>

#include "perturbatrix/linalg/general_eig.hpp"

namespace perturbatrix {

// Polynomials are coefficient vectors in ascending powers: c(0) + c(1) z + ... + c(d) z^d.

template <typename Real>
std::complex<Real> poly_eval(const CVector<Real>& c, const std::complex<Real>& z) {
  std::complex<Real> acc(0);
  for (Index k = c.size() - 1; k >= 0; --k) acc = acc * z + c(k);
  return acc;
}

template <typename Real>
CVector<Real> poly_derivative(const CVector<Real>& c) {
  if (c.size() <= 1) return CVector<Real>::Zero(1);
  CVector<Real> d(c.size() - 1);
  for (Index k = 1; k < c.size(); ++k) d(k - 1) = c(k) * Real(k);
  return d;
}

template <typename Real>
CVector<Real> poly_add(const CVector<Real>& a, const CVector<Real>& b) {
  CVector<Real> out = CVector<Real>::Zero(std::max(a.size(), b.size()));
  out.head(a.size()) += a;
  out.head(b.size()) += b;
  return out;
}

template <typename Real>
CVector<Real> poly_mul(const CVector<Real>& a, const CVector<Real>& b) {
  if (a.size() == 0 || b.size() == 0) return CVector<Real>();
  CVector<Real> out = CVector<Real>::Zero(a.size() + b.size() - 1);
  for (Index i = 0; i < a.size(); ++i)
    for (Index j = 0; j < b.size(); ++j) out(i + j) += a(i) * b(j);
  return out;
}

/// Monic polynomial with the given roots.
template <typename Real>
CVector<Real> poly_from_roots(const CVector<Real>& roots) {
  CVector<Real> c = CVector<Real>::Ones(1);
  for (Index k = 0; k < roots.size(); ++k) {
    CVector<Real> lin(2);
    lin << -roots(k), std::complex<Real>(1);
    c = poly_mul(c, lin);
  }
  return c;
}

inline constexpr Index kCharPolyMaxDimension = 64;

/// Coefficients of det(A - zI) by Faddeev-LeVerrier. Refuses N > 64.
template <typename Real>
CVector<Real> char_poly(const CMatrix<Real>& a) {
  require_square(a, "char_poly");
  require_finite(a, "char_poly");
  const Index n = a.rows();
  if (n > kCharPolyMaxDimension) {
    fail(ErrorKind::InvalidArgument, "char_poly: dimension above 64 is not supported, use general_eig");
  }
  // det(zI - A) = sum c_k z^k with c_n = 1
  CVector<Real> c = CVector<Real>::Zero(n + 1);
  c(n) = Real(1);
  CMatrix<Real> m = CMatrix<Real>::Zero(n, n);
  const CMatrix<Real> id = CMatrix<Real>::Identity(n, n);
  for (Index k = 1; k <= n; ++k) {
    m = a * m + c(n - k + 1) * id;
    c(n - k) = -(a * m).trace() / Real(k);
  }
  if (n % 2 == 1) c = -c;
  return c;
}

/// All roots of c via the companion matrix, each polished by three Newton steps.
template <typename Real>
CVector<Real> poly_roots(const CVector<Real>& c) {
  if (c.size() < 2) fail(ErrorKind::InvalidArgument, "poly_roots: degree must be at least 1");
  if (!c.allFinite()) fail(ErrorKind::InvalidArgument, "poly_roots: non-finite coefficient");
  const Index d = c.size() - 1;
  const std::complex<Real> lead = c(d);
  if (lead == std::complex<Real>(0) || std::abs(lead) <= std::numeric_limits<Real>::min()) {
    fail(ErrorKind::DegenerateLeadingCoefficient, "poly_roots: leading coefficient is zero");
  }
  CMatrix<Real> comp = CMatrix<Real>::Zero(d, d);
  for (Index k = 0; k < d; ++k) comp(0, k) = -c(d - 1 - k) / lead;
  for (Index k = 1; k < d; ++k) comp(k, k - 1) = Real(1);
  CVector<Real> roots = general_eig(comp).eigenvalues;

  const CVector<Real> dc = poly_derivative(c);
  for (Index k = 0; k < d; ++k) {
    std::complex<Real> z = roots(k);
    Real best = std::abs(poly_eval(c, z));
    for (int step = 0; step < 3; ++step) {
      const std::complex<Real> dp = poly_eval(dc, z);
      if (dp == std::complex<Real>(0)) break;
      const std::complex<Real> next = z - poly_eval(c, z) / dp;
      const Real val = std::abs(poly_eval(c, next));
      if (!std::isfinite(val) || val > best) break;  // keep the companion root near multiple roots
      z = next;
      best = val;
    }
    roots(k) = z;
  }
  return roots;
}

}  // namespace perturbatrix
