#pragma once

#include <cmath>
#include <limits>
#include <optional>

#include "perturbatrix/linalg/householder.hpp"

namespace perturbatrix {

/// Eigenvalues with algebraic multiplicity, unsorted. Eigenvectors (if requested)
/// are unit-norm columns matching the eigenvalue order.
template <typename Real>
struct ComplexEigenSystem {
  CVector<Real> eigenvalues;
  std::optional<CMatrix<Real>> eigenvectors;
};

struct GeneralEigOptions {
  bool vectors = false;
  bool balance = true;
  int iteration_factor = 40;  // QR iterations allowed per eigenvalue = iteration_factor * N
  Index max_dimension = 512;
};

namespace detail {

template <typename Real>
inline Real abs1(const std::complex<Real>& z) {
  return std::abs(z.real()) + std::abs(z.imag());
}

// Rotation G = [c s; -conj(s) c] with G [a; b] = [r; 0].
template <typename Real>
struct Givens {
  Real c = Real(1);
  std::complex<Real> s{0};

  static Givens make(const std::complex<Real>& a, const std::complex<Real>& b, std::complex<Real>* r = nullptr) {
    Givens g;
    const Real ab = std::abs(b);
    if (ab == Real(0)) {
      if (r) *r = a;
      return g;
    }
    const Real aa = std::abs(a);
    if (aa == Real(0)) {
      g.c = Real(0);
      g.s = std::conj(b) / ab;
      if (r) *r = ab;
      return g;
    }
    const Real norm = std::hypot(aa, ab);
    const std::complex<Real> alpha = a / aa;
    g.c = aa / norm;
    g.s = alpha * std::conj(b) / norm;
    if (r) *r = alpha * norm;
    return g;
  }

  // rows i, i+1 of m (columns from col0) <- G * rows
  void left(CMatrix<Real>& m, Index i, Index col0) const {
    for (Index j = col0; j < m.cols(); ++j) {
      const std::complex<Real> x = m(i, j), y = m(i + 1, j);
      m(i, j) = c * x + s * y;
      m(i + 1, j) = -std::conj(s) * x + c * y;
    }
  }

  // columns i, i+1 of m (rows below row_end) <- cols * G^*
  void right(CMatrix<Real>& m, Index i, Index row_end) const {
    for (Index r = 0; r < row_end; ++r) {
      const std::complex<Real> x = m(r, i), y = m(r, i + 1);
      m(r, i) = x * c + y * std::conj(s);
      m(r, i + 1) = -x * s + y * c;
    }
  }
};

// Parlett-Reinsch diagonal scaling by powers of two; returns D with A_bal = D^{-1} A D.
template <typename Real>
RVector<Real> balance(CMatrix<Real>& a) {
  const Index n = a.rows();
  RVector<Real> d = RVector<Real>::Ones(n);
  const Real radix = Real(2);
  bool converged = false;
  int guard = 0;
  while (!converged && ++guard < 200) {
    converged = true;
    for (Index i = 0; i < n; ++i) {
      Real col = 0, row = 0;
      for (Index j = 0; j < n; ++j) {
        if (j == i) continue;
        col += abs1(a(j, i));
        row += abs1(a(i, j));
      }
      if (col == Real(0) || row == Real(0)) continue;
      Real g = row / radix;
      Real f = Real(1);
      const Real s = col + row;
      while (col < g) {
        f *= radix;
        col *= radix * radix;
      }
      g = row * radix;
      while (col > g) {
        f /= radix;
        col /= radix * radix;
      }
      if ((col + row) / f < Real(0.95) * s) {
        converged = false;
        d(i) *= f;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
  return d;
}

template <typename Real>
std::complex<Real> wilkinson_shift(const CMatrix<Real>& t, Index iu, int iter) {
  if (iter == 10 || iter == 20 || iter == 30) {
    // exceptional shift
    const Real kick = Real(0.75) * (std::abs(t(iu, iu - 1)) + (iu >= 2 ? std::abs(t(iu - 1, iu - 2)) : Real(0)));
    return t(iu, iu) + kick;
  }
  const std::complex<Real> a = t(iu - 1, iu - 1), b = t(iu - 1, iu), c = t(iu, iu - 1), d = t(iu, iu);
  const std::complex<Real> half_tr = (a + d) * Real(0.5);
  const std::complex<Real> disc = std::sqrt((a - d) * (a - d) * Real(0.25) + b * c);
  const std::complex<Real> mu1 = half_tr + disc, mu2 = half_tr - disc;
  return std::abs(mu1 - d) <= std::abs(mu2 - d) ? mu1 : mu2;
}

// Reduces Hessenberg t to upper triangular in place; accumulates into z if given.
template <typename Real>
void complex_schur(CMatrix<Real>& t, CMatrix<Real>* z, int iteration_cap) {
  const Index n = t.rows();
  const Real eps = std::numeric_limits<Real>::epsilon();
  Index iu = n - 1;
  int iter = 0;
  while (true) {
    while (iu > 0) {
      const Real scale = abs1(t(iu - 1, iu - 1)) + abs1(t(iu, iu));
      if (abs1(t(iu, iu - 1)) <= eps * scale || abs1(t(iu, iu - 1)) <= std::numeric_limits<Real>::min()) {
        t(iu, iu - 1) = Real(0);
        --iu;
        iter = 0;
      } else {
        break;
      }
    }
    if (iu == 0) break;
    if (++iter > iteration_cap) {
      fail(ErrorKind::NoConvergence, "general_eig: QR iteration cap reached");
    }
    Index il = iu - 1;
    while (il > 0) {
      const Real scale = abs1(t(il - 1, il - 1)) + abs1(t(il, il));
      if (abs1(t(il, il - 1)) <= eps * scale) {
        t(il, il - 1) = Real(0);
        break;
      }
      --il;
    }

    const std::complex<Real> shift = wilkinson_shift(t, iu, iter);
    Givens<Real> g = Givens<Real>::make(t(il, il) - shift, t(il + 1, il));
    g.left(t, il, il);
    g.right(t, il, std::min(il + 2, iu) + 1);
    if (z) g.right(*z, il, n);
    for (Index i = il + 1; i < iu; ++i) {
      std::complex<Real> r;
      g = Givens<Real>::make(t(i, i - 1), t(i + 1, i - 1), &r);
      t(i, i - 1) = r;
      t(i + 1, i - 1) = Real(0);
      g.left(t, i, i);
      g.right(t, i, std::min(i + 2, iu) + 1);
      if (z) g.right(*z, i, n);
    }
  }
}

// Eigenvectors of upper triangular t by back substitution.
template <typename Real>
CMatrix<Real> triangular_eigenvectors(const CMatrix<Real>& t) {
  const Index n = t.rows();
  CMatrix<Real> x = CMatrix<Real>::Zero(n, n);
  const Real eps = std::numeric_limits<Real>::epsilon();
  const Real tnorm = std::max(t.cwiseAbs().maxCoeff(), std::numeric_limits<Real>::min());
  for (Index k = 0; k < n; ++k) {
    x(k, k) = Real(1);
    const std::complex<Real> lambda = t(k, k);
    for (Index i = k - 1; i >= 0; --i) {
      std::complex<Real> sum = 0;
      for (Index j = i + 1; j <= k; ++j) sum += t(i, j) * x(j, k);
      std::complex<Real> denom = t(i, i) - lambda;
      if (std::abs(denom) < eps * tnorm) denom = eps * tnorm;
      x(i, k) = -sum / denom;
    }
  }
  return x;
}

}  // namespace detail

template <typename Real>
ComplexEigenSystem<Real> general_eig(const CMatrix<Real>& a, const GeneralEigOptions& opt = {}) {
  require_square(a, "general_eig");
  require_finite(a, "general_eig");
  const Index n = a.rows();
  if (n > opt.max_dimension) fail(ErrorKind::InvalidArgument, "general_eig: dimension exceeds supported maximum");
  ComplexEigenSystem<Real> out;
  out.eigenvalues.resize(n);
  if (n == 0) return out;

  CMatrix<Real> work = a;
  RVector<Real> scaling = RVector<Real>::Ones(n);
  if (opt.balance) scaling = detail::balance(work);

  HessenbergForm<Real> hf = hessenberg<Real>(work, opt.vectors);
  CMatrix<Real>& t = hf.h;
  detail::complex_schur(t, opt.vectors ? &hf.q : nullptr, opt.iteration_factor * static_cast<int>(n));
  out.eigenvalues = t.diagonal();

  if (opt.vectors) {
    CMatrix<Real> v = hf.q * detail::triangular_eigenvectors(t);
    v = scaling.asDiagonal() * v;
    for (Index k = 0; k < n; ++k) {
      const Real nv = v.col(k).norm();
      if (nv > Real(0)) v.col(k) /= nv;
    }
    out.eigenvectors = std::move(v);
  }
  return out;
}

template <typename Real>
CVector<Real> eigenvalues(const CMatrix<Real>& a) {
  return general_eig(a).eigenvalues;
}

}  // namespace perturbatrix
