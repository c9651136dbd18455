#pragma once

#include <cmath>

#include "perturbatrix/core.hpp"

namespace perturbatrix {

/// Hermitian unitary reflector H = I - beta v v^* with H x = -e^{i arg x_0} |x| e_1.
template <typename Real>
struct Reflector {
  CVector<Real> v;
  Real beta = Real(0);

  bool trivial() const { return beta == Real(0); }

  template <typename Derived>
  void apply_left(Eigen::MatrixBase<Derived>&& block) const {
    if (trivial()) return;
    const Eigen::Matrix<std::complex<Real>, 1, Eigen::Dynamic> w = v.adjoint() * block;
    block.noalias() -= (beta * v) * w;
  }

  template <typename Derived>
  void apply_right(Eigen::MatrixBase<Derived>&& block) const {
    if (trivial()) return;
    const CVector<Real> w = block * v;
    block.noalias() -= (beta * w) * v.adjoint();
  }
};

template <typename Real, typename Derived>
Reflector<Real> make_reflector(const Eigen::MatrixBase<Derived>& x) {
  Reflector<Real> h;
  h.v = x;
  const Real norm = x.norm();
  if (norm == Real(0)) return h;
  const Real tail = x.size() > 1 ? x.tail(x.size() - 1).norm() : Real(0);
  const std::complex<Real> x0 = x(0);
  if (tail == Real(0) && x0.imag() == Real(0) && x0.real() < Real(0)) return h;  // already -|x| e_1
  const Real a0 = std::abs(x0);
  const std::complex<Real> phase = a0 > Real(0) ? x0 / a0 : std::complex<Real>(1);
  h.v(0) += phase * norm;
  h.beta = Real(1) / (norm * (norm + a0));
  return h;
}

/// A = Q H Q^* with H upper Hessenberg.
template <typename Real>
struct HessenbergForm {
  CMatrix<Real> h;
  CMatrix<Real> q;
};

template <typename Real>
HessenbergForm<Real> hessenberg(const CMatrix<Real>& a, bool accumulate = true) {
  require_square(a, "hessenberg");
  const Index n = a.rows();
  HessenbergForm<Real> out{a, accumulate ? CMatrix<Real>::Identity(n, n) : CMatrix<Real>()};
  CMatrix<Real>& h = out.h;
  for (Index k = 0; k + 2 < n; ++k) {
    const Index m = n - k - 1;
    const Reflector<Real> r = make_reflector<Real>(h.col(k).tail(m));
    if (r.trivial()) continue;
    r.apply_left(h.bottomRightCorner(m, n - k));
    r.apply_right(h.rightCols(m));
    h.col(k).tail(m - 1).setZero();
    if (accumulate) r.apply_right(out.q.rightCols(m));
  }
  return out;
}

}  // namespace perturbatrix
