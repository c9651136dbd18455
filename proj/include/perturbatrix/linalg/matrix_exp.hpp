#pragma once

#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "perturbatrix/core.hpp"

namespace perturbatrix {

/// exp(tA) by scaling and squaring with the degree-13 Pade approximant.
template <typename Real>
CMatrix<Real> matrix_exp(const CMatrix<Real>& a, Real t = Real(1)) {
  require_square(a, "matrix_exp");
  require_finite(a, "matrix_exp");
  const Index n = a.rows();
  const CMatrix<Real> id = CMatrix<Real>::Identity(n, n);
  if (n == 0) return id;
  CMatrix<Real> x = a * t;
  const Real norm1 = x.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(norm1)) fail(ErrorKind::Overflow, "matrix_exp: scaled matrix is not finite");
  if (norm1 == Real(0)) return id;

  constexpr Real theta13 = Real(5.371920351148152);
  int squarings = 0;
  if (norm1 > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    x /= std::ldexp(Real(1), squarings);
  }

  static constexpr Real b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
  const CMatrix<Real> x2 = x * x;
  const CMatrix<Real> x4 = x2 * x2;
  const CMatrix<Real> x6 = x4 * x2;
  const CMatrix<Real> u_inner = b[13] * x6 + b[11] * x4 + b[9] * x2;
  const CMatrix<Real> u = x * (x6 * u_inner + b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * id);
  const CMatrix<Real> v_inner = b[12] * x6 + b[10] * x4 + b[8] * x2;
  const CMatrix<Real> v = x6 * v_inner + b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * id;

  CMatrix<Real> r = Eigen::PartialPivLU<CMatrix<Real>>(v - u).solve(v + u);
  for (int k = 0; k < squarings; ++k) {
    r = r * r;
    if (!r.allFinite()) fail(ErrorKind::Overflow, "matrix_exp: overflow while squaring");
  }
  if (!r.allFinite()) fail(ErrorKind::Overflow, "matrix_exp: result is not finite");
  return r;
}

}  // namespace perturbatrix
