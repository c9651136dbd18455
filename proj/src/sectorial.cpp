#include "perturbatrix/sectorial.hpp"

#include <cmath>
#include <numbers>

namespace perturbatrix {

MatrixC truncate(const MatrixC& a, const MatrixC& basis) { return basis.adjoint() * a * basis; }

SectorialDecomposition analyze_sectorial(const MatrixC& b, const SectorialOptions& opt) {
  require_square(b, "analyze_sectorial");
  require_finite(b, "analyze_sectorial");
  const Index n = b.rows();
  SectorialDecomposition dec;
  dec.norm = operator_norm(b);
  if (dec.norm == 0.0) {
    dec.kernel_basis = MatrixC::Identity(n, n);
    dec.range_basis = MatrixC(n, 0);
    dec.X = MatrixC(0, 0);
    dec.E = MatrixC(0, 0);
    return dec;
  }

  const MatrixC d0 = (b + b.adjoint()) * 0.5;
  const MatrixC d1 = (b - b.adjoint()) * cplx(0.0, -0.5);
  const HermitianEigenSystem<double> es = hermitian_eig(d0);
  const double thresh = opt.kernel_tol * dec.norm;
  if (es.eigenvalues(0) < -thresh) {
    fail(ErrorKind::NotSectorial, "analyze_sectorial: (B + B^*)/2 has a negative eigenvalue");
  }
  Index k = 0;
  while (k < n && es.eigenvalues(k) <= thresh) ++k;
  dec.kernel_basis = es.eigenvectors.leftCols(k);
  dec.range_basis = es.eigenvectors.rightCols(n - k);
  dec.rank = n - k;

  if (k > 0 && operator_norm<double>(d1 * dec.kernel_basis) > opt.imaginary_tol * dec.norm) {
    fail(ErrorKind::NotSectorial, "analyze_sectorial: imaginary part does not vanish on Ker(B + B^*)");
  }

  const VectorR x = es.eigenvalues.tail(n - k);
  dec.X = x.cast<cplx>().asDiagonal();
  const VectorC inv_sqrt = x.cwiseSqrt().cwiseInverse().cast<cplx>();
  MatrixC e = inv_sqrt.asDiagonal() * truncate(d1, dec.range_basis) * inv_sqrt.asDiagonal();
  e = (e + e.adjoint()) * 0.5;
  dec.E = e;
  if (dec.rank > 0) {
    const VectorR ee = hermitian_eigenvalues<double>(e);
    dec.sigma2 = std::max(0.0, std::atan(ee(ee.size() - 1)));
    dec.sigma1 = std::max(0.0, std::atan(-ee(0)));
  }
  return dec;
}

bool CouplingSector::contains(cplx gamma) const {
  if (gamma == cplx(0.0)) return true;
  const double arg = std::arg(gamma);
  return sigma1 < arg && arg < std::numbers::pi - sigma2;
}

double CouplingSector::theta_max() const { return std::numbers::pi - sigma2; }

CouplingSector coupling_sector(const SectorialDecomposition& dec) { return {dec.sigma1, dec.sigma2}; }

bool is_extreme_ray(const MatrixC& b, double sigma1, double sigma2, double angle_tol) {
  SectorialDecomposition dec;
  try {
    dec = analyze_sectorial(b);
  } catch (const Error& err) {
    if (err.kind() == ErrorKind::NotSectorial) fail(ErrorKind::NotInCone, err.what());
    throw;
  }
  if (dec.sigma1 > sigma1 + angle_tol || dec.sigma2 > sigma2 + angle_tol) {
    fail(ErrorKind::NotInCone, "is_extreme_ray: numerical range leaves the given sector");
  }
  if (dec.rank != 1) return false;
  const VectorC w = dec.range_basis.col(0);
  const cplx alpha = b.trace();
  if ((b - alpha * w * w.adjoint()).norm() > 1e-10 * dec.norm) return false;
  const double arg = std::arg(alpha);
  return std::abs(arg + sigma1) <= angle_tol || std::abs(arg - sigma2) <= angle_tol;
}

ZeroEquivalence check_zero_equivalence(const MatrixC& b, const MatrixC& s, double tol) {
  if (s.cols() != b.rows()) fail(ErrorKind::DimensionMismatch, "check_zero_equivalence: S and B sizes differ");
  const SectorialDecomposition dec = analyze_sectorial(b);
  const double ns = operator_norm(s);
  const double nb = dec.norm;
  ZeroEquivalence z;
  z.sbs = operator_norm<double>(s * b * s.adjoint()) <= tol * ns * ns * nb;
  z.sb = operator_norm<double>(s * b) <= tol * ns * nb;
  z.sb_star = operator_norm<double>(s * b.adjoint()) <= tol * ns * nb;
  return z;
}

}  // namespace perturbatrix
