#pragma once

#include "perturbatrix/linalg.hpp"

namespace perturbatrix {

/// W^* A W for a matrix W with orthonormal columns.
MatrixC truncate(const MatrixC& a, const MatrixC& basis);

/// B restricted to K^perp = Ker(B)^perp, written as X^{1/2}(I + iE)X^{1/2} in the basis
/// range_basis of K^perp (X is diagonal there).
struct SectorialDecomposition {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  MatrixC kernel_basis;
  MatrixC range_basis;
  MatrixC X;
  MatrixC E;
  Index rank = 0;
  double norm = 0.0;  // operator norm of B
};

struct SectorialOptions {
  double kernel_tol = 1e-12;     // relative to ||B||, on eigenvalues of (B + B^*)/2
  double imaginary_tol = 1e-10;  // relative to ||B||, for (B - B^*)/2i on the kernel
};

SectorialDecomposition analyze_sectorial(const MatrixC& b, const SectorialOptions& opt = {});

/// {0} together with the open sector sigma1 < arg(gamma) < pi - sigma2.
struct CouplingSector {
  double sigma1 = 0.0;
  double sigma2 = 0.0;

  bool contains(cplx gamma) const;
  double theta_min() const { return sigma1; }
  double theta_max() const;
};

CouplingSector coupling_sector(const SectorialDecomposition& dec);

/// True iff B spans an extreme ray of the cone with constants (sigma1, sigma2).
bool is_extreme_ray(const MatrixC& b, double sigma1, double sigma2, double angle_tol = 1e-10);

struct ZeroEquivalence {
  bool sbs = false;     // S B S^* = 0
  bool sb = false;      // S B = 0
  bool sb_star = false; // S B^* = 0

  bool consistent() const { return sbs == sb && sb == sb_star; }
};

ZeroEquivalence check_zero_equivalence(const MatrixC& b, const MatrixC& s, double tol = 1e-12);

}  // namespace perturbatrix
