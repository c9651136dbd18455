#pragma once

#include <vector>

#include "perturbatrix/linalg.hpp"

namespace perturbatrix {

/// Orthogonal decomposition R_0, R_1, ... of the Krylov span of Ran(B) under A, and
/// the block tridiagonal matrix of A in the concatenated basis.
struct KrylovDecomposition {
  std::vector<MatrixC> subspaces;
  MatrixC basis;
  MatrixC tridiagonal;
  bool cyclic = false;

  std::vector<Index> dimensions() const;
};

struct KrylovOptions {
  double range_tol = 1e-12;   // singular values of B kept above range_tol * ||B||
  double accept_tol = 1e-10;  // new direction kept if its residual exceeds accept_tol * ||Av||
};

KrylovDecomposition krylov_decompose(const MatrixC& a, const MatrixC& b, const KrylovOptions& opt = {});

struct HalfPlaneReport {
  VectorC eigenvalues;
  double min_imag = 0.0;
  std::vector<Index> geometric_multiplicity;
  Index rank = 0;

  bool all_upper() const { return min_imag > 0.0; }
  bool multiplicities_bounded() const;
};

HalfPlaneReport verify_upper_halfplane(const MatrixC& a, const MatrixC& b, cplx gamma, double null_tol = 1e-8);

}  // namespace perturbatrix
