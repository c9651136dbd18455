#pragma once

#include <vector>

#include "perturbatrix/linalg.hpp"

namespace perturbatrix {

struct SpectralAtom {
  double location = 0.0;
  MatrixC weight;  // PSD, M x M
};

/// Finite atomic PSD-valued measure on the real line; locations strictly increasing.
struct SpectralMeasure {
  std::vector<SpectralAtom> atoms;
  Index dimension = 0;

  MatrixC total_mass() const;
  MatrixC mass(double a, double b) const;                 // Q([a, b])
  MatrixC first_moment(double a, double b) const;         // sum of s_j Q_j over [a, b]
  double scale() const;                                   // reference size for pole tests
  bool is_scalar() const { return dimension == 1; }
};

/// Atoms at the distinct eigenvalues of A with weights (B^{1/2} P_j B^{1/2}) restricted
/// to Ran(B). B must be Hermitian positive semidefinite.
SpectralMeasure build_measure(const HermitianEigenSystem<double>& a_eig, const MatrixC& b,
                              double coalesce_tol = 1e-10);

/// Scalar measure with the given locations and non-negative weights (merged when equal).
SpectralMeasure scalar_measure(const VectorR& locations, const VectorR& weights, double coalesce_tol = 1e-10);

/// Rank-one measure from A Hermitian and a vector e: weights |<e, u_r>|^2.
SpectralMeasure rank_one_measure(const MatrixC& a, const VectorC& e);

/// m(lambda) = sum_j Q_j / (s_j - lambda).
MatrixC eval_m(const SpectralMeasure& mu, cplx lambda, double pole_tol = 1e-14);
cplx eval_m_scalar(const SpectralMeasure& mu, cplx lambda, double pole_tol = 1e-14);
/// d/dlambda m(lambda) = sum_j Q_j / (s_j - lambda)^2.
MatrixC eval_m_derivative(const SpectralMeasure& mu, cplx lambda, double pole_tol = 1e-14);

/// p(gamma, lambda) = p0(lambda) + gamma p1(lambda) for B = e e^*.
struct SecularPair {
  VectorC p0;     // det(A - lambda I), ascending coefficients
  VectorC p1;     // det(A' - lambda I) with A' the truncation of A to e^perp
  VectorR alpha;  // eigenvalues of A, ascending
  VectorR delta;  // eigenvalues of A', ascending

  cplx eval(cplx gamma, cplx lambda) const;
  cplx d_lambda(cplx gamma, cplx lambda) const;
  VectorC coefficients(cplx gamma) const;  // of lambda -> p(gamma, lambda)
  VectorC roots(cplx gamma) const;
};

inline constexpr Index kSecularFaddeevLimit = 20;

SecularPair secular_pair(const MatrixC& a, const VectorC& e);

/// Truncation of A to e^perp in the basis given by the Householder reflector taking e to e_1.
MatrixC truncate_complement(const MatrixC& a, const VectorC& e);

/// det(I_M + gamma W^* (A - lambda I)^{-1} B W), W an orthonormal basis of Ran(B^*).
cplx relative_determinant(const MatrixC& a, const MatrixC& b, cplx gamma, cplx lambda);

/// gamma = -1/m(lambda) for scalar m.
cplx gamma_of_lambda(const SpectralMeasure& mu, cplx lambda);

/// d lambda / d gamma along the eigenvalue branch through lambda: m^2 / m'.
cplx lambda_derivative(const SpectralMeasure& mu, cplx lambda);

/// Zeros of 1 + gamma m(lambda) for a scalar measure, one per atom, by simultaneous
/// (Aberth) iteration on prod (s_j - lambda) (1 + gamma m(lambda)). Throws NoConvergence.
VectorC secular_eigenvalues(const SpectralMeasure& mu, cplx gamma, int max_iter = 500);

/// Couplings gamma with lambda in Spec(A + gamma B): -1/eig(m(lambda)) over non-zero eigenvalues.
VectorC couplings_for_eigenvalue(const SpectralMeasure& mu, cplx lambda);

}  // namespace perturbatrix
