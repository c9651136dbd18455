#pragma once

#include <functional>
#include <vector>

#include "perturbatrix/herglotz.hpp"

namespace perturbatrix {

/// Measure with all atoms in [a, b] replaced by the block X^{1/2}(Y - lambda)^{-1}X^{1/2}.
struct CompressedHerglotz {
  std::vector<SpectralAtom> kept_atoms;
  MatrixC X;       // Q([a, b])
  MatrixC X_half;  // X^{1/2}
  MatrixC Y;       // a I <= Y <= b I
  double a = 0.0;
  double b = 0.0;
  Index dimension = 0;

  MatrixC eval(cplx lambda) const;
  cplx eval_scalar(cplx lambda) const;
  /// The same function as an atomic measure (kept atoms plus the eigen-atoms of Y).
  SpectralMeasure as_measure() const;
};

CompressedHerglotz compress(const SpectralMeasure& mu, double a, double b, double pinv_tol = 1e-12);

/// 2 (b - a)^2 ||X|| / L^3.
double compression_error_bound(const CompressedHerglotz& comp, double L);
double compression_error_bound(double width, double mass_norm, double L);

/// f_sup * ||Q([a, b])||.
double q_interval_bound(const SpectralMeasure& mu, double f_sup, double a, double b);

/// A disc or an axis-aligned rectangle in the complex plane.
struct Region {
  enum class Kind { Disc, Rectangle };
  Kind kind = Kind::Disc;
  cplx center{0.0};
  double radius = 1.0;
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;

  static Region disc(cplx center, double radius);
  static Region rectangle(double x0, double x1, double y0, double y1);

  bool contains(cplx z) const { return signed_distance(z) < 0.0; }
  double signed_distance(cplx z) const;  // negative inside
  cplx boundary_point(double s) const;   // s in [0, 1), counter-clockwise
  cplx mid() const;
  Region mapped(cplx shift, double scale) const;  // image under z -> (z - shift) / scale
  double extent() const;                          // half the diameter of the bounding box
};

using ComplexFunction = std::function<cplx(cplx)>;

/// Winding number of f around the boundary of `contour`, from argument increments.
/// Node count doubles from `initial` until the count is stable and no increment exceeds
/// pi/2; fails with NoConvergence at `cap`.
int winding_number(const ComplexFunction& f, const Region& contour, int initial = 256, int cap = 8192);

struct IsolatingDisc {
  cplx center{0.0};  // root of p, original coordinates
  double radius = 0.0;
  int zeros_p = 0;
  int zeros_q = 0;
};

struct RoucheCertificate {
  Region region;
  double epsilon = 0.0;
  cplx shift{0.0};    // w = (z - shift) / scale
  double scale = 1.0;
  int count_p = 0;
  int count_q = 0;
  std::vector<IsolatingDisc> discs;
  double min_margin_p = 0.0;     // min |p^| - Lipschitz slack on the collar
  double max_difference = 0.0;   // max |p^ - q^| + Lipschitz slack on U_eps

  bool certified() const;
};

struct RoucheOptions {
  double scale = 0.0;    // rescaling factor; 0 picks half the minimum root separation
  int grid_per_unit = 0;  // grid density in normalized units; 0 picks ceil(16 / eps)
};

/// Certifies that p (monic after normalization) and q have matching zeros in U, each
/// isolated in a disc of radius eps (normalized units).
RoucheCertificate rouche_certify(const VectorC& p_coeffs, const ComplexFunction& q, const Region& U, double epsilon,
                                 const RoucheOptions& opt = {});

/// Global counts on U plus a local certificate around every root of p in U, with
/// p_k(z) = z - r_k and q_k(z) = q(z) / (lead * prod_{j != k} (z - r_j)).
struct PairingCertificate {
  Region region;
  int count_p = 0;
  int count_q = 0;
  std::vector<RoucheCertificate> local;

  bool one_to_one() const;
};

PairingCertificate certify_pairing(const VectorC& p_coeffs, const ComplexFunction& q, const Region& U,
                                   double epsilon = 0.45);

/// prod_{s_j in [lo, hi]} (s_j - lambda) * (1 + gamma m(lambda)) for scalar m, with the
/// poles in [lo, hi] cleared.
cplx cleared_secular(const SpectralMeasure& mu, cplx gamma, cplx lambda, double lo, double hi);

}  // namespace perturbatrix
