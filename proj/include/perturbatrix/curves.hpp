#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "perturbatrix/problem.hpp"

namespace perturbatrix {

/// Ray gamma = t e^{i theta}. Zero t0 / max_step select automatic values.
struct RaySpec {
  double theta = 0.0;  // radians
  double t0 = 0.0;
  double t_max = 1.0;
  double max_step = 0.0;
  int max_steps = 200000;
  int audit_every = 25;
  double newton_tol = 1e-12;   // relative to ||A|| + t ||B||
  double audit_tol = 1e-7;     // relative to ||A|| + t ||B||
  bool force = false;          // trace even if hypotheses fail
};

enum class EndClass { Unclassified, Divergent, Convergent };

struct SpectralCurve {
  Index start_index = 0;  // index into alpha (ascending eigenvalues of A)
  std::vector<double> t;
  std::vector<cplx> lambda;
  EndClass end_class = EndClass::Unclassified;
  Index end_index = -1;   // into beta (Divergent) or delta (Convergent)
  cplx end_value{0.0};    // slope lambda/gamma (Divergent) or limit (Convergent)
};

struct NearestApproach {
  double distance = std::numeric_limits<double>::infinity();
  double t = 0.0;
  Index first = -1;
  Index second = -1;
  cplx midpoint{0.0};
};

struct SpectralCurveSet {
  double theta = 0.0;
  double t_max = 0.0;
  std::vector<SpectralCurve> curves;
  bool complete = false;   // reached t_max
  bool collision = false;  // step control collapsed; data is partial
  NearestApproach nearest;
  double max_audit_error = 0.0;  // relative pairing distance to the QR oracle
  int audits = 0;
  int steps = 0;
  std::vector<Index> permutation;  // tau, filled by classify_endpoints

  /// Current values at the last accepted t.
  VectorC last_values() const;
  double last_t() const;
};

SpectralCurveSet trace_ray(const ProblemAnalysis& analysis, const RaySpec& ray);

struct ClassifyOptions {
  double divergence_factor = 0.5;
  double gap_factor = 10.0;
  double min_t_factor = 1e3;
};

/// Tags each curve and fills the permutation: tau(r) is the delta index for a convergent
/// curve and (N - M) + beta index for a divergent one.
SpectralCurveSet classify_endpoints(SpectralCurveSet curves, const ProblemAnalysis& analysis,
                                    const ClassifyOptions& opt = {});

/// Default t_max used for classification: 1e3 * max(||A||, 1) scaled by 1/||B||, at least 1e3.
double classification_t_max(const ProblemAnalysis& analysis);

/// Trace plus classification at one angle.
SpectralCurveSet monodromy_at(const ProblemAnalysis& analysis, double theta, bool force = false);

/// p(gamma, lambda) = sum_k q_k(lambda) gamma^k, k = 0..M.
struct BivariatePolynomial {
  std::vector<VectorC> q;

  cplx eval(cplx gamma, cplx lambda) const;
  cplx d_gamma(cplx gamma, cplx lambda) const;
  cplx d_lambda(cplx gamma, cplx lambda) const;
  cplx d_lambda2(cplx gamma, cplx lambda) const;
  cplx d_gamma_lambda(cplx gamma, cplx lambda) const;
};

/// det(A + gamma B - lambda I) as a bivariate polynomial (N <= 64).
BivariatePolynomial characteristic_bivariate(const ProblemAnalysis& analysis);

struct CriticalPoint {
  cplx gamma{0.0};
  cplx lambda{0.0};
  double residual = 0.0;  // max(|p|, |p_lambda|) relative to coefficient scale
  bool converged = false;
};

/// Newton on p = 0, p_lambda = 0 from the given start.
CriticalPoint locate_critical_point(const BivariatePolynomial& p, cplx gamma0, cplx lambda0, int max_iter = 60);

struct ExceptionalBracket {
  double theta_lo = 0.0;
  double theta_hi = 0.0;
  std::vector<Index> tau_lo;
  std::vector<Index> tau_hi;
  std::optional<CriticalPoint> critical;
};

struct ExceptionalAngles {
  std::vector<ExceptionalBracket> brackets;
  std::vector<double> grid;
  std::vector<std::vector<Index>> grid_permutations;
};

struct ExceptionalOptions {
  int grid_points = 18;  // the open range is split into this many equal pieces
  int threads = 1;
  bool force = false;  // trace even if hypotheses fail
};

/// Scans theta over the open interval (theta_lo, theta_hi), bisects where the permutation
/// changes down to `resolution` radians and localizes the multiple eigenvalue.
ExceptionalAngles find_exceptional_angles(const ProblemAnalysis& analysis, double theta_lo, double theta_hi,
                                          double resolution, const ExceptionalOptions& opt = {});

bool homotopy_invariance_check(const ProblemAnalysis& analysis, double theta_a, double theta_b,
                               const ExceptionalAngles& exceptional);

/// Eigenvalues of A + t B for real t (B Hermitian), one ascending row per t.
MatrixR real_coupling_sweep(const Problem& problem, const VectorR& t_values);

}  // namespace perturbatrix
