#pragma once

#include <cstdint>
#include <vector>

#include "perturbatrix/herglotz.hpp"
#include "perturbatrix/problem.hpp"

namespace perturbatrix {

enum class DensityTag { Uniform, Linear, Grid };

/// Density f >= 0 on [0, 1]. Grid densities are piecewise linear through (s_k, f_k); a
/// repeated abscissa encodes a jump.
struct LimitModel {
  DensityTag tag = DensityTag::Uniform;
  VectorR grid_s;
  VectorR grid_f;
  double sup_norm = 1.0;
  double mass = 1.0;
  bool divergent_at_zero = true;  // integral of f(s)/s
  bool divergent_at_one = true;   // integral of f(s)/(1 - s)

  static LimitModel uniform();
  static LimitModel linear();  // f(s) = s
  static LimitModel from_grid(const VectorR& s, const VectorR& f);

  double density(double s) const;
  bool normalized(double tol = 1e-10) const { return std::abs(mass - 1.0) <= tol; }
  bool has_jumps() const;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_intervals = 4000;
};

/// int_0^1 f(s) / (s - lambda) ds: closed form for Uniform and Linear, quadrature otherwise.
cplx m_infty(const LimitModel& model, cplx lambda, const QuadratureOptions& opt = {});
/// Always by quadrature.
cplx m_infty_quadrature(const LimitModel& model, cplx lambda, const QuadratureOptions& opt = {});

/// (1/N) sum_n f(n/N) / (n/N - lambda).
cplx m_N(const LimitModel& model, Index N, cplx lambda);

/// A_N = diag(n/N), e_n = sqrt(f(n/N) / N), B_N = e e^*.
Problem discretize(const LimitModel& model, Index N);

/// max Im of the spectrum of A + gamma B.
double mu_N(const ProblemAnalysis& analysis, cplx gamma);

/// (1 / (2N)) sup |k'| on [0, 1] for k(s) = f(s) / (s - lambda).
double convergence_error(Index N, const LimitModel& model, cplx lambda);

/// Winding number of a closed polygon around z (0 when z is on an edge).
int polygon_winding(const std::vector<cplx>& polygon, cplx z);

struct ForbiddenOptions {
  double x0 = -0.4, x1 = 0.4, y0 = 1e-3, y1 = 0.5;  // gamma box
  int nx = 400;
  int ny = 400;
  int segment_points = 3000;
  int arc_points = 600;
  int refine_steps = 30;
  int threads = 1;
};

struct ForbiddenRegion {
  cplx disc_center{0.0};
  double disc_radius = 0.0;
  std::vector<cplx> range_boundary;  // sigma = m_infty on the boundary of S_{eps, r}
  std::vector<cplx> gamma_boundary;  // -1 / sigma
  ForbiddenOptions grid;
  std::vector<std::uint8_t> forbidden;  // ny rows of nx cells, row 0 at y0
  std::vector<cplx> boundary_points;    // mask transitions refined by bisection
  double artifact_radius = 0.0;         // |gamma| below which the boundary is unresolved

  cplx grid_point(int i, int j) const;
  bool forbidden_at(int i, int j) const { return forbidden[static_cast<size_t>(j) * grid.nx + i] != 0; }
  bool disc_contains(cplx gamma) const { return std::abs(gamma - disc_center) <= disc_radius; }
  bool in_artifact_zone(cplx gamma) const { return std::abs(gamma) < artifact_radius; }
  /// -1/gamma misses the range of m_infty on S_{eps, r}.
  bool is_forbidden(cplx gamma) const;
};

ForbiddenRegion forbidden_region(const LimitModel& model, double epsilon, double r, const ForbiddenOptions& opt = {});

}  // namespace perturbatrix
