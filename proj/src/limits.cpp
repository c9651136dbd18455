#include "perturbatrix/limits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

#include "perturbatrix/parallel.hpp"

namespace perturbatrix {

LimitModel LimitModel::uniform() {
  LimitModel m;
  m.tag = DensityTag::Uniform;
  return m;
}

LimitModel LimitModel::linear() {
  LimitModel m;
  m.tag = DensityTag::Linear;
  m.mass = 0.5;
  m.sup_norm = 1.0;
  m.divergent_at_zero = false;
  m.divergent_at_one = true;
  return m;
}

LimitModel LimitModel::from_grid(const VectorR& s, const VectorR& f) {
  if (s.size() != f.size() || s.size() < 2) fail(ErrorKind::InvalidArgument, "LimitModel::from_grid: need matching grids of size >= 2");
  if (!s.allFinite() || !f.allFinite()) fail(ErrorKind::InvalidArgument, "LimitModel::from_grid: non-finite entry");
  if (s(0) != 0.0 || s(s.size() - 1) != 1.0) fail(ErrorKind::InvalidArgument, "LimitModel::from_grid: grid must span [0, 1]");
  for (Index k = 0; k + 1 < s.size(); ++k)
    if (s(k + 1) < s(k)) fail(ErrorKind::InvalidArgument, "LimitModel::from_grid: abscissae must be non-decreasing");
  if (f.minCoeff() < 0.0) fail(ErrorKind::InvalidArgument, "LimitModel::from_grid: density must be non-negative");
  LimitModel m;
  m.tag = DensityTag::Grid;
  m.grid_s = s;
  m.grid_f = f;
  m.sup_norm = f.maxCoeff();
  m.mass = 0.0;
  for (Index k = 0; k + 1 < s.size(); ++k) m.mass += 0.5 * (s(k + 1) - s(k)) * (f(k) + f(k + 1));
  m.divergent_at_zero = f(0) > 0.0;
  m.divergent_at_one = f(f.size() - 1) > 0.0;
  return m;
}

double LimitModel::density(double s) const {
  if (s < 0.0 || s > 1.0) return 0.0;
  switch (tag) {
    case DensityTag::Uniform: return 1.0;
    case DensityTag::Linear: return s;
    case DensityTag::Grid: break;
  }
  const Index n = grid_s.size();
  const double* begin = grid_s.data();
  Index k = std::upper_bound(begin, begin + n, s) - begin;  // first knot > s
  if (k >= n) return grid_f(n - 1);
  if (k == 0) return grid_f(0);
  const double s0 = grid_s(k - 1), s1 = grid_s(k);
  if (s1 == s0) return grid_f(k);
  const double w = (s - s0) / (s1 - s0);
  return (1.0 - w) * grid_f(k - 1) + w * grid_f(k);
}

bool LimitModel::has_jumps() const {
  if (tag != DensityTag::Grid) return false;
  for (Index k = 0; k + 1 < grid_s.size(); ++k)
    if (grid_s(k + 1) == grid_s(k) && grid_f(k + 1) != grid_f(k)) return true;
  return false;
}

namespace {

void require_off_support(cplx lambda) {
  if (lambda.imag() == 0.0 && lambda.real() >= 0.0 && lambda.real() <= 1.0) {
    fail(ErrorKind::InvalidArgument, "m_infty: lambda lies on the support [0, 1]");
  }
}

// log((lambda - 1) / lambda) on the principal branches of both factors.
cplx log_ratio(cplx lambda) { return std::log(lambda - 1.0) - std::log(lambda); }

struct Segment {
  double a, b;
  cplx value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

constexpr double kKronrodNodes[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                     0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                     0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                     0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kKronrodWeights[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                       0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                       0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                       0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kGaussWeights[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                     0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
std::pair<cplx, double> gauss_kronrod15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const cplx fc = f(c);
  cplx kron = fc * kKronrodWeights[7];
  cplx gauss = fc * kGaussWeights[3];
  for (int k = 0; k < 7; ++k) {
    const cplx sum = f(c - h * kKronrodNodes[k]) + f(c + h * kKronrodNodes[k]);
    kron += kKronrodWeights[k] * sum;
    if (k % 2 == 1) gauss += kGaussWeights[k / 2] * sum;
  }
  return {kron * h, std::abs((kron - gauss) * h)};
}

template <typename F>
cplx adaptive_gk(const F& f, const std::vector<double>& breaks, double tol, int max_intervals) {
  std::priority_queue<Segment> heap;
  cplx total(0.0);
  double err = 0.0;
  for (size_t k = 0; k + 1 < breaks.size(); ++k) {
    if (breaks[k + 1] <= breaks[k]) continue;
    auto [v, e] = gauss_kronrod15(f, breaks[k], breaks[k + 1]);
    heap.push({breaks[k], breaks[k + 1], v, e});
    total += v;
    err += e;
  }
  int count = static_cast<int>(heap.size());
  while (err > tol) {
    if (count >= max_intervals || heap.empty()) {
      fail(ErrorKind::QuadratureFailure, "m_infty: adaptive quadrature did not reach the tolerance");
    }
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) fail(ErrorKind::QuadratureFailure, "m_infty: interval underflow");
    auto [v1, e1] = gauss_kronrod15(f, worst.a, mid);
    auto [v2, e2] = gauss_kronrod15(f, mid, worst.b);
    total += v1 + v2 - worst.value;
    err += e1 + e2 - worst.error;
    heap.push({worst.a, mid, v1, e1});
    heap.push({mid, worst.b, v2, e2});
    ++count;
  }
  return total;
}

// Double-exponential rule on [a, b], refined by halving the step.
template <typename F>
cplx tanh_sinh(const F& f, double a, double b, double tol) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double half_pi = 0.5 * std::numbers::pi;
  auto node = [&](double t, cplx& acc) {
    const double u = half_pi * std::sinh(t);
    const double ch = std::cosh(u);
    const double w = half_pi * std::cosh(t) / (ch * ch);
    const double off = 2.0 * h / (std::exp(2.0 * u) + 1.0);  // distance of c + h tanh(u) from b
    if (off <= 0.0 || off >= 2.0 * h) return;
    acc += w * (f(b - off) + f(a + off));
  };
  const double tmax = 4.0;
  double step = 0.5;
  cplx sum = half_pi * f(c);
  for (double t = step; t <= tmax; t += step) node(t, sum);
  cplx estimate = sum * step * h;
  for (int level = 0; level < 10; ++level) {
    step *= 0.5;
    for (double t = step; t <= tmax; t += 2.0 * step) node(t, sum);
    const cplx next = sum * step * h;
    if (std::abs(next - estimate) <= tol) return next;
    estimate = next;
  }
  fail(ErrorKind::QuadratureFailure, "m_infty: tanh-sinh refinement did not settle");
}

}  // namespace

cplx m_infty_quadrature(const LimitModel& model, cplx lambda, const QuadratureOptions& opt) {
  require_off_support(lambda);
  std::vector<double> breaks{0.0, 1.0};
  if (model.tag == DensityTag::Grid)
    for (Index k = 0; k < model.grid_s.size(); ++k) breaks.push_back(model.grid_s(k));

  // Subtract f(x0) / (s - lambda) when lambda sits above the support.
  const double x0 = lambda.real();
  double f0 = 0.0;
  cplx exact(0.0);
  if (x0 > 0.0 && x0 < 1.0) {
    f0 = model.density(x0);
    exact = f0 * log_ratio(lambda);
    breaks.push_back(x0);
  }
  auto integrand = [&](double s) { return (model.density(s) - f0) / (s - lambda); };

  // Endpoint pieces handled by tanh-sinh when lambda approaches an endpoint with f > 0.
  cplx piece(0.0);
  double lo = 0.0, hi = 1.0;
  const double d0 = std::abs(lambda), d1 = std::abs(lambda - 1.0);
  if (model.density(0.0) > 0.0 && d0 < 0.05 && f0 == 0.0) {
    lo = std::min(2.0 * d0, 0.5);
    piece += tanh_sinh(integrand, 0.0, lo, 0.1 * opt.abs_tol);
  }
  if (model.density(1.0) > 0.0 && d1 < 0.05 && f0 == 0.0) {
    hi = std::max(1.0 - 2.0 * d1, 0.5);
    piece += tanh_sinh(integrand, hi, 1.0, 0.1 * opt.abs_tol);
  }
  std::vector<double> inner{lo, hi};
  for (double x : breaks)
    if (x > lo && x < hi) inner.push_back(x);
  std::sort(inner.begin(), inner.end());
  inner.erase(std::unique(inner.begin(), inner.end()), inner.end());
  return exact + piece + adaptive_gk(integrand, inner, 0.5 * opt.abs_tol, opt.max_intervals);
}

cplx m_infty(const LimitModel& model, cplx lambda, const QuadratureOptions& opt) {
  require_off_support(lambda);
  switch (model.tag) {
    case DensityTag::Uniform: return log_ratio(lambda);
    case DensityTag::Linear: return 1.0 + lambda * log_ratio(lambda);
    case DensityTag::Grid: break;
  }
  return m_infty_quadrature(model, lambda, opt);
}

cplx m_N(const LimitModel& model, Index N, cplx lambda) {
  if (N < 1) fail(ErrorKind::InvalidArgument, "m_N: N must be positive");
  cplx sum(0.0);
  for (Index n = 1; n <= N; ++n) {
    const double s = double(n) / double(N);
    const cplx d = s - lambda;
    if (d == cplx(0.0)) fail(ErrorKind::PoleProximity, "m_N: lambda coincides with an atom");
    sum += model.density(s) / d;
  }
  return sum / double(N);
}

Problem discretize(const LimitModel& model, Index N) {
  if (N < 1) fail(ErrorKind::InvalidArgument, "discretize: N must be positive");
  MatrixC a = MatrixC::Zero(N, N);
  VectorC e(N);
  for (Index n = 1; n <= N; ++n) {
    const double s = double(n) / double(N);
    a(n - 1, n - 1) = s;
    e(n - 1) = std::sqrt(model.density(s) / double(N));
  }
  return Problem{a, e * e.adjoint()};
}

namespace {

// B = beta u u^*: secular roots over the atoms of A weighted by |<u, v_r>|^2; any
// eigenvalue of A outside the cyclic part stays real.
double rank_one_top(const ProblemAnalysis& an, cplx gamma) {
  const MatrixC& b = an.problem.b;
  const VectorC u = an.sector.range_basis.col(0);
  const cplx beta = u.dot(b * u);
  const VectorC c = an.alpha_vectors.adjoint() * u;
  const SpectralMeasure mu = scalar_measure(an.alpha, c.cwiseAbs2());
  const VectorC roots = secular_eigenvalues(mu, gamma * beta);
  double top = roots.size() < an.problem.dimension() ? 0.0 : -std::numeric_limits<double>::infinity();
  for (Index k = 0; k < roots.size(); ++k) top = std::max(top, roots(k).imag());
  return top;
}

}  // namespace

double mu_N(const ProblemAnalysis& analysis, cplx gamma) {
  if (!coupling_sector(analysis.sector).contains(gamma)) {
    fail(ErrorKind::OutOfSector, "mu_N: gamma lies outside the coupling sector");
  }
  if (analysis.rank() == 1) {
    try {
      return rank_one_top(analysis, gamma);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoConvergence) throw;
    }
  }
  const VectorC ev = eigenvalues<double>(analysis.problem.at(gamma));
  double top = -std::numeric_limits<double>::infinity();
  for (Index k = 0; k < ev.size(); ++k) top = std::max(top, ev(k).imag());
  return top;
}

double convergence_error(Index N, const LimitModel& model, cplx lambda) {
  if (N < 1) fail(ErrorKind::InvalidArgument, "convergence_error: N must be positive");
  const double x = std::clamp(lambda.real(), 0.0, 1.0);
  const double dist = std::abs(cplx(x, 0.0) - lambda);
  if (dist == 0.0) fail(ErrorKind::UnboundedDerivative, "convergence_error: lambda lies on the support");
  // k'(s) = f'(s) / (s - lambda) - f(s) / (s - lambda)^2.
  double sup = 0.0;
  switch (model.tag) {
    case DensityTag::Uniform:
      sup = 1.0 / (dist * dist);
      break;
    case DensityTag::Linear:
      sup = std::abs(lambda) / (dist * dist);
      break;
    case DensityTag::Grid: {
      if (model.has_jumps()) fail(ErrorKind::UnboundedDerivative, "convergence_error: density has a jump");
      double slope = 0.0;
      for (Index k = 0; k + 1 < model.grid_s.size(); ++k) {
        const double w = model.grid_s(k + 1) - model.grid_s(k);
        if (w > 0.0) slope = std::max(slope, std::abs(model.grid_f(k + 1) - model.grid_f(k)) / w);
      }
      sup = slope / dist + model.sup_norm / (dist * dist);
      break;
    }
  }
  return sup / (2.0 * double(N));
}

int polygon_winding(const std::vector<cplx>& poly, cplx z) {
  int wn = 0;
  const size_t n = poly.size();
  for (size_t k = 0; k < n; ++k) {
    const cplx p = poly[k], q = poly[(k + 1) % n];
    const double cross = (q.real() - p.real()) * (z.imag() - p.imag()) - (z.real() - p.real()) * (q.imag() - p.imag());
    if (p.imag() <= z.imag()) {
      if (q.imag() > z.imag() && cross > 0.0) ++wn;
    } else {
      if (q.imag() <= z.imag() && cross < 0.0) --wn;
    }
  }
  return wn;
}

cplx ForbiddenRegion::grid_point(int i, int j) const {
  const double x = grid.nx > 1 ? grid.x0 + (grid.x1 - grid.x0) * i / double(grid.nx - 1) : grid.x0;
  const double y = grid.ny > 1 ? grid.y0 + (grid.y1 - grid.y0) * j / double(grid.ny - 1) : grid.y0;
  return {x, y};
}

bool ForbiddenRegion::is_forbidden(cplx gamma) const {
  if (gamma == cplx(0.0)) return true;
  return polygon_winding(range_boundary, -1.0 / gamma) == 0;
}

namespace {

// Abscissae on [-X, X], dense near the endpoints 0 and 1 of the support.
std::vector<double> segment_abscissae(double X, double eps, int n) {
  std::vector<double> xs;
  for (int k = 0; k <= n; ++k) xs.push_back(-X + 2.0 * X * k / double(n));
  const double decades = std::max(1.0, std::log10(1.0 / eps));
  const int per_decade = 40;
  for (double c : {0.0, 1.0}) {
    for (int k = 0; k <= static_cast<int>(decades * per_decade) + per_decade; ++k) {
      const double off = eps * std::pow(10.0, double(k) / per_decade);
      if (off > 0.5) break;
      xs.push_back(c - off);
      xs.push_back(c + off);
    }
    xs.push_back(c);
  }
  for (int k = 1; k < 200; ++k) xs.push_back(k / 200.0);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<double> out;
  for (double x : xs)
    if (x >= -X && x <= X) out.push_back(x);
  return out;
}

}  // namespace

ForbiddenRegion forbidden_region(const LimitModel& model, double epsilon, double r, const ForbiddenOptions& opt) {
  if (!(epsilon > 0.0 && epsilon <= 1e-2)) fail(ErrorKind::InvalidArgument, "forbidden_region: epsilon must lie in (0, 1e-2]");
  if (!(r >= 10.0)) fail(ErrorKind::InvalidArgument, "forbidden_region: r must be at least 10");
  if (opt.nx < 2 || opt.ny < 2 || !(opt.x0 < opt.x1 && opt.y0 < opt.y1)) {
    fail(ErrorKind::InvalidArgument, "forbidden_region: empty grid");
  }
  ForbiddenRegion out;
  out.grid = opt;
  out.disc_radius = 1.0 / (2.0 * std::numbers::pi * model.sup_norm);
  out.disc_center = cplx(0.0, out.disc_radius);

  // Boundary of S_{eps, r}: the segment Im = eps left to right, then the arc back.
  const double X = std::sqrt(r * r - epsilon * epsilon);
  std::vector<cplx> path;
  for (double x : segment_abscissae(X, epsilon, opt.segment_points)) path.emplace_back(x, epsilon);
  const double phi0 = std::asin(epsilon / r);
  for (int k = 1; k < opt.arc_points; ++k) {
    const double phi = phi0 + (std::numbers::pi - 2.0 * phi0) * k / double(opt.arc_points);
    path.push_back(std::polar(r, phi));
  }
  out.range_boundary.resize(path.size());
  out.gamma_boundary.resize(path.size());
  for (size_t k = 0; k < path.size(); ++k) {
    out.range_boundary[k] = m_infty(model, path[k]);
    out.gamma_boundary[k] = -1.0 / out.range_boundary[k];
  }

  double art = 0.0;
  if (model.divergent_at_zero) art = std::max(art, std::abs(1.0 / m_infty(model, cplx(0.0, epsilon))));
  if (model.divergent_at_one) art = std::max(art, std::abs(1.0 / m_infty(model, cplx(1.0, epsilon))));
  out.artifact_radius = 2.0 * art;

  out.forbidden.assign(static_cast<size_t>(opt.nx) * opt.ny, 0);
  parallel_for(static_cast<size_t>(opt.ny), opt.threads, [&](size_t j) {
    for (int i = 0; i < opt.nx; ++i) {
      out.forbidden[j * opt.nx + i] = out.is_forbidden(out.grid_point(i, static_cast<int>(j))) ? 1 : 0;
    }
  });

  auto refine = [&](cplx a, cplx b) {
    bool fa = out.is_forbidden(a);
    for (int k = 0; k < opt.refine_steps; ++k) {
      const cplx m = 0.5 * (a + b);
      if (out.is_forbidden(m) == fa) a = m; else b = m;
    }
    out.boundary_points.push_back(0.5 * (a + b));
  };
  for (int j = 0; j < opt.ny; ++j) {
    for (int i = 0; i < opt.nx; ++i) {
      if (i + 1 < opt.nx && out.forbidden_at(i, j) != out.forbidden_at(i + 1, j)) refine(out.grid_point(i, j), out.grid_point(i + 1, j));
      if (j + 1 < opt.ny && out.forbidden_at(i, j) != out.forbidden_at(i, j + 1)) refine(out.grid_point(i, j), out.grid_point(i, j + 1));
    }
  }
  return out;
}

}  // namespace perturbatrix
