#include "perturbatrix/curves.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "perturbatrix/herglotz.hpp"
#include "perturbatrix/parallel.hpp"

namespace perturbatrix {

VectorC SpectralCurveSet::last_values() const {
  VectorC v(static_cast<Index>(curves.size()));
  for (size_t r = 0; r < curves.size(); ++r) v(static_cast<Index>(r)) = curves[r].lambda.back();
  return v;
}

double SpectralCurveSet::last_t() const { return curves.empty() ? 0.0 : curves.front().t.back(); }

namespace {

struct Tracer {
  const ProblemAnalysis& an;
  const RaySpec& ray;
  cplx dir;
  Index n;

  double scale(double t) const { return std::max(an.norm_a + t * an.norm_b, 1e-300); }
  MatrixC matrix(double t) const { return an.problem.a + (t * dir) * an.problem.b; }

  // Newton on lambda -> det(M - lambda I) with step 1 / tr((M - lambda I)^{-1}).
  bool newton(const MatrixC& m, cplx& lambda, double tol, int max_iter, int& iters) const {
    const MatrixC id = MatrixC::Identity(n, n);
    for (iters = 1; iters <= max_iter; ++iters) {
      Eigen::PartialPivLU<MatrixC> lu(m - lambda * id);
      const cplx tr = lu.inverse().trace();
      if (!std::isfinite(tr.real()) || !std::isfinite(tr.imag())) return true;  // landed on the eigenvalue
      if (tr == cplx(0.0)) return false;
      const cplx step = 1.0 / tr;
      lambda += step;
      if (std::abs(step) <= tol) return true;
    }
    return false;
  }

  // d lambda / d t = e^{i theta} (y^* B x) / (y^* x) from inverse iteration at a nearby shift.
  cplx derivative(const MatrixC& m, cplx lambda, double sc) const {
    const cplx shift = lambda + cplx(1.0, 1.0) * (1e-12 * sc);
    Eigen::PartialPivLU<MatrixC> lu(m - shift * MatrixC::Identity(n, n));
    VectorC x(n), y(n);
    for (Index k = 0; k < n; ++k) {
      x(k) = cplx(1.3 + std::cos(double(k)), std::sin(2.0 * double(k)));
      y(k) = cplx(0.9 + std::sin(double(k) + 0.5), std::cos(3.0 * double(k)));
    }
    for (int it = 0; it < 3; ++it) {
      x = lu.solve(x);
      x.normalize();
      y = lu.adjoint().solve(y);
      y.normalize();
    }
    const cplx yx = y.dot(x);
    if (yx == cplx(0.0) || !x.allFinite() || !y.allFinite()) return cplx(std::numeric_limits<double>::infinity());
    return dir * y.dot(an.problem.b * x) / yx;
  }
};

double min_separation(const VectorC& v, Index r) {
  double s = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < v.size(); ++k)
    if (k != r) s = std::min(s, std::abs(v(k) - v(r)));
  return s;
}

}  // namespace

SpectralCurveSet trace_ray(const ProblemAnalysis& an, const RaySpec& ray) {
  if (!ray.force) {
    if (!an.hypotheses_hold()) fail(ErrorKind::HypothesisViolated, "trace_ray: hypotheses H1-H5 do not all hold");
    if (!coupling_sector(an.sector).contains(std::polar(1.0, ray.theta))) {
      fail(ErrorKind::OutOfSector, "trace_ray: theta lies outside the coupling sector");
    }
  }
  if (!(ray.t_max > 0.0)) fail(ErrorKind::InvalidArgument, "trace_ray: t_max must be positive");

  const Index n = an.problem.dimension();
  Tracer tr{an, ray, std::polar(1.0, ray.theta), n};
  SpectralCurveSet out;
  out.theta = ray.theta;
  out.t_max = ray.t_max;
  out.curves.resize(static_cast<size_t>(n));
  for (Index r = 0; r < n; ++r) {
    SpectralCurve& c = out.curves[static_cast<size_t>(r)];
    c.start_index = r;
    c.t.push_back(0.0);
    c.lambda.push_back(an.alpha(r));
  }
  if (n == 0) {
    out.complete = true;
    return out;
  }
  if (an.norm_b == 0.0) {
    for (SpectralCurve& c : out.curves) {
      c.t.push_back(ray.t_max);
      c.lambda.push_back(c.lambda.front());
    }
    out.complete = true;
    return out;
  }

  const double t0 = ray.t0 > 0.0 ? ray.t0 : 1e-6 * (an.norm_a > 0.0 ? an.norm_a : 1.0) / an.norm_b;
  VectorC lam(n);
  {
    const MatrixC m0 = tr.matrix(t0);
    for (Index r = 0; r < n; ++r) {
      const VectorC u = an.alpha_vectors.col(r);
      lam(r) = an.alpha(r) + (t0 * tr.dir) * u.dot(an.problem.b * u);
      int iters = 0;
      tr.newton(m0, lam(r), ray.newton_tol * tr.scale(t0), 20, iters);
    }
  }
  auto record = [&](double t, const VectorC& values) {
    for (Index r = 0; r < n; ++r) {
      out.curves[static_cast<size_t>(r)].t.push_back(t);
      out.curves[static_cast<size_t>(r)].lambda.push_back(values(r));
    }
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        const double d = std::abs(values(i) - values(j));
        if (d < out.nearest.distance) out.nearest = {d, t, i, j, 0.5 * (values(i) + values(j))};
      }
    }
  };
  auto audit = [&](double t, const VectorC& values) {
    const VectorC oracle = general_eig(tr.matrix(t)).eigenvalues;
    const double err = multiset_distance(values, oracle) / tr.scale(t);
    out.max_audit_error = std::max(out.max_audit_error, err);
    ++out.audits;
  };
  record(t0, lam);

  double t = t0;
  double dt = t0;
  int since_audit = 0;
  VectorC deriv(n), pred(n), corr(n);
  while (t < ray.t_max) {
    if (++out.steps > ray.max_steps) fail(ErrorKind::MaxStepsExceeded, "trace_ray: step limit reached before t_max");
    const MatrixC m = tr.matrix(t);
    const double sc = tr.scale(t);
    VectorR sep(n);
    double cap = std::numeric_limits<double>::infinity();
    for (Index r = 0; r < n; ++r) {
      deriv(r) = tr.derivative(m, lam(r), sc);
      sep(r) = min_separation(lam, r);
      const double speed = std::abs(deriv(r));
      if (speed > 0.0 && std::isfinite(sep(r))) cap = std::min(cap, 0.2 * sep(r) / speed);
    }
    if (!std::isfinite(deriv.norm())) {
      out.collision = true;
      break;
    }
    dt = std::min({dt, cap, ray.t_max - t});
    if (ray.max_step > 0.0) dt = std::min(dt, ray.max_step);

    bool accepted = false;
    int worst_iters = 0;
    for (int halvings = 0; halvings < 60; ++halvings) {
      const double tn = t + dt;
      const MatrixC mn = tr.matrix(tn);
      const double tol = ray.newton_tol * tr.scale(tn);
      bool ok = true;
      worst_iters = 0;
      for (Index r = 0; r < n && ok; ++r) {
        pred(r) = lam(r) + deriv(r) * dt;
        corr(r) = pred(r);
        int iters = 0;
        ok = tr.newton(mn, corr(r), tol, 12, iters);
        worst_iters = std::max(worst_iters, iters);
        if (ok && std::isfinite(sep(r)) && std::abs(corr(r) - pred(r)) > 0.25 * sep(r)) ok = false;
      }
      for (Index i = 0; i < n && ok; ++i)
        for (Index j = i + 1; j < n && ok; ++j)
          if (std::abs(corr(i) - corr(j)) <= 0.25 * std::min(sep(i), sep(j))) ok = false;
      if (ok) {
        t = tn;
        accepted = true;
        break;
      }
      dt *= 0.5;
      if (dt <= 1e-15 * std::max(t, t0)) break;
    }
    if (!accepted) {
      out.collision = true;
      break;
    }
    lam = corr;
    record(t, lam);
    if (out.nearest.distance <= 1e-9 * tr.scale(t)) {
      out.collision = true;
      break;
    }
    if (++since_audit >= ray.audit_every) {
      audit(t, lam);
      since_audit = 0;
    }
    dt *= worst_iters <= 3 ? 2.0 : 1.5;
  }
  if (!out.collision) {
    out.complete = true;
    if (since_audit > 0 || out.audits == 0) audit(t, lam);
  }
  return out;
}

double classification_t_max(const ProblemAnalysis& an) {
  const double nb = an.norm_b > 0.0 ? an.norm_b : 1.0;
  return 1e3 * std::max(an.norm_a, 1.0) * std::max(1.0, 1.0 / nb);
}

namespace {

struct Match {
  Index index = -1;
  double residual = 0.0;
  double runner_up = std::numeric_limits<double>::infinity();
};

template <typename Targets>
Match nearest(cplx value, const Targets& targets) {
  Match m;
  m.residual = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < targets.size(); ++k) {
    const double d = std::abs(value - cplx(targets(k)));
    if (d < m.residual) {
      m.runner_up = m.residual;
      m.residual = d;
      m.index = k;
    } else if (d < m.runner_up) {
      m.runner_up = d;
    }
  }
  return m;
}

}  // namespace

SpectralCurveSet classify_endpoints(SpectralCurveSet cs, const ProblemAnalysis& an, const ClassifyOptions& opt) {
  if (!cs.complete) fail(ErrorKind::InvalidArgument, "classify_endpoints: trace did not reach t_max");
  const Index n = an.problem.dimension();
  const Index m_rank = an.rank();
  const double t_end = cs.last_t();
  if (t_end < opt.min_t_factor * std::max(an.norm_a, 1.0)) {
    fail(ErrorKind::InvalidArgument, "classify_endpoints: t_max too small for asymptotic classification");
  }
  const cplx gamma = std::polar(t_end, cs.theta);
  double min_beta = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < m_rank; ++k) min_beta = std::min(min_beta, std::abs(an.beta(k)));

  std::vector<bool> used_beta(static_cast<size_t>(m_rank), false), used_delta(static_cast<size_t>(an.delta.size()), false);
  Index divergent = 0;
  cs.permutation.assign(static_cast<size_t>(n), -1);
  for (SpectralCurve& c : cs.curves) {
    const cplx end = c.lambda.back();
    const bool div = m_rank > 0 && std::abs(end) > opt.divergence_factor * t_end * min_beta;
    Match match;
    if (div) {
      c.end_class = EndClass::Divergent;
      c.end_value = end / gamma;
      match = nearest(c.end_value, an.beta);
      ++divergent;
    } else {
      c.end_class = EndClass::Convergent;
      c.end_value = end;
      match = nearest(c.end_value, an.delta);
    }
    if (match.index < 0) fail(ErrorKind::AmbiguousMatch, "classify_endpoints: no endpoint target available");
    if (!(match.runner_up > opt.gap_factor * match.residual)) {
      fail(ErrorKind::AmbiguousMatch, "classify_endpoints: endpoint match is not separated; raise t_max");
    }
    std::vector<bool>& used = div ? used_beta : used_delta;
    if (used[static_cast<size_t>(match.index)]) {
      fail(ErrorKind::AmbiguousMatch, "classify_endpoints: two curves matched the same endpoint");
    }
    used[static_cast<size_t>(match.index)] = true;
    c.end_index = match.index;
    cs.permutation[static_cast<size_t>(c.start_index)] = div ? (n - m_rank) + match.index : match.index;
  }
  if (divergent != m_rank) fail(ErrorKind::AmbiguousMatch, "classify_endpoints: divergent curve count differs from rank(B)");
  return cs;
}

SpectralCurveSet monodromy_at(const ProblemAnalysis& an, double theta, bool force) {
  RaySpec ray;
  ray.theta = theta;
  ray.force = force;
  ray.t_max = classification_t_max(an);
  SpectralCurveSet cs = trace_ray(an, ray);
  if (cs.collision) return cs;
  return classify_endpoints(std::move(cs), an);
}

namespace {

// Value, first and second derivative of a polynomial at z.
void horner2(const VectorC& c, cplx z, cplx& p, cplx& dp, cplx& ddp) {
  p = dp = ddp = 0.0;
  for (Index k = c.size() - 1; k >= 0; --k) {
    ddp = ddp * z + 2.0 * dp;
    dp = dp * z + p;
    p = p * z + c(k);
  }
}

}  // namespace

cplx BivariatePolynomial::eval(cplx gamma, cplx lambda) const {
  cplx acc = 0.0;
  for (size_t k = q.size(); k-- > 0;) acc = acc * gamma + poly_eval(q[k], lambda);
  return acc;
}

cplx BivariatePolynomial::d_gamma(cplx gamma, cplx lambda) const {
  cplx acc = 0.0;
  for (size_t k = q.size(); k-- > 1;) acc = acc * gamma + double(k) * poly_eval(q[k], lambda);
  return acc;
}

cplx BivariatePolynomial::d_lambda(cplx gamma, cplx lambda) const {
  cplx acc = 0.0;
  for (size_t k = q.size(); k-- > 0;) {
    cplx p, dp, ddp;
    horner2(q[k], lambda, p, dp, ddp);
    acc = acc * gamma + dp;
  }
  return acc;
}

cplx BivariatePolynomial::d_lambda2(cplx gamma, cplx lambda) const {
  cplx acc = 0.0;
  for (size_t k = q.size(); k-- > 0;) {
    cplx p, dp, ddp;
    horner2(q[k], lambda, p, dp, ddp);
    acc = acc * gamma + ddp;
  }
  return acc;
}

cplx BivariatePolynomial::d_gamma_lambda(cplx gamma, cplx lambda) const {
  cplx acc = 0.0;
  for (size_t k = q.size(); k-- > 1;) {
    cplx p, dp, ddp;
    horner2(q[k], lambda, p, dp, ddp);
    acc = acc * gamma + double(k) * dp;
  }
  return acc;
}

BivariatePolynomial characteristic_bivariate(const ProblemAnalysis& an) {
  const Index n = an.problem.dimension();
  const Index m_rank = an.rank();
  BivariatePolynomial bp;
  const MatrixC a = (an.problem.a + an.problem.a.adjoint()) * 0.5;
  if (m_rank == 1) {
    const VectorC w = an.sector.range_basis.col(0);
    const SecularPair sp = secular_pair(a, w);
    VectorC q1 = VectorC::Zero(n + 1);
    q1.head(sp.p1.size()) = an.beta(0) * sp.p1;
    bp.q = {sp.p0, q1};
    return bp;
  }
  // Interpolate the degree-M dependence on gamma from M + 1 samples on a circle.
  const double rho = std::max(1.0, an.norm_a / std::max(an.norm_b, 1e-300));
  const Index samples = m_rank + 1;
  std::vector<VectorC> values;
  for (Index j = 0; j < samples; ++j) {
    const cplx g = std::polar(rho, 2.0 * std::numbers::pi * double(j) / double(samples));
    values.push_back(char_poly<double>(MatrixC(a + g * an.problem.b)));
  }
  for (Index k = 0; k < samples; ++k) {
    VectorC qk = VectorC::Zero(n + 1);
    for (Index j = 0; j < samples; ++j) {
      qk += values[static_cast<size_t>(j)] * std::polar(1.0, -2.0 * std::numbers::pi * double(j * k) / double(samples));
    }
    bp.q.push_back(qk / (double(samples) * std::pow(rho, double(k))));
  }
  return bp;
}

CriticalPoint locate_critical_point(const BivariatePolynomial& p, cplx gamma0, cplx lambda0, int max_iter) {
  CriticalPoint cp{gamma0, lambda0, 0.0, false};
  double coef = 0.0;
  for (const VectorC& qk : p.q) coef = std::max(coef, qk.cwiseAbs().maxCoeff());
  for (int it = 0; it < max_iter; ++it) {
    const cplx f1 = p.eval(cp.gamma, cp.lambda);
    const cplx f2 = p.d_lambda(cp.gamma, cp.lambda);
    const cplx j11 = p.d_gamma(cp.gamma, cp.lambda), j12 = f2;
    const cplx j21 = p.d_gamma_lambda(cp.gamma, cp.lambda), j22 = p.d_lambda2(cp.gamma, cp.lambda);
    const cplx det = j11 * j22 - j12 * j21;
    if (det == cplx(0.0)) break;
    const cplx dg = (f1 * j22 - j12 * f2) / det;
    const cplx dl = (j11 * f2 - j21 * f1) / det;
    cp.gamma -= dg;
    cp.lambda -= dl;
    if (std::abs(dg) + std::abs(dl) <= 1e-14 * (1.0 + std::abs(cp.gamma) + std::abs(cp.lambda))) {
      cp.converged = true;
      break;
    }
  }
  cp.residual = std::max(std::abs(p.eval(cp.gamma, cp.lambda)), std::abs(p.d_lambda(cp.gamma, cp.lambda))) /
                std::max(coef, 1e-300);
  if (!std::isfinite(cp.residual)) cp.converged = false;
  return cp;
}

namespace {

// tau at theta, or empty when the trace or classification cannot decide it.
std::vector<Index> permutation_at(const ProblemAnalysis& an, double theta, bool force,
                                  SpectralCurveSet* keep = nullptr) {
  try {
    SpectralCurveSet cs = monodromy_at(an, theta, force);
    if (cs.collision) return {};
    if (keep) *keep = cs;
    return cs.permutation;
  } catch (const Error& err) {
    if (err.kind() == ErrorKind::AmbiguousMatch || err.kind() == ErrorKind::MaxStepsExceeded) return {};
    throw;
  }
}

}  // namespace

ExceptionalAngles find_exceptional_angles(const ProblemAnalysis& an, double theta_lo, double theta_hi,
                                          double resolution, const ExceptionalOptions& opt) {
  ExceptionalAngles out;
  const int pieces = std::max(2, opt.grid_points);
  for (int k = 1; k < pieces; ++k) out.grid.push_back(theta_lo + (theta_hi - theta_lo) * double(k) / double(pieces));
  out.grid_permutations.resize(out.grid.size());
  parallel_for(out.grid.size(), opt.threads,
               [&](std::size_t i) { out.grid_permutations[i] = permutation_at(an, out.grid[i], opt.force); });

  std::optional<BivariatePolynomial> bivariate;
  if (an.problem.dimension() <= kCharPolyMaxDimension && an.rank() > 0) bivariate = characteristic_bivariate(an);

  // Grid points where the permutation is undefined (collisions) are skipped.
  std::vector<size_t> valid;
  for (size_t i = 0; i < out.grid.size(); ++i)
    if (!out.grid_permutations[i].empty()) valid.push_back(i);
  for (size_t v = 0; v + 1 < valid.size(); ++v) {
    const size_t i = valid[v], j = valid[v + 1];
    const std::vector<Index>& left = out.grid_permutations[i];
    const std::vector<Index>& right = out.grid_permutations[j];
    if (left == right) continue;
    ExceptionalBracket br{out.grid[i], out.grid[j], left, right, std::nullopt};
    while (br.theta_hi - br.theta_lo > resolution) {
      std::vector<Index> mid_perm;
      double mid = 0.0;
      for (double frac : {0.5, 0.45, 0.55, 0.4, 0.6}) {
        mid = br.theta_lo + frac * (br.theta_hi - br.theta_lo);
        mid_perm = permutation_at(an, mid, opt.force);
        if (!mid_perm.empty()) break;
      }
      if (mid_perm.empty()) break;
      if (mid_perm == br.tau_lo) {
        br.theta_lo = mid;
      } else {
        br.theta_hi = mid;
        br.tau_hi = mid_perm;
      }
    }
    if (bivariate) {
      RaySpec ray;
      ray.theta = 0.5 * (br.theta_lo + br.theta_hi);
      ray.t_max = classification_t_max(an);
      ray.force = true;
      const SpectralCurveSet cs = trace_ray(an, ray);
      const cplx g0 = std::polar(cs.nearest.t, ray.theta);
      CriticalPoint cp = locate_critical_point(*bivariate, g0, cs.nearest.midpoint);
      br.critical = cp;
    }
    out.brackets.push_back(std::move(br));
  }
  return out;
}

bool homotopy_invariance_check(const ProblemAnalysis& an, double theta_a, double theta_b, const ExceptionalAngles&) {
  if (theta_a == theta_b) return true;
  const std::vector<Index> ta = permutation_at(an, theta_a, false);
  const std::vector<Index> tb = permutation_at(an, theta_b, false);
  return !ta.empty() && ta == tb;
}

MatrixR real_coupling_sweep(const Problem& problem, const VectorR& t_values) {
  if (hermitian_residual(problem.b) > 1e-12) fail(ErrorKind::NotHermitian, "real_coupling_sweep: B is not Hermitian");
  const Index n = problem.dimension();
  MatrixR out(t_values.size(), n);
  for (Index k = 0; k < t_values.size(); ++k) {
    const MatrixC m = problem.a + t_values(k) * problem.b;
    out.row(k) = hermitian_eigenvalues<double>(MatrixC((m + m.adjoint()) * 0.5)).transpose();
  }
  return out;
}

}  // namespace perturbatrix
