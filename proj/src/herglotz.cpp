#include "perturbatrix/herglotz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "perturbatrix/sectorial.hpp"

namespace perturbatrix {

MatrixC SpectralMeasure::total_mass() const {
  MatrixC m = MatrixC::Zero(dimension, dimension);
  for (const SpectralAtom& at : atoms) m += at.weight;
  return m;
}

MatrixC SpectralMeasure::mass(double a, double b) const {
  MatrixC m = MatrixC::Zero(dimension, dimension);
  for (const SpectralAtom& at : atoms)
    if (at.location >= a && at.location <= b) m += at.weight;
  return m;
}

MatrixC SpectralMeasure::first_moment(double a, double b) const {
  MatrixC m = MatrixC::Zero(dimension, dimension);
  for (const SpectralAtom& at : atoms)
    if (at.location >= a && at.location <= b) m += at.location * at.weight;
  return m;
}

double SpectralMeasure::scale() const {
  double s = 0.0;
  for (const SpectralAtom& at : atoms) s = std::max(s, std::abs(at.location));
  if (!atoms.empty()) s = std::max(s, atoms.back().location - atoms.front().location);
  return s > 0.0 ? s : 1.0;
}

namespace {

// Groups ascending values into runs whose consecutive gaps are <= tol * spread.
std::vector<std::pair<Index, Index>> coalesce(const VectorR& sorted, double tol) {
  std::vector<std::pair<Index, Index>> groups;
  const Index n = sorted.size();
  if (n == 0) return groups;
  const double spread = sorted(n - 1) - sorted(0);
  Index start = 0;
  for (Index k = 1; k <= n; ++k) {
    if (k == n || sorted(k) - sorted(k - 1) > tol * spread) {
      groups.emplace_back(start, k);
      start = k;
    }
  }
  return groups;
}

double mean_of(const VectorR& v, Index lo, Index hi) { return v.segment(lo, hi - lo).mean(); }

}  // namespace

SpectralMeasure build_measure(const HermitianEigenSystem<double>& a_eig, const MatrixC& b, double coalesce_tol) {
  const Index n = a_eig.eigenvalues.size();
  require_square(b, "build_measure");
  if (b.rows() != n) fail(ErrorKind::DimensionMismatch, "build_measure: A and B sizes differ");
  const double nb = operator_norm(b);
  if (hermitian_residual(b) > 1e-12) fail(ErrorKind::NotPSD, "build_measure: B is not Hermitian");
  const HermitianEigenSystem<double> be = hermitian_eig(b);
  if (n > 0 && be.eigenvalues(0) < -1e-12 * nb) fail(ErrorKind::NotPSD, "build_measure: B has a negative eigenvalue");

  const VectorR root = be.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  const MatrixC b_half = be.eigenvectors * root.cast<cplx>().asDiagonal() * be.eigenvectors.adjoint();
  const MatrixC w = range_basis<double>(b, 1e-12);
  const MatrixC c = b_half * w;  // B^{1/2} restricted to Ran(B)

  SpectralMeasure mu;
  mu.dimension = w.cols();
  for (const auto& [lo, hi] : coalesce(a_eig.eigenvalues, coalesce_tol)) {
    const MatrixC u = a_eig.eigenvectors.middleCols(lo, hi - lo);
    const MatrixC proj = u.adjoint() * c;
    MatrixC q = proj.adjoint() * proj;
    mu.atoms.push_back({mean_of(a_eig.eigenvalues, lo, hi), (q + q.adjoint()) * 0.5});
  }
  return mu;
}

SpectralMeasure scalar_measure(const VectorR& locations, const VectorR& weights, double coalesce_tol) {
  if (locations.size() != weights.size()) fail(ErrorKind::DimensionMismatch, "scalar_measure: sizes differ");
  if ((weights.array() < 0.0).any()) fail(ErrorKind::NotPSD, "scalar_measure: negative weight");
  std::vector<Index> order(static_cast<size_t>(locations.size()));
  for (Index k = 0; k < locations.size(); ++k) order[static_cast<size_t>(k)] = k;
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return locations(i) < locations(j); });
  VectorR s(locations.size()), w(locations.size());
  for (Index k = 0; k < locations.size(); ++k) {
    s(k) = locations(order[static_cast<size_t>(k)]);
    w(k) = weights(order[static_cast<size_t>(k)]);
  }
  SpectralMeasure mu;
  mu.dimension = 1;
  for (const auto& [lo, hi] : coalesce(s, coalesce_tol)) {
    mu.atoms.push_back({mean_of(s, lo, hi), MatrixC::Constant(1, 1, cplx(w.segment(lo, hi - lo).sum()))});
  }
  return mu;
}

SpectralMeasure rank_one_measure(const MatrixC& a, const VectorC& e) {
  if (e.size() != a.rows()) fail(ErrorKind::DimensionMismatch, "rank_one_measure: vector length differs");
  const HermitianEigenSystem<double> es = hermitian_eig(a);
  const VectorR w = (es.eigenvectors.adjoint() * e).cwiseAbs2();
  return scalar_measure(es.eigenvalues, w);
}

namespace {

void check_pole(const SpectralMeasure& mu, cplx lambda, double pole_tol) {
  const double tol = pole_tol * mu.scale();
  for (const SpectralAtom& at : mu.atoms) {
    if (std::abs(lambda - at.location) <= tol) {
      fail(ErrorKind::PoleProximity, "eval_m: lambda coincides with an atom location");
    }
  }
}

}  // namespace

MatrixC eval_m(const SpectralMeasure& mu, cplx lambda, double pole_tol) {
  check_pole(mu, lambda, pole_tol);
  MatrixC m = MatrixC::Zero(mu.dimension, mu.dimension);
  for (const SpectralAtom& at : mu.atoms) m += at.weight / (at.location - lambda);
  return m;
}

cplx eval_m_scalar(const SpectralMeasure& mu, cplx lambda, double pole_tol) {
  if (mu.dimension != 1) fail(ErrorKind::InvalidArgument, "eval_m_scalar: measure is not scalar");
  check_pole(mu, lambda, pole_tol);
  cplx m = 0.0;
  for (const SpectralAtom& at : mu.atoms) m += at.weight(0, 0) / (at.location - lambda);
  return m;
}

MatrixC eval_m_derivative(const SpectralMeasure& mu, cplx lambda, double pole_tol) {
  check_pole(mu, lambda, pole_tol);
  MatrixC m = MatrixC::Zero(mu.dimension, mu.dimension);
  for (const SpectralAtom& at : mu.atoms) {
    const cplx d = at.location - lambda;
    m += at.weight / (d * d);
  }
  return m;
}

cplx SecularPair::eval(cplx gamma, cplx lambda) const { return poly_eval(p0, lambda) + gamma * poly_eval(p1, lambda); }

cplx SecularPair::d_lambda(cplx gamma, cplx lambda) const {
  return poly_eval<double>(poly_derivative<double>(p0), lambda) + gamma * poly_eval<double>(poly_derivative<double>(p1), lambda);
}

VectorC SecularPair::coefficients(cplx gamma) const {
  VectorC c = p0;
  c.head(p1.size()) += gamma * p1;
  return c;
}

VectorC SecularPair::roots(cplx gamma) const { return poly_roots(coefficients(gamma)); }

MatrixC truncate_complement(const MatrixC& a, const VectorC& e) {
  const Index n = a.rows();
  const Reflector<double> h = make_reflector<double>(e);
  MatrixC t = a;
  if (!h.trivial()) {
    h.apply_left(t.leftCols(n));
    h.apply_right(t.topRows(n));
  }
  return t.bottomRightCorner(n - 1, n - 1);
}

namespace {

// det(A - lambda I) = prod (ev_r - lambda), multiplied pairwise for balanced rounding.
VectorC product_tree(const VectorR& ev) {
  std::vector<VectorC> level;
  for (Index k = 0; k < ev.size(); ++k) {
    VectorC lin(2);
    lin << cplx(ev(k)), cplx(-1.0);
    level.push_back(lin);
  }
  if (level.empty()) return VectorC::Ones(1);
  while (level.size() > 1) {
    std::vector<VectorC> next;
    for (size_t k = 0; k + 1 < level.size(); k += 2) next.push_back(poly_mul<double>(level[k], level[k + 1]));
    if (level.size() % 2 == 1) next.push_back(level.back());
    level = std::move(next);
  }
  return level.front();
}

VectorC characteristic(const MatrixC& a, const VectorR& ev) {
  if (a.rows() == 0) return VectorC::Ones(1);
  if (a.rows() <= kSecularFaddeevLimit) {
    VectorC c = char_poly<double>(a);
    return VectorC(c.real().cast<cplx>());
  }
  return product_tree(ev);
}

}  // namespace

SecularPair secular_pair(const MatrixC& a, const VectorC& e) {
  require_square(a, "secular_pair");
  if (e.size() != a.rows()) fail(ErrorKind::DimensionMismatch, "secular_pair: vector length differs");
  if (hermitian_residual(a) > 1e-12) fail(ErrorKind::NotHermitian, "secular_pair: A is not Hermitian");
  if (std::abs(e.norm() - 1.0) > 1e-10) fail(ErrorKind::NotUnitVector, "secular_pair: e must have unit norm");
  const MatrixC sym = (a + a.adjoint()) * 0.5;
  const MatrixC trunc = truncate_complement(sym, e);
  SecularPair sp;
  sp.alpha = hermitian_eigenvalues<double>(sym);
  sp.delta = trunc.rows() > 0 ? hermitian_eigenvalues<double>(MatrixC((trunc + trunc.adjoint()) * 0.5)) : VectorR();
  sp.p0 = characteristic(sym, sp.alpha);
  sp.p1 = characteristic(trunc, sp.delta);
  return sp;
}

cplx relative_determinant(const MatrixC& a, const MatrixC& b, cplx gamma, cplx lambda) {
  require_square(a, "relative_determinant");
  if (a.rows() != b.rows() || b.rows() != b.cols()) fail(ErrorKind::DimensionMismatch, "relative_determinant: sizes differ");
  const Index n = a.rows();
  const VectorC spec = general_eig(a).eigenvalues;
  const double scale = std::max(1.0, operator_norm(a));
  for (Index k = 0; k < n; ++k) {
    if (std::abs(spec(k) - lambda) <= 1e-14 * scale) {
      fail(ErrorKind::SpectrumCollision, "relative_determinant: lambda is an eigenvalue of A");
    }
  }
  const MatrixC w = range_basis<double>(b.adjoint(), 1e-12);
  const Index m = w.cols();
  if (m == 0) return cplx(1.0);
  const MatrixC shifted = a - lambda * MatrixC::Identity(n, n);
  const MatrixC r = Eigen::PartialPivLU<MatrixC>(shifted).solve(b * w);
  const MatrixC t = MatrixC::Identity(m, m) + gamma * (w.adjoint() * r);
  return t.determinant();
}

cplx gamma_of_lambda(const SpectralMeasure& mu, cplx lambda) {
  const cplx m = eval_m_scalar(mu, lambda);
  if (m == cplx(0.0)) fail(ErrorKind::ZeroDenominator, "gamma_of_lambda: m(lambda) vanishes");
  return -1.0 / m;
}

cplx lambda_derivative(const SpectralMeasure& mu, cplx lambda) {
  const cplx m = eval_m_scalar(mu, lambda);
  const cplx dm = eval_m_derivative(mu, lambda)(0, 0);
  if (dm == cplx(0.0)) fail(ErrorKind::ZeroDenominator, "lambda_derivative: m'(lambda) vanishes");
  return m * m / dm;
}

VectorC couplings_for_eigenvalue(const SpectralMeasure& mu, cplx lambda) {
  const MatrixC m = eval_m(mu, lambda);
  const VectorC ev = general_eig(m).eigenvalues;
  const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  std::vector<cplx> out;
  for (Index k = 0; k < ev.size(); ++k)
    if (std::abs(ev(k)) > 1e-12 * scale) out.push_back(-1.0 / ev(k));
  VectorC res(static_cast<Index>(out.size()));
  for (Index k = 0; k < res.size(); ++k) res(k) = out[static_cast<size_t>(k)];
  return res;
}

}  // namespace perturbatrix

namespace perturbatrix {

VectorC secular_eigenvalues(const SpectralMeasure& mu, cplx gamma, int max_iter) {
  if (!mu.is_scalar()) fail(ErrorKind::InvalidArgument, "secular_eigenvalues: scalar measure required");
  double total = 0.0;
  for (const SpectralAtom& at : mu.atoms) total += at.weight(0, 0).real();
  // Atoms without weight are eigenvalues as they stand.
  std::vector<double> sv, wv, fixed;
  for (const SpectralAtom& at : mu.atoms) {
    const double wt = at.weight(0, 0).real();
    if (wt > 1e-15 * total) {
      sv.push_back(at.location);
      wv.push_back(wt);
    } else {
      fixed.push_back(at.location);
    }
  }
  const Index n = static_cast<Index>(sv.size());
  const VectorR s = Eigen::Map<const VectorR>(sv.data(), n);
  const VectorR w = Eigen::Map<const VectorR>(wv.data(), n);
  VectorC z(n);
  if (n == 0) return Eigen::Map<const VectorR>(fixed.data(), static_cast<Index>(fixed.size())).cast<cplx>();
  const double scale = std::max({s.cwiseAbs().maxCoeff(), std::abs(gamma) * w.sum(), 1e-300});
  const double spacing = n > 1 ? (s(n - 1) - s(0)) / double(n) : 1.0;
  for (Index k = 0; k < n; ++k) {
    // first-order guess, nudged off the real axis so no two starts coincide
    z(k) = s(k) + gamma * w(k) + cplx(0.0, 1e-3 * (spacing + 1e-3 * scale)) * std::polar(1.0, 0.7 * double(k));
  }
  z(n - 1) += gamma * (w.sum() - w(n - 1));  // the branch that follows gamma

  auto log_derivative = [&](cplx x) {
    cplx m(0.0), dm(0.0), poles(0.0);
    for (Index j = 0; j < n; ++j) {
      const cplx d = s(j) - x;
      m += w(j) / d;
      dm += w(j) / (d * d);
      poles -= 1.0 / d;
    }
    return poles + gamma * dm / (1.0 + gamma * m);
  };

  std::vector<bool> done(static_cast<size_t>(n), false);
  const double tol = 1e-14 * scale;
  for (int it = 0; it < max_iter; ++it) {
    bool all = true;
    for (Index k = 0; k < n; ++k) {
      if (done[static_cast<size_t>(k)]) continue;
      const cplx ld = log_derivative(z(k));
      cplx repel(0.0);
      for (Index j = 0; j < n; ++j)
        if (j != k) repel += 1.0 / (z(k) - z(j));
      const cplx newton = 1.0 / ld;
      const cplx step = newton / (1.0 - newton * repel);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
        z(k) += cplx(tol, tol) * 16.0;
        all = false;
        continue;
      }
      z(k) -= step;
      if (std::abs(step) <= tol) done[static_cast<size_t>(k)] = true; else all = false;
    }
    if (all) break;
    if (it + 1 == max_iter) fail(ErrorKind::NoConvergence, "secular_eigenvalues: Aberth iteration did not converge");
  }
  // Trace identity as a consistency check.
  const cplx trace = z.sum(), expected = s.sum() + gamma * w.sum();
  if (std::abs(trace - expected) > 1e-8 * scale * double(n)) {
    fail(ErrorKind::NoConvergence, "secular_eigenvalues: trace identity violated");
  }
  VectorC out(n + static_cast<Index>(fixed.size()));
  out.head(n) = z;
  for (size_t k = 0; k < fixed.size(); ++k) out(n + static_cast<Index>(k)) = fixed[k];
  return out;
}

}  // namespace perturbatrix
