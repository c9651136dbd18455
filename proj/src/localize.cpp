#include "perturbatrix/localize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace perturbatrix {

namespace {

MatrixC psd_sqrt(const MatrixC& x, double rel_tol, MatrixC* pinv_sqrt = nullptr, MatrixC* kernel_proj = nullptr) {
  const HermitianEigenSystem<double> es = hermitian_eig<double>((x + x.adjoint()) * 0.5);
  const Index n = x.rows();
  const double top = n > 0 ? std::max(es.eigenvalues.cwiseAbs().maxCoeff(), 0.0) : 0.0;
  VectorC root(n), inv(n), ker(n);
  for (Index k = 0; k < n; ++k) {
    const double v = es.eigenvalues(k);
    const bool kept = v > rel_tol * top && v > 0.0;
    root(k) = kept ? std::sqrt(v) : 0.0;
    inv(k) = kept ? 1.0 / std::sqrt(v) : 0.0;
    ker(k) = kept ? 0.0 : 1.0;
  }
  const MatrixC& u = es.eigenvectors;
  if (pinv_sqrt) *pinv_sqrt = u * inv.asDiagonal() * u.adjoint();
  if (kernel_proj) *kernel_proj = u * ker.asDiagonal() * u.adjoint();
  return u * root.asDiagonal() * u.adjoint();
}

}  // namespace

CompressedHerglotz compress(const SpectralMeasure& mu, double a, double b, double pinv_tol) {
  if (!(a <= b)) fail(ErrorKind::InvalidArgument, "compress: interval must satisfy a <= b");
  CompressedHerglotz c;
  c.a = a;
  c.b = b;
  c.dimension = mu.dimension;
  bool any = false;
  for (const SpectralAtom& at : mu.atoms) {
    if (at.location >= a && at.location <= b) {
      any = true;
    } else {
      c.kept_atoms.push_back(at);
    }
  }
  if (!any) fail(ErrorKind::EmptyInterval, "compress: no atom lies in [a, b]");
  c.X = mu.mass(a, b);
  const MatrixC z = mu.first_moment(a, b);
  MatrixC pinv, ker;
  c.X_half = psd_sqrt(c.X, pinv_tol, &pinv, &ker);
  MatrixC y = pinv * z * pinv + (0.5 * (a + b)) * ker;
  c.Y = (y + y.adjoint()) * 0.5;
  return c;
}

MatrixC CompressedHerglotz::eval(cplx lambda) const {
  MatrixC m = MatrixC::Zero(dimension, dimension);
  for (const SpectralAtom& at : kept_atoms) m += at.weight / (at.location - lambda);
  const MatrixC shifted = Y - lambda * MatrixC::Identity(dimension, dimension);
  m += X_half * Eigen::PartialPivLU<MatrixC>(shifted).solve(X_half);
  return m;
}

cplx CompressedHerglotz::eval_scalar(cplx lambda) const {
  if (dimension != 1) fail(ErrorKind::InvalidArgument, "CompressedHerglotz::eval_scalar: not scalar");
  return eval(lambda)(0, 0);
}

SpectralMeasure CompressedHerglotz::as_measure() const {
  SpectralMeasure mu;
  mu.dimension = dimension;
  mu.atoms = kept_atoms;
  const HermitianEigenSystem<double> es = hermitian_eig(Y);
  for (Index k = 0; k < es.eigenvalues.size(); ++k) {
    const VectorC v = X_half * es.eigenvectors.col(k);
    const MatrixC w = v * v.adjoint();
    if (w.norm() == 0.0) continue;
    mu.atoms.push_back({es.eigenvalues(k), w});
  }
  std::stable_sort(mu.atoms.begin(), mu.atoms.end(),
                   [](const SpectralAtom& x, const SpectralAtom& y) { return x.location < y.location; });
  return mu;
}

double compression_error_bound(double width, double mass_norm, double L) {
  if (!(L > 0.0)) fail(ErrorKind::InvalidArgument, "compression_error_bound: L must be positive");
  return 2.0 * width * width * mass_norm / (L * L * L);
}

double compression_error_bound(const CompressedHerglotz& comp, double L) {
  return compression_error_bound(comp.b - comp.a, operator_norm(comp.X), L);
}

double q_interval_bound(const SpectralMeasure& mu, double f_sup, double a, double b) {
  return std::abs(f_sup) * operator_norm(mu.mass(a, b));
}

Region Region::disc(cplx center, double radius) {
  if (!(radius > 0.0)) fail(ErrorKind::InvalidArgument, "Region::disc: radius must be positive");
  Region r;
  r.kind = Kind::Disc;
  r.center = center;
  r.radius = radius;
  return r;
}

Region Region::rectangle(double x0, double x1, double y0, double y1) {
  if (!(x0 < x1 && y0 < y1)) fail(ErrorKind::InvalidArgument, "Region::rectangle: empty rectangle");
  Region r;
  r.kind = Kind::Rectangle;
  r.x0 = x0;
  r.x1 = x1;
  r.y0 = y0;
  r.y1 = y1;
  r.center = cplx(0.5 * (x0 + x1), 0.5 * (y0 + y1));
  return r;
}

double Region::signed_distance(cplx z) const {
  if (kind == Kind::Disc) return std::abs(z - center) - radius;
  const double dx = std::max(x0 - z.real(), z.real() - x1);
  const double dy = std::max(y0 - z.imag(), z.imag() - y1);
  if (dx <= 0.0 && dy <= 0.0) return std::max(dx, dy);
  return std::hypot(std::max(dx, 0.0), std::max(dy, 0.0));
}

cplx Region::boundary_point(double s) const {
  if (kind == Kind::Disc) return center + std::polar(radius, 2.0 * std::numbers::pi * s);
  const double w = x1 - x0, h = y1 - y0, per = 2.0 * (w + h);
  double d = s * per;
  if (d < w) return {x0 + d, y0};
  d -= w;
  if (d < h) return {x1, y0 + d};
  d -= h;
  if (d < w) return {x1 - d, y1};
  d -= w;
  return {x0, y1 - d};
}

cplx Region::mid() const { return center; }

Region Region::mapped(cplx shift, double scale) const {
  if (kind == Kind::Disc) return disc((center - shift) / scale, radius / scale);
  return rectangle((x0 - shift.real()) / scale, (x1 - shift.real()) / scale, (y0 - shift.imag()) / scale,
                   (y1 - shift.imag()) / scale);
}

double Region::extent() const {
  if (kind == Kind::Disc) return radius;
  return 0.5 * std::max(x1 - x0, y1 - y0);
}

int winding_number(const ComplexFunction& f, const Region& contour, int initial, int cap) {
  int nodes = std::max(8, initial);
  int previous = std::numeric_limits<int>::min();
  for (;;) {
    double total = 0.0, worst = 0.0;
    cplx prev = f(contour.boundary_point(0.0));
    const cplx first = prev;
    for (int k = 1; k <= nodes; ++k) {
      const cplx cur = k == nodes ? first : f(contour.boundary_point(double(k) / double(nodes)));
      if (cur == cplx(0.0) || prev == cplx(0.0)) fail(ErrorKind::HypothesisUnverifiable, "winding_number: zero on the contour");
      const double inc = std::arg(cur / prev);
      total += inc;
      worst = std::max(worst, std::abs(inc));
      prev = cur;
    }
    const double w = total / (2.0 * std::numbers::pi);
    const int rounded = static_cast<int>(std::lround(w));
    if (std::abs(w - rounded) <= 0.25 && worst <= 0.5 * std::numbers::pi && rounded == previous) return rounded;
    previous = std::abs(w - rounded) <= 0.25 ? rounded : std::numeric_limits<int>::min();
    if (nodes >= cap) {
      if (worst <= 0.5 * std::numbers::pi && std::abs(w - rounded) <= 0.25) return rounded;
      fail(ErrorKind::NoConvergence, "winding_number: node cap reached without a stable count");
    }
    nodes *= 2;
  }
}

bool RoucheCertificate::certified() const {
  if (count_p != count_q) return false;
  return std::all_of(discs.begin(), discs.end(), [](const IsolatingDisc& d) { return d.zeros_p == 1 && d.zeros_q == 1; });
}

namespace {

std::string where(cplx z) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << z.real() << ", " << z.imag() << ")";
  return os.str();
}

}  // namespace

RoucheCertificate rouche_certify(const VectorC& p_coeffs, const ComplexFunction& q, const Region& U, double epsilon,
                                 const RoucheOptions& opt) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) fail(ErrorKind::InvalidArgument, "rouche_certify: epsilon must lie in (0, 1/2)");
  const VectorC roots = poly_roots(p_coeffs);
  const Index d = roots.size();
  const cplx lead = p_coeffs(d);

  RoucheCertificate cert;
  cert.region = U;
  cert.epsilon = epsilon;
  cert.shift = U.mid();
  double sep = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < d; ++i)
    for (Index j = i + 1; j < d; ++j) sep = std::min(sep, std::abs(roots(i) - roots(j)));
  if (opt.scale > 0.0) {
    cert.scale = opt.scale;
    if (std::isfinite(sep) && sep / cert.scale < 2.0) {
      fail(ErrorKind::HypothesisUnverifiable, "rouche_certify: requested scale leaves roots closer than 2");
    }
  } else {
    cert.scale = std::isfinite(sep) ? 0.5 * sep * (1.0 - 1e-12) : 1.0;
  }
  if (!(cert.scale > 0.0)) fail(ErrorKind::HypothesisUnverifiable, "rouche_certify: p has a repeated root");

  // Normalized coordinates: w = (z - c) / s, p^ monic.
  const cplx c = cert.shift;
  const double s = cert.scale;
  VectorC ph(d + 1);
  {
    // Coefficients of p(c + s w) / (lead s^d) via the root form.
    VectorC wroots(d);
    for (Index k = 0; k < d; ++k) wroots(k) = (roots(k) - c) / s;
    ph = poly_from_roots(wroots);
  }
  const cplx norm = lead * std::pow(cplx(s), double(d));
  auto p_hat = [&](cplx w) { return poly_eval(p_coeffs, c + s * w) / norm; };
  auto q_hat = [&](cplx w) { return q(c + s * w) / norm; };
  const Region Uw = U.mapped(c, s);

  // Grid over the bounding box of U_eps, padded by one cell.
  const int density = opt.grid_per_unit > 0 ? opt.grid_per_unit : static_cast<int>(std::ceil(16.0 / epsilon));
  const double h = 1.0 / double(density);
  const double pad = 2.0 * epsilon + 2.0 * h;
  double bx0, bx1, by0, by1;
  if (Uw.kind == Region::Kind::Disc) {
    bx0 = Uw.center.real() - Uw.radius - pad;
    bx1 = Uw.center.real() + Uw.radius + pad;
    by0 = Uw.center.imag() - Uw.radius - pad;
    by1 = Uw.center.imag() + Uw.radius + pad;
  } else {
    bx0 = Uw.x0 - pad;
    bx1 = Uw.x1 + pad;
    by0 = Uw.y0 - pad;
    by1 = Uw.y1 + pad;
  }
  const int nx = static_cast<int>(std::ceil((bx1 - bx0) / h)) + 1;
  const int ny = static_cast<int>(std::ceil((by1 - by0) / h)) + 1;
  if (double(nx) * double(ny) > 4e7) fail(ErrorKind::InvalidArgument, "rouche_certify: verification grid too large");

  // Lipschitz constant of p^ on the box from its coefficients.
  const double rmax = std::max({std::abs(cplx(bx0, by0)), std::abs(cplx(bx0, by1)), std::abs(cplx(bx1, by0)),
                                std::abs(cplx(bx1, by1))});
  double lip_p = 0.0;
  for (Index k = 1; k <= d; ++k) lip_p += double(k) * std::abs(ph(k)) * std::pow(rmax, double(k - 1));

  // Values on the grid; Lipschitz constant of p^ - q^ estimated from neighbouring differences.
  std::vector<cplx> diff(static_cast<size_t>(nx) * ny);
  std::vector<cplx> pv(diff.size());
  std::vector<double> sd(diff.size());
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const cplx w(bx0 + i * h, by0 + j * h);
      const size_t idx = static_cast<size_t>(i) * ny + j;
      sd[idx] = Uw.signed_distance(w);
      if (sd[idx] > 2.0 * epsilon + h) continue;
      pv[idx] = p_hat(w);
      diff[idx] = pv[idx] - q_hat(w);
    }
  }
  double lip_diff = 0.0;
  for (int i = 0; i + 1 < nx; ++i) {
    for (int j = 0; j + 1 < ny; ++j) {
      const size_t idx = static_cast<size_t>(i) * ny + j;
      if (sd[idx] > 2.0 * epsilon + h) continue;
      for (size_t nb : {idx + ny, idx + 1}) {
        if (sd[nb] > 2.0 * epsilon + h) continue;
        lip_diff = std::max(lip_diff, std::abs(diff[nb] - diff[idx]) / h);
      }
    }
  }
  lip_diff *= 2.0;  // safety factor on the sampled estimate
  const double reach = h / std::sqrt(2.0);

  cert.min_margin_p = std::numeric_limits<double>::infinity();
  cert.max_difference = 0.0;
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const size_t idx = static_cast<size_t>(i) * ny + j;
      if (sd[idx] > 2.0 * epsilon + reach) continue;
      const cplx w(bx0 + i * h, by0 + j * h);
      const double dv = std::abs(diff[idx]) + lip_diff * reach;
      cert.max_difference = std::max(cert.max_difference, dv);
      if (dv >= epsilon) {
        fail(ErrorKind::HypothesisUnverifiable, "rouche_certify: |p - q| >= eps near " + where(c + s * w));
      }
      if (sd[idx] >= -reach) {
        const double pm = std::abs(pv[idx]) - lip_p * reach;
        cert.min_margin_p = std::min(cert.min_margin_p, pm);
        if (pm <= epsilon) fail(ErrorKind::HypothesisUnverifiable, "rouche_certify: |p| <= eps near " + where(c + s * w));
      }
    }
  }

  const Region contour = U;
  cert.count_p = winding_number([&](cplx z) { return poly_eval(p_coeffs, z); }, contour);
  cert.count_q = winding_number(q, contour);
  for (Index k = 0; k < d; ++k) {
    if (!U.contains(roots(k))) continue;
    IsolatingDisc disc{roots(k), epsilon * s, 0, 0};
    const Region circle = Region::disc(roots(k), epsilon * s);
    disc.zeros_p = winding_number([&](cplx z) { return poly_eval(p_coeffs, z); }, circle);
    disc.zeros_q = winding_number(q, circle);
    cert.discs.push_back(disc);
  }
  return cert;
}

}  // namespace perturbatrix

namespace perturbatrix {

bool PairingCertificate::one_to_one() const {
  if (count_p != count_q || static_cast<int>(local.size()) != count_p) return false;
  for (const RoucheCertificate& c : local)
    if (!c.certified() || c.discs.size() != 1) return false;
  for (size_t i = 0; i < local.size(); ++i)
    for (size_t j = i + 1; j < local.size(); ++j) {
      const IsolatingDisc &a = local[i].discs[0], &b = local[j].discs[0];
      if (std::abs(a.center - b.center) <= a.radius + b.radius) return false;
    }
  return true;
}

PairingCertificate certify_pairing(const VectorC& p_coeffs, const ComplexFunction& q, const Region& U, double epsilon) {
  const VectorC roots = poly_roots(p_coeffs);
  const Index d = roots.size();
  const cplx lead = p_coeffs(d);
  auto p = [&](cplx z) { return poly_eval(p_coeffs, z); };

  PairingCertificate out;
  out.region = U;
  out.count_p = winding_number(p, U);
  out.count_q = winding_number(q, U);

  const double inner = 0.6;  // radius of the local region in normalized units
  for (Index k = 0; k < d; ++k) {
    if (!U.contains(roots(k))) continue;
    double gap = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < d; ++j)
      if (j != k) gap = std::min(gap, std::abs(roots(j) - roots(k)));
    if (!std::isfinite(gap)) gap = std::max(1.0, U.extent());
    RoucheOptions opt;
    opt.scale = 0.9 * gap / (inner + 2.0 * epsilon);
    if (!(opt.scale > 0.0)) fail(ErrorKind::HypothesisUnverifiable, "certify_pairing: root on the region boundary");
    const cplx rk = roots(k);
    VectorC local_p(2);
    local_p << -rk, 1.0;
    auto local_q = [&, k](cplx z) {
      cplx den = lead;
      for (Index j = 0; j < d; ++j)
        if (j != k) den *= z - roots(j);
      return q(z) / den;
    };
    out.local.push_back(rouche_certify(local_p, local_q, Region::disc(rk, inner * opt.scale), epsilon, opt));
  }
  return out;
}

cplx cleared_secular(const SpectralMeasure& mu, cplx gamma, cplx lambda, double lo, double hi) {
  if (!mu.is_scalar()) fail(ErrorKind::InvalidArgument, "cleared_secular: scalar measure required");
  cplx prod(1.0), far(0.0);
  std::vector<std::pair<double, double>> near;
  for (const SpectralAtom& at : mu.atoms) {
    const double w = at.weight(0, 0).real();
    if (at.location >= lo && at.location <= hi) {
      near.emplace_back(at.location, w);
      prod *= at.location - lambda;
    } else {
      far += w / (at.location - lambda);
    }
  }
  // prod * (1 + gamma far) + gamma sum_j w_j prod_{k != j} (s_k - lambda)
  cplx sum(0.0);
  for (size_t j = 0; j < near.size(); ++j) {
    cplx term(near[j].second);
    for (size_t k = 0; k < near.size(); ++k)
      if (k != j) term *= near[k].first - lambda;
    sum += term;
  }
  return prod * (1.0 + gamma * far) + gamma * sum;
}

}  // namespace perturbatrix
