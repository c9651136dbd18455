// Acceptance criteria AC1-AC9. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "perturbatrix/curves.hpp"
#include "perturbatrix/herglotz.hpp"
#include "perturbatrix/limits.hpp"
#include "perturbatrix/linalg.hpp"
#include "perturbatrix/localize.hpp"
#include "perturbatrix/parallel.hpp"
#include "perturbatrix/sectorial.hpp"

using namespace perturbatrix;

namespace {

constexpr double kDeg = oracle::pi / 180.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Ledger {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      if (failures_++ < 5) notes_ << " [fail: " << what << "]";
    }
  }
  void note(const std::string& s) { notes_ << " " << s; }
  Outcome done() const {
    std::ostringstream out;
    out << notes_.str();
    if (failures_ > 5) out << " (+" << failures_ - 5 << " more failures)";
    return {pass_, out.str()};
  }

 private:
  bool pass_ = true;
  int failures_ = 0;
  std::ostringstream notes_;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Problem diag_problem(const VectorR& a, const VectorC& e) {
  Problem p;
  p.a = MatrixC::Zero(a.size(), a.size());
  p.a.diagonal() = a.cast<cplx>();
  p.b = e * e.adjoint();
  return p;
}

// AC1 -----------------------------------------------------------------------------

Outcome ac1() {
  Ledger lg;
  const double alpha = std::sqrt(3.0) / 2.0, beta = 0.5;
  VectorR a(2);
  a << 1.0, -1.0;
  VectorC e(2);
  e << alpha, beta;
  const auto an = analyze_problem(diag_problem(a, e));
  lg.require(an.hypotheses_hold(), "hypotheses");

  const auto ex = find_exceptional_angles(an, 0.0, oracle::pi, 1e-7 * kDeg);
  lg.require(ex.brackets.size() == 1, "single bracket");
  double lo = 119.5 * kDeg, hi = 120.5 * kDeg;
  if (!ex.brackets.empty()) {
    const auto& b = ex.brackets[0];
    lo = b.theta_lo;
    hi = b.theta_hi;
    lg.require(lo <= 120 * kDeg + 1e-12 && hi >= 120 * kDeg - 1e-12, "bracket contains 120 degrees");
    lg.require(b.critical.has_value() && b.critical->converged, "critical point converged");
    if (b.critical) {
      const double dg = std::abs(b.critical->gamma - cplx(-1.0, std::sqrt(3.0)));
      const double dl = std::abs(b.critical->lambda - cplx(-0.5, std::sqrt(3.0) / 2.0));
      lg.require(dg <= 1e-6, "gamma_c");
      lg.require(dl <= 1e-6, "lambda_c");
      lg.note("|dgamma_c|=" + fmt("%.1e", dg) + " |dlambda_c|=" + fmt("%.1e", dl));
    }
    lg.note("bracket=[" + fmt("%.8f", lo / kDeg) + "," + fmt("%.8f", hi / kDeg) + "]");
  }

  double worst = 0.0;
  int samples = 0;
  for (double th : {119.0 * kDeg, lo, hi, 121.0 * kDeg}) {
    RaySpec ray;
    ray.theta = th;
    ray.t_max = 4.0;
    const auto cs = trace_ray(an, ray);
    lg.require(cs.complete && !cs.collision, "trace at " + fmt("%.8f", th / kDeg) + " reached t=4");
    for (const auto& c : cs.curves) {
      for (size_t k = 0; k < c.t.size(); ++k) {
        const cplx g = std::polar(c.t[k], th);
        const cplx s = std::sqrt(g * g / 4.0 + 1.0 - g * (beta * beta - alpha * alpha));
        worst = std::max(worst, std::min(std::abs(c.lambda[k] - (g / 2.0 + s)), std::abs(c.lambda[k] - (g / 2.0 - s))));
        ++samples;
      }
    }
  }
  lg.require(worst <= 1e-9, "closed-form agreement");
  lg.note("samples=" + std::to_string(samples) + " max|lambda-closed|=" + fmt("%.1e", worst));
  return lg.done();
}

// AC2 -----------------------------------------------------------------------------

Outcome ac2() {
  Ledger lg;
  VectorR a(5);
  a << 1, 2, 3, 4, 5;
  const auto an = analyze_problem(diag_problem(a, VectorC::Ones(5) / std::sqrt(5.0)));
  lg.require(an.hypotheses_hold(), "hypotheses");

  const int table[9][5] = {{1, 2, 3, 4, 5}, {1, 2, 3, 4, 5}, {1, 2, 3, 4, 5}, {1, 2, 3, 4, 5}, {1, 2, 3, 4, 5},
                           {1, 2, 3, 4, 5}, {1, 2, 3, 5, 4}, {1, 2, 3, 5, 4}, {1, 2, 5, 3, 4}};
  int rows_ok = 0;
  for (int row = 0; row < 9; ++row) {
    const auto cs = monodromy_at(an, (row + 1) * 10.0 * kDeg);
    bool ok = cs.permutation.size() == 5;
    for (int r = 0; ok && r < 5; ++r) ok = cs.permutation[size_t(r)] + 1 == table[row][r];
    lg.require(ok, "row " + std::to_string((row + 1) * 10));
    rows_ok += ok;
  }
  lg.note("rows=" + std::to_string(rows_ok) + "/9");

  const double delta[4] = {1.35556, 2.45608, 3.54390, 4.64442};
  double dmax = 0.0;
  for (int k = 0; k < 4; ++k) dmax = std::max(dmax, std::abs(an.delta(k) - delta[k]));
  lg.require(dmax <= 5e-5, "delta limits");
  lg.note("max|delta-printed|=" + fmt("%.1e", dmax));

  ExceptionalOptions opt;
  opt.threads = default_thread_count();
  const auto ex = find_exceptional_angles(an, 0.0, oracle::pi, 1e-6 * kDeg, opt);
  const auto inside = [&](double l, double h) {
    for (const auto& b : ex.brackets)
      if (b.theta_lo > l * kDeg && b.theta_hi < h * kDeg) return true;
    return false;
  };
  lg.require(inside(61, 62), "bracket in (61,62)");
  lg.require(inside(81, 82), "bracket in (81,82)");
  if (ex.brackets.size() >= 2)
    lg.note("brackets~" + fmt("%.5f", ex.brackets[0].theta_lo / kDeg) + "," + fmt("%.5f", ex.brackets[1].theta_lo / kDeg));
  return lg.done();
}

// AC3 -----------------------------------------------------------------------------

Outcome ac3() {
  Ledger lg;
  const int m1 = 5, m2 = 25;
  const double L = 4.0;
  VectorR loc(m1 + m2), w(m1 + m2);
  for (int r = 0; r < m1; ++r) loc(r) = r / double(m1 - 1), w(r) = 1.0 / (2.0 * m1);
  for (int s = 0; s < m2; ++s) loc(m1 + s) = L + 1.0 + s / double(m2 - 1), w(m1 + s) = 1.0 / (2.0 * m2);
  const auto mu = scalar_measure(loc, w);
  const auto comp = compress(mu, L + 1.0, L + 2.0);
  lg.require(std::abs(comp.Y(0, 0) - 5.5) < 1e-12, "Y = 5.5");

  MatrixC af = MatrixC::Zero(m1 + m2, m1 + m2);
  af.diagonal() = loc.cast<cplx>();
  const VectorC ef = w.cwiseSqrt().cast<cplx>();
  MatrixC at = MatrixC::Zero(6, 6);
  VectorC et(6);
  for (int r = 0; r < m1; ++r) at(r, r) = loc(r), et(r) = ef(r);
  at(5, 5) = comp.Y(0, 0);
  et(5) = std::sqrt(comp.X(0, 0).real());
  const auto sp = secular_pair(at, et);

  int certificates = 0, paired = 0;
  for (double t : {0.5, 2.0, 5.0, 10.0, 15.0, 19.5}) {
    const cplx g = std::polar(t, 89.0 * kDeg);
    auto q = [&](cplx l) { return (comp.Y(0, 0) - l) * cleared_secular(mu, g, l, -0.5, 1.5); };
    const Region u = Region::rectangle(-1.0, 2.0, -1.0, 7.0 + t);
    const auto cert = certify_pairing(sp.coefficients(g), q, u);
    const std::string at_t = " at t=" + fmt("%g", t);
    lg.require(cert.count_p == cert.count_q, "counts" + at_t);
    lg.require(cert.one_to_one(), "one-to-one" + at_t);
    ++certificates;

    const VectorC full = oracle::eigenvalues(MatrixC(af + g * ef * ef.adjoint()));
    const VectorC small = oracle::eigenvalues(MatrixC(at + g * et * et.adjoint()));
    int full_in = 0, small_in = 0;
    for (Index k = 0; k < full.size(); ++k) full_in += u.contains(full(k));
    for (Index k = 0; k < small.size(); ++k) small_in += u.contains(small(k));
    lg.require(full_in == cert.count_q && small_in == cert.count_p, "oracle counts" + at_t);
    for (const auto& local : cert.local) {
      const auto& d = local.discs.at(0);
      int nf = 0, ns = 0;
      for (Index k = 0; k < full.size(); ++k) nf += std::abs(full(k) - d.center) < d.radius;
      for (Index k = 0; k < small.size(); ++k) ns += std::abs(small(k) - d.center) < d.radius;
      lg.require(nf == 1 && ns == 1, "disc occupancy" + at_t);
      paired += (nf == 1 && ns == 1);
    }
  }
  lg.note("certificates=" + std::to_string(certificates) + " paired=" + std::to_string(paired));

  const double bound = compression_error_bound(comp, L);
  int audited = 0, violations = 0;
  double worst = 0.0;
  for (int i = 0; i <= 120; ++i) {
    for (int j = 0; j < 120; ++j) {
      const cplx l(-15.0 + 35.0 * i / 120.0, -15.0 + 30.0 * (j + 0.5) / 120.0);
      const double dx = l.real() < L + 1 ? L + 1 - l.real() : l.real() > L + 2 ? l.real() - (L + 2) : 0.0;
      if (std::hypot(dx, l.imag()) < L) continue;
      const double err = std::abs(eval_m_scalar(mu, l) - comp.eval_scalar(l));
      worst = std::max(worst, err);
      violations += err > bound;
      ++audited;
    }
  }
  lg.require(violations == 0, "audit grid");
  lg.note("audit=" + std::to_string(audited) + " max|m-m~|=" + fmt("%.2e", worst) + " bound=" + fmt("%.4e", bound));
  return lg.done();
}

// AC4 -----------------------------------------------------------------------------

Outcome ac4() {
  Ledger lg;
  oracle::Rng rng(20240401);
  int checks = 0;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index m = rng.integer(1, 4);
    const int atoms = rng.integer(2, 20);
    SpectralMeasure mu;
    mu.dimension = m;
    std::vector<double> locs;
    for (int k = 0; k < atoms; ++k) locs.push_back(rng.uniform(-5.0, 5.0));
    std::sort(locs.begin(), locs.end());
    for (double s : locs) {
      const MatrixC g = rng.complex_matrix(m, rng.integer(1, static_cast<int>(m)));
      mu.atoms.push_back({s, MatrixC(g * g.adjoint())});
    }
    const size_t pick = size_t(rng.integer(0, atoms - 1));
    const double a = locs[pick] - rng.uniform(0.0, 1.5), b = locs[pick] + rng.uniform(0.0, 1.5);
    const auto comp = compress(mu, a, b);
    const double L = rng.uniform(0.2, 4.0);
    const double bound = compression_error_bound(comp, L);
    for (int k = 0; k < 20; ++k) {
      const double dist = L * rng.uniform(1.0, 4.0);
      const double ang = rng.uniform(0.0, 2.0 * oracle::pi);
      const double anchor = rng.uniform(a, b);
      cplx l = cplx(anchor, 0.0) + std::polar(dist, ang);
      const double dx = l.real() < a ? a - l.real() : l.real() > b ? l.real() - b : 0.0;
      const double d = std::hypot(dx, l.imag());
      if (d < L) l = cplx(anchor, 0.0) + std::polar(dist, ang) * (L / std::max(d, 1e-300)) * 1.0000001;
      const double dx2 = l.real() < a ? a - l.real() : l.real() > b ? l.real() - b : 0.0;
      if (std::hypot(dx2, l.imag()) < L) continue;
      const double err = oracle::spectral_norm(MatrixC(eval_m(mu, l) - comp.eval(l)));
      lg.require(err <= bound + 1e-12, "trial " + std::to_string(trial));
      worst_ratio = std::max(worst_ratio, err / std::max(bound, 1e-300));
      ++checks;
    }
  }
  lg.require(checks >= 1900, "enough samples");
  lg.note("checks=" + std::to_string(checks) + " max err/bound=" + fmt("%.3f", worst_ratio));
  return lg.done();
}

// AC5 -----------------------------------------------------------------------------

Outcome ac5() {
  Ledger lg;
  const auto model = LimitModel::uniform();
  ForbiddenOptions opt;
  opt.threads = default_thread_count();
  const auto fr = forbidden_region(model, 1e-8, 100.0, opt);
  lg.require(std::abs(fr.disc_center - cplx(0, 1 / (2 * oracle::pi))) < 1e-15, "disc centre");
  lg.require(std::abs(fr.disc_radius - 1 / (2 * oracle::pi)) < 1e-15, "disc radius");

  int not_forbidden = 0;
  for (int j = 0; j < fr.grid.ny; ++j)
    for (int i = 0; i < fr.grid.nx; ++i)
      if (fr.disc_contains(fr.grid_point(i, j)) && !fr.forbidden_at(i, j)) ++not_forbidden;
  lg.require(not_forbidden == 0, "disc contained in computed region");

  double h_emp = 0.0;
  int used = 0;
  for (const cplx& p : fr.boundary_points) {
    if (fr.in_artifact_zone(p)) continue;
    h_emp = std::max(h_emp, std::abs(std::abs(p - fr.disc_center) - fr.disc_radius));
    ++used;
  }
  double h_disc = 0.0;
  for (int k = 0; k < 4000; ++k) {
    const cplx c = fr.disc_center + std::polar(fr.disc_radius, 2.0 * oracle::pi * k / 4000.0);
    if (fr.in_artifact_zone(c) || c.imag() < fr.grid.y0) continue;
    double d = std::numeric_limits<double>::infinity();
    for (const cplx& p : fr.boundary_points) d = std::min(d, std::abs(p - c));
    h_disc = std::max(h_disc, d);
  }
  const double hausdorff = std::max(h_emp, h_disc);
  lg.require(used > 100, "boundary points outside the artifact zone");
  lg.require(hausdorff <= 0.02, "Hausdorff distance");
  lg.note("hausdorff=" + fmt("%.2e", hausdorff) + " artifact_radius=" + fmt("%.3f", fr.artifact_radius));

  const auto an = analyze_problem(discretize(model, 100));
  const int nx = 81, ny = 61;
  std::vector<double> mu(size_t(nx * ny));
  parallel_for(mu.size(), default_thread_count(), [&](std::size_t idx) {
    const int i = int(idx) % nx, j = int(idx) / nx;
    mu[idx] = mu_N(an, cplx(-0.4 + 0.8 * i / (nx - 1), 0.005 + 0.495 * j / (ny - 1)));
  });
  int below = 0, inside = 0, above = 0;
  double max_inside = 0.0;
  for (std::size_t idx = 0; idx < mu.size(); ++idx) {
    const int i = int(idx) % nx, j = int(idx) / nx;
    const cplx g(-0.4 + 0.8 * i / (nx - 1), 0.005 + 0.495 * j / (ny - 1));
    below += mu[idx] < g.imag() / 100.0 - 1e-12;
    if (std::abs(g - fr.disc_center) <= fr.disc_radius) {
      ++inside;
      max_inside = std::max(max_inside, mu[idx]);
      above += mu[idx] > 0.05;
    }
  }
  lg.require(below == 0, "lower bound Im(gamma)/100");
  lg.require(above == 0, "mu_100 <= 0.05 inside the disc");
  lg.note("grid=" + std::to_string(nx * ny) + " in_disc=" + std::to_string(inside) + " max_mu_in_disc=" + fmt("%.4f", max_inside));
  return lg.done();
}

// AC6 -----------------------------------------------------------------------------

Outcome ac6() {
  Ledger lg;
  oracle::Rng rng(606);
  int problems = 0;
  VectorR t(60);
  for (int k = 0; k < 60; ++k) t(k) = std::pow(10.0, -3.0 + 7.0 * k / 59.0);
  while (problems < 200) {
    const Index n = rng.integer(2, 12);
    Problem p;
    p.a = rng.hermitian_with_spectrum(rng.separated_spectrum(n, -5.0, 5.0, 0.05));
    const VectorC e = rng.unit_vector(n);
    p.b = e * e.adjoint();
    const auto an = analyze_problem(p);
    if (!an.cyclic) continue;
    ++problems;
    const std::string id = "problem " + std::to_string(problems);

    const auto sp = secular_pair(p.a, e);
    // independent truncation: Eigen QR completes e to an orthonormal basis
    const Eigen::HouseholderQR<MatrixC> qr{MatrixC(e)};
    const MatrixC basis = MatrixC(qr.householderQ()).rightCols(n - 1);
    const VectorR delta_ref = oracle::hermitian_eigenvalues(MatrixC(basis.adjoint() * p.a * basis));
    const VectorR alpha_ref = oracle::hermitian_eigenvalues(p.a);
    lg.require((sp.delta - delta_ref).cwiseAbs().maxCoeff() < 1e-10, id + " delta oracle");
    bool strict = true;
    for (Index r = 0; r + 1 < n; ++r) strict = strict && alpha_ref(r) < delta_ref(r) && delta_ref(r) < alpha_ref(r + 1);
    lg.require(strict, id + " interlacing");

    const MatrixR sweep = real_coupling_sweep(p, t);
    bool increasing = true;
    for (Index k = 1; k < t.size(); ++k)
      for (Index r = 0; r < n; ++r) increasing = increasing && sweep(k, r) > sweep(k - 1, r);
    lg.require(increasing, id + " monotone");
    for (Index r = 0; r < n; ++r) {
      const VectorR ref = oracle::hermitian_eigenvalues(MatrixC(p.a + t(t.size() - 1) * p.b));
      lg.require(std::abs(sweep(t.size() - 1, r) - ref(r)) < 1e-8 * std::max(1.0, std::abs(ref(r))), id + " sweep oracle");
    }
  }
  lg.note("problems=" + std::to_string(problems));
  return lg.done();
}

// AC7 -----------------------------------------------------------------------------

Outcome ac7() {
  Ledger lg;
  oracle::Rng rng(707);
  int problems = 0, rank_one = 0, traced = 0;
  double worst_qr = 0.0, worst_trace = 0.0, worst_secular = 0.0, worst_identity = 0.0;
  while (problems < 500) {
    const Index n = rng.integer(2, 12);
    const Index m = rng.integer(1, static_cast<int>(std::min<Index>(3, n)));
    Problem p;
    p.a = rng.hermitian_with_spectrum(rng.separated_spectrum(n, -4.0, 4.0, 0.02));
    const double s1 = rng.uniform(0.0, 0.6), s2 = rng.uniform(0.0, 0.6);
    p.b = rng.sectorial(n, m, s1, s2);
    const auto an = analyze_problem(p);
    const CouplingSector cs = coupling_sector(an.sector);
    const double theta = rng.uniform(cs.theta_min() + 0.02, cs.theta_max() - 0.02);
    const cplx gamma = std::polar(rng.uniform(0.1, 5.0), theta);
    ++problems;
    const std::string id = "problem " + std::to_string(problems);

    const MatrixC ag = p.a + gamma * p.b;
    const VectorC ref = oracle::eigenvalues(ag);
    const double d_qr = oracle::assignment_distance(general_eig(ag).eigenvalues, ref);
    worst_qr = std::max(worst_qr, d_qr);
    lg.require(d_qr <= 1e-7, id + " general_eig");

    RaySpec ray;
    ray.theta = theta;
    ray.t_max = std::abs(gamma);
    ray.force = !an.hypotheses_hold();
    const auto curves = trace_ray(an, ray);
    lg.require(curves.complete && !curves.collision, id + " trace complete");
    if (curves.complete) {
      const double d_tr = oracle::assignment_distance(curves.last_values(), ref);
      worst_trace = std::max(worst_trace, d_tr);
      lg.require(d_tr <= 1e-7, id + " traced spectrum");
      ++traced;
    }

    if (m == 1) {
      ++rank_one;
      const VectorC u = an.sector.range_basis.col(0);
      const cplx c = u.dot(p.b * u);  // B = c u u^*
      const VectorC sec = secular_eigenvalues(rank_one_measure(p.a, u), gamma * c);
      const double d_sec = oracle::assignment_distance(sec, ref);
      worst_secular = std::max(worst_secular, d_sec);
      lg.require(d_sec <= 1e-7, id + " secular spectrum");
    }

    if (an.hypotheses_hold()) lg.require(ref.imag().minCoeff() > 0.0, id + " upper half plane");
    const double expected = (gamma * p.b.trace()).imag();
    const double got = ref.sum().imag();
    const double rel = std::abs(got - expected) / std::max(std::abs(expected), 1e-300);
    worst_identity = std::max(worst_identity, rel);
    lg.require(rel <= 1e-10, id + " trace identity");
  }
  lg.note("problems=" + std::to_string(problems) + " traced=" + std::to_string(traced) +
          " rank_one=" + std::to_string(rank_one) + " max_d(qr,trace,secular)=" + fmt("%.1e", worst_qr) + "," +
          fmt("%.1e", worst_trace) + "," + fmt("%.1e", worst_secular) + " max_rel_trace=" + fmt("%.1e", worst_identity));
  return lg.done();
}

// AC8 -----------------------------------------------------------------------------

Outcome ac8() {
  Ledger lg;
  oracle::Rng rng(808);
  int cases = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = rng.integer(2, 10);
    const Index m = rng.integer(1, static_cast<int>(n));
    const double s1 = rng.uniform(0.0, 1.3), s2 = rng.uniform(0.0, 1.3);
    const MatrixC b = rng.sectorial(n, m, s1, s2);
    const auto dec = analyze_sectorial(b);
    const double nb = dec.norm;
    const std::string id = "case " + std::to_string(trial);

    // kernel equivalences on kernel vectors and random vectors
    if (dec.kernel_basis.cols() > 0) {
      const VectorC k = (dec.kernel_basis * rng.complex_vector(dec.kernel_basis.cols())).normalized();
      lg.require(std::abs(k.dot(b * k)) <= 1e-10 * nb && (b * k).norm() <= 1e-10 * nb &&
                     (b.adjoint() * k).norm() <= 1e-10 * nb,
                 id + " kernel vector");
    }
    const VectorC f = rng.unit_vector(n);
    const bool z1 = std::abs(f.dot(b * f)) <= 1e-10 * nb, z2 = (b * f).norm() <= 1e-10 * nb,
               z3 = (b.adjoint() * f).norm() <= 1e-10 * nb;
    lg.require(z1 == z2 && z2 == z3, id + " random vector equivalence");

    // triple agreement for kernel-supported, identity and random S
    const MatrixC k = dec.kernel_basis;
    if (k.cols() > 0) {
      const auto z = check_zero_equivalence(b, MatrixC(rng.complex_matrix(3, k.cols()) * k.adjoint()));
      lg.require(z.sbs && z.sb && z.sb_star, id + " kernel S");
    }
    const auto zi = check_zero_equivalence(b, MatrixC::Identity(n, n));
    lg.require(!zi.sbs && !zi.sb && !zi.sb_star, id + " identity S");
    lg.require(check_zero_equivalence(b, rng.complex_matrix(2, n)).consistent(), id + " random S");

    // truncation containment
    const MatrixC a = rng.hermitian(n);
    const VectorR ev = oracle::hermitian_eigenvalues(a);
    const MatrixC w = rng.orthonormal_columns(n, rng.integer(1, static_cast<int>(n)));
    const VectorR tv = oracle::hermitian_eigenvalues(truncate(a, w));
    lg.require(tv.minCoeff() >= ev(0) - 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff()) &&
                   tv.maxCoeff() <= ev(n - 1) + 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff()),
               id + " truncation containment");

    // extreme rays: rank one at an edge angle vs interior angle vs higher rank
    const double c1 = 0.35, c2 = 0.55;
    const VectorC v = rng.complex_vector(n);
    const MatrixC edge = std::polar(rng.uniform(0.2, 3.0), rng.integer(0, 1) ? c2 : -c1) * v * v.adjoint();
    const MatrixC interior = std::polar(rng.uniform(0.2, 3.0), rng.uniform(-c1 + 0.02, c2 - 0.02)) * v * v.adjoint();
    lg.require(is_extreme_ray(edge, c1, c2), id + " edge ray");
    lg.require(!is_extreme_ray(interior, c1, c2), id + " interior ray");
    if (n >= 2) lg.require(!is_extreme_ray(rng.sectorial(n, 2, 0.1, 0.1), c1, c2), id + " rank two");
    ++cases;
  }
  lg.note("cases=" + std::to_string(cases));
  return lg.done();
}

// AC9 -----------------------------------------------------------------------------

Outcome ac9() {
  Ledger lg;
  int checks = 0;
  double worst_ratio = 0.0;
  for (const auto& model : {LimitModel::uniform(), LimitModel::linear()}) {
    for (Index n : {50, 100, 200, 400}) {
      for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
          const cplx l(-0.25 + 1.5 * i / 9.0, 0.1 + 1.9 * j / 9.0);
          const double err = std::abs(m_N(model, n, l) - m_infty(model, l));
          const double bound = convergence_error(n, model, l);
          lg.require(err <= bound, "N=" + std::to_string(n));
          worst_ratio = std::max(worst_ratio, err / bound);
          ++checks;
        }
      }
    }
  }
  // Im^{-2} scaling of the bound at fixed real part inside [0, 1]
  const auto u = LimitModel::uniform();
  double worst_scaling = 0.0;
  for (double x : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    for (double y : {0.1, 0.2, 0.5, 1.0, 2.0}) {
      const double scaled = convergence_error(100, u, cplx(x, y)) * y * y * 200.0;
      worst_scaling = std::max(worst_scaling, std::abs(scaled - 1.0));
    }
  }
  // log-log slope from an empirical fit of the bound for the linear density
  const auto lin = LimitModel::linear();
  const double y1 = 0.1, y2 = 0.2;
  const double slope = std::log(convergence_error(100, lin, cplx(0.5, y2)) / convergence_error(100, lin, cplx(0.5, y1))) /
                       std::log(y2 / y1);
  lg.require(worst_scaling < 1e-9, "uniform bound proportional to Im^-2");
  lg.require(std::abs(slope + 2.0) < 0.25, "linear bound slope");
  lg.note("checks=" + std::to_string(checks) + " max err/bound=" + fmt("%.3f", worst_ratio) +
          " slope(linear)=" + fmt("%.3f", slope));
  return lg.done();
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budget_s;  // 0 means no runtime requirement
  };
  const Criterion criteria[] = {
      {"AC1 closed-form 2x2 trace and critical point", ac1, 1.0},
      {"AC2 permutation table, delta limits, brackets", ac2, 30.0},
      {"AC3 truncation compression pairing", ac3, 30.0},
      {"AC4 compression bound property suite", ac4, 0.0},
      {"AC5 forbidden disc and mu_100 grid", ac5, 300.0},
      {"AC6 interlacing and real-coupling monotonicity", ac6, 0.0},
      {"AC7 oracle equivalence", ac7, 0.0},
      {"AC8 sectorial structure suite", ac8, 0.0},
      {"AC9 Riemann-sum bound", ac9, 0.0},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string(" exception: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    if (c.budget_s > 0 && secs > c.budget_s) {
      out.pass = false;
      out.detail += " [over budget " + fmt("%.0f", c.budget_s) + " s]";
    }
    failed += !out.pass;
    std::printf("%s %s (%.2f s)%s\n", out.pass ? "PASS" : "FAIL", c.name, secs, out.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
