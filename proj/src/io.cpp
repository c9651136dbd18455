#include "perturbatrix/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "perturbatrix/parallel.hpp"

namespace perturbatrix {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

[[noreturn]] void parse_fail(const std::string& what) { fail(ErrorKind::ParseError, what); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_fail("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json parse_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    parse_fail(e.what());
  }
}

double as_real(const Json& j, const std::string& where) {
  if (!j.is_number()) parse_fail(where + ": expected a number");
  return j.get<double>();
}

cplx as_complex(const Json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  parse_fail(where + ": expected a number or an [re, im] pair");
}

VectorC as_vector(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) parse_fail(where + ": expected a non-empty array");
  VectorC v(static_cast<Index>(j.size()));
  for (size_t k = 0; k < j.size(); ++k) v(static_cast<Index>(k)) = as_complex(j[k], where);
  return v;
}

MatrixC as_matrix(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) parse_fail(where + ": expected an array of rows");
  const size_t rows = j.size(), cols = j[0].size();
  MatrixC m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) fail(ErrorKind::DimensionMismatch, where + ": ragged rows");
    for (size_t c = 0; c < cols; ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = as_complex(j[r][c], where);
  }
  return m;
}

MatrixC parse_a(const Json& j) {
  if (j.is_object()) {
    if (!j.contains("diagonal")) parse_fail("A: unknown shorthand");
    return as_vector(j["diagonal"], "A.diagonal").asDiagonal();
  }
  return as_matrix(j, "A");
}

MatrixC parse_b(const Json& j, Index n) {
  MatrixC b;
  if (j.is_object()) {
    if (j.contains("rank_one")) {
      const VectorC e = as_vector(j["rank_one"].value("e", Json()), "B.rank_one.e");
      if (std::abs(e.norm() - 1.0) > 1e-10) fail(ErrorKind::NotUnitVector, "B.rank_one.e must have norm 1");
      b = e * e.adjoint();
    } else if (j.contains("rank_k")) {
      const Json& vs = j["rank_k"].value("vectors", Json());
      if (!vs.is_array() || vs.empty()) parse_fail("B.rank_k.vectors: expected a non-empty array");
      for (size_t k = 0; k < vs.size(); ++k) {
        const VectorC e = as_vector(vs[k], "B.rank_k.vectors");
        if (b.size() == 0) b = MatrixC::Zero(e.size(), e.size());
        if (e.size() != b.rows()) fail(ErrorKind::DimensionMismatch, "B.rank_k: vectors differ in length");
        b += e * e.adjoint();
      }
    } else if (j.contains("zero")) {
      b = MatrixC::Zero(n, n);
    } else {
      parse_fail("B: unknown shorthand");
    }
  } else {
    b = as_matrix(j, "B");
  }
  if (b.rows() != n || b.cols() != n) fail(ErrorKind::DimensionMismatch, "B does not match the dimension of A");
  return b;
}

std::vector<double> as_reals(const Json& j, const std::string& where) {
  if (!j.is_array()) parse_fail(where + ": expected an array");
  std::vector<double> v;
  for (const Json& x : j) v.push_back(as_real(x, where));
  return v;
}

Json pair(cplx z) { return Json::array({z.real(), z.imag()}); }

Json reals(const VectorR& v) {
  Json a = Json::array();
  for (Index k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

Json pairs(const VectorC& v) {
  Json a = Json::array();
  for (Index k = 0; k < v.size(); ++k) a.push_back(pair(v(k)));
  return a;
}

Json one_based(const std::vector<Index>& tau) {
  if (tau.empty()) return Json();
  Json a = Json::array();
  for (Index t : tau) a.push_back(t + 1);
  return a;
}

void emit(std::string& out, const Json& j, int depth) {
  const std::string pad(static_cast<size_t>(2 * depth), ' ');
  const std::string inner(static_cast<size_t>(2 * depth + 2), ' ');
  switch (j.type()) {
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_double(x) : "null";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& x) {
        return x.is_primitive() || (x.is_array() && std::all_of(x.begin(), x.end(), [](const Json& y) { return y.is_primitive(); }));
      });
      if (flat) {
        out += "[";
        for (size_t k = 0; k < j.size(); ++k) {
          if (k) out += ", ";
          emit(out, j[k], depth + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (size_t k = 0; k < j.size(); ++k) {
        out += inner;
        emit(out, j[k], depth + 1);
        out += k + 1 < j.size() ? ",\n" : "\n";
      }
      out += pad + "]";
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      size_t k = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++k) {
        out += inner + Json(it.key()).dump() + ": ";
        emit(out, it.value(), depth + 1);
        out += k + 1 < j.size() ? ",\n" : "\n";
      }
      out += pad + "}";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string dump_json(const Json& j) {
  std::string out;
  emit(out, j, 0);
  out += "\n";
  return out;
}

ProblemSpec parse_problem_spec(const std::string& text) {
  const Json j = parse_text(text);
  if (!j.is_object()) parse_fail("spec: expected an object");
  if (!j.contains("A") || !j.contains("B")) parse_fail("spec: A and B are required");
  ProblemSpec spec;
  spec.name = j.value("name", std::string("problem"));
  const MatrixC a = parse_a(j["A"]);
  if (a.rows() != a.cols()) fail(ErrorKind::DimensionMismatch, "A is not square");
  if (hermitian_residual(a) > 1e-12) fail(ErrorKind::NotHermitian, "A is not Hermitian");
  spec.problem = Problem{a, parse_b(j["B"], a.rows())};
  if (j.contains("sector")) {
    const Json& s = j["sector"];
    if (s.contains("sigma1_deg")) spec.sigma1 = as_real(s["sigma1_deg"], "sector.sigma1_deg") / kDeg;
    if (s.contains("sigma2_deg")) spec.sigma2 = as_real(s["sigma2_deg"], "sector.sigma2_deg") / kDeg;
  }
  if (j.contains("run")) {
    const Json& r = j["run"];
    if (r.contains("theta_deg")) spec.run.theta_deg = as_reals(r["theta_deg"], "run.theta_deg");
    if (r.contains("t_max")) spec.run.t_max = as_real(r["t_max"], "run.t_max");
    if (r.contains("theta_grid")) spec.run.theta_grid = static_cast<int>(as_real(r["theta_grid"], "run.theta_grid"));
    if (r.contains("resolution_deg")) spec.run.resolution_deg = as_real(r["resolution_deg"], "run.resolution_deg");
  }
  return spec;
}

ProblemSpec load_problem_spec(const std::string& path) { return parse_problem_spec(read_file(path)); }

FamilySpec parse_family_spec(const std::string& text) {
  const Json j = parse_text(text);
  if (!j.is_object() || !j.contains("family")) parse_fail("family spec: a family object is required");
  FamilySpec spec;
  spec.name = j.value("name", std::string("family"));
  const Json& f = j["family"];
  const Json d = f.value("density", Json("uniform"));
  if (d == "uniform") {
    spec.model = LimitModel::uniform();
  } else if (d == "linear" || d == "s") {
    spec.model = LimitModel::linear();
  } else if (d.is_object() && d.contains("grid")) {
    const std::vector<double> s = as_reals(d["grid"].value("s", Json()), "density.grid.s");
    const std::vector<double> v = as_reals(d["grid"].value("f", Json()), "density.grid.f");
    spec.model = LimitModel::from_grid(Eigen::Map<const VectorR>(s.data(), static_cast<Index>(s.size())),
                                       Eigen::Map<const VectorR>(v.data(), static_cast<Index>(v.size())));
  } else {
    parse_fail("family.density: expected uniform, linear or {grid}");
  }
  spec.N = static_cast<Index>(as_real(f.value("N", Json(100)), "family.N"));
  if (spec.N < 1 || spec.N > 512) parse_fail("family.N must lie in [1, 512]");
  if (j.contains("limit")) {
    const Json& l = j["limit"];
    spec.epsilon = as_real(l.value("epsilon", Json(spec.epsilon)), "limit.epsilon");
    spec.r = as_real(l.value("r", Json(spec.r)), "limit.r");
    if (l.contains("box")) {
      const std::vector<double> b = as_reals(l["box"], "limit.box");
      if (b.size() != 4) parse_fail("limit.box: expected [x0, x1, y0, y1]");
      spec.grid.x0 = b[0];
      spec.grid.x1 = b[1];
      spec.grid.y0 = b[2];
      spec.grid.y1 = b[3];
    }
    if (l.contains("nx")) spec.grid.nx = static_cast<int>(as_real(l["nx"], "limit.nx"));
    if (l.contains("ny")) spec.grid.ny = static_cast<int>(as_real(l["ny"], "limit.ny"));
    if (l.contains("levels")) spec.levels = as_reals(l["levels"], "limit.levels");
  }
  if (!(spec.grid.y0 > 0.0)) parse_fail("limit.box: the gamma box must lie in the upper half-plane");
  return spec;
}

FamilySpec load_family_spec(const std::string& path) { return parse_family_spec(read_file(path)); }

CheckOutcome run_check(const ProblemSpec& spec) {
  const ProblemAnalysis an = analyze_problem(spec.problem);
  CheckOutcome out;
  Json hyps = Json::array();
  for (const HypothesisCheck& h : an.hypotheses) {
    hyps.push_back({{"name", h.name}, {"pass", h.pass}, {"witness", h.witness}, {"detail", h.detail}});
    if (!h.pass) out.failures.push_back(h.name);
  }
  const HypothesisCheck* h1 = an.find("H1");
  const bool sectorial = h1 && h1->pass;
  Json sector;
  if (sectorial) {
    const CouplingSector cs = coupling_sector(an.sector);
    sector = {{"sigma1_deg", an.sector.sigma1 * kDeg}, {"sigma2_deg", an.sector.sigma2 * kDeg},
              {"theta_min_deg", cs.theta_min() * kDeg},   {"theta_max_deg", cs.theta_max() * kDeg},
              {"rank", an.sector.rank},                 {"norm", an.sector.norm}};
    if (spec.sigma1 || spec.sigma2) {
      const double tol = 1e-9;
      const bool ok = (!spec.sigma1 || an.sector.sigma1 <= *spec.sigma1 + tol) &&
                      (!spec.sigma2 || an.sector.sigma2 <= *spec.sigma2 + tol);
      hyps.push_back({{"name", "declared_sector"},
                      {"pass", ok},
                      {"witness", std::max(an.sector.sigma1 - spec.sigma1.value_or(an.sector.sigma1),
                                           an.sector.sigma2 - spec.sigma2.value_or(an.sector.sigma2)) * kDeg},
                      {"detail", "computed half-angles within the declared ones"}});
      if (!ok) out.failures.push_back("declared_sector");
    }
  }
  Json krylov;
  if (an.find("H1") && hermitian_residual(spec.problem.a) <= 1e-12) {
    const KrylovDecomposition kd = krylov_decompose(spec.problem.a, spec.problem.b);
    Json dims = Json::array();
    for (Index d : kd.dimensions()) dims.push_back(d);
    krylov = {{"cyclic", kd.cyclic}, {"subspace_dimensions", dims}};
  }
  out.report = {{"name", spec.name},
                {"dimension", spec.problem.dimension()},
                {"pass", out.failures.empty()},
                {"failures", out.failures},
                {"hypotheses", hyps},
                {"sector", sector},
                {"cyclicity", krylov},
                {"spectra", {{"alpha", reals(an.alpha)}, {"beta", pairs(an.beta)}, {"delta", reals(an.delta)}}}};
  return out;
}

namespace {

const char* end_class_name(EndClass c) {
  switch (c) {
    case EndClass::Divergent: return "divergent";
    case EndClass::Convergent: return "convergent";
    case EndClass::Unclassified: break;
  }
  return "unclassified";
}

}  // namespace

TraceOutcome run_trace(const ProblemAnalysis& an, const std::vector<double>& theta_deg, double t_max, bool force) {
  TraceOutcome out;
  std::string& csv = out.csv;
  csv = "theta_deg,curve_id,t,re_lambda,im_lambda,end_class,end_index\n";
  const double horizon = classification_t_max(an);
  for (double deg : theta_deg) {
    RaySpec ray;
    ray.theta = deg / kDeg;
    ray.t_max = t_max > 0.0 ? t_max : horizon;
    ray.force = force;
    SpectralCurveSet cs = trace_ray(an, ray);
    if (cs.collision) {
      out.warnings.push_back("theta " + format_double(deg) + ": eigenvalue collision near t = " +
                             format_double(cs.nearest.t) + "; curves stop at t = " + format_double(cs.last_t()));
    }
    std::vector<EndClass> cls(cs.curves.size(), EndClass::Unclassified);
    std::vector<Index> idx(cs.curves.size(), -1);
    try {
      const SpectralCurveSet classified =
          (!cs.collision && ray.t_max >= horizon) ? classify_endpoints(cs, an) : monodromy_at(an, ray.theta);
      if (!classified.permutation.empty()) {
        for (size_t c = 0; c < classified.curves.size() && c < cls.size(); ++c) {
          cls[c] = classified.curves[c].end_class;
          idx[c] = classified.curves[c].end_index;
        }
      } else {
        out.warnings.push_back("theta " + format_double(deg) + ": endpoints not classified");
      }
    } catch (const Error& e) {
      out.warnings.push_back("theta " + format_double(deg) + ": endpoints not classified (" + e.what() + ")");
    }
    for (size_t c = 0; c < cs.curves.size(); ++c) {
      const SpectralCurve& curve = cs.curves[c];
      const std::string tail = std::string(",") + end_class_name(cls[c]) + "," +
                               (idx[c] >= 0 ? std::to_string(idx[c] + 1) : std::string());
      for (size_t k = 0; k < curve.t.size(); ++k) {
        csv += format_double(deg) + "," + std::to_string(c + 1) + "," + format_double(curve.t[k]) + "," +
               format_double(curve.lambda[k].real()) + "," + format_double(curve.lambda[k].imag()) + tail + "\n";
      }
    }
  }
  return out;
}

MonodromyOutcome run_monodromy(const ProblemAnalysis& an, int grid, double resolution_deg, int threads, bool force) {
  if (grid < 2) fail(ErrorKind::InvalidArgument, "run_monodromy: theta grid must have at least 2 pieces");
  const CouplingSector sector = coupling_sector(an.sector);
  ExceptionalOptions opt;
  opt.grid_points = grid;
  opt.threads = threads;
  opt.force = force;
  const ExceptionalAngles ex =
      find_exceptional_angles(an, sector.theta_min(), sector.theta_max(), resolution_deg / kDeg, opt);
  const double lo_deg = sector.theta_min() * kDeg, hi_deg = sector.theta_max() * kDeg;

  MonodromyOutcome out;
  const Index n = an.problem.dimension();
  out.csv = "theta_deg";
  for (Index r = 1; r <= n; ++r) out.csv += ",tau_" + std::to_string(r);
  out.csv += "\n";
  Json table = Json::array();
  for (size_t k = 0; k < ex.grid.size(); ++k) {
    // Labels from the degree range directly, so 10-degree steps print as integers.
    const double deg = lo_deg + (hi_deg - lo_deg) * double(k + 1) / double(grid);
    table.push_back({{"theta_deg", deg}, {"tau", one_based(ex.grid_permutations[k])}});
    out.csv += format_double(deg);
    for (Index r = 0; r < n; ++r) {
      out.csv += ",";
      if (!ex.grid_permutations[k].empty()) out.csv += std::to_string(ex.grid_permutations[k][static_cast<size_t>(r)] + 1);
    }
    out.csv += "\n";
  }
  Json brackets = Json::array();
  for (const ExceptionalBracket& b : ex.brackets) {
    Json crit;
    if (b.critical) {
      crit = {{"gamma", pair(b.critical->gamma)},
              {"lambda", pair(b.critical->lambda)},
              {"residual", b.critical->residual},
              {"converged", b.critical->converged}};
    }
    brackets.push_back({{"theta_lo_deg", b.theta_lo * kDeg},
                        {"theta_hi_deg", b.theta_hi * kDeg},
                        {"tau_lo", one_based(b.tau_lo)},
                        {"tau_hi", one_based(b.tau_hi)},
                        {"critical_point", crit}});
  }
  out.report = {{"dimension", n},
                {"sector_deg", Json::array({lo_deg, hi_deg})},
                {"theta_grid", grid},
                {"delta", reals(an.delta)},
                {"beta", pairs(an.beta)},
                {"table", table},
                {"brackets", brackets}};
  return out;
}

LimitOutcome run_limit(const FamilySpec& spec, int threads) {
  const ProblemAnalysis an = analyze_problem(discretize(spec.model, spec.N));
  const ForbiddenOptions& g = spec.grid;
  ForbiddenOptions fopt = g;
  fopt.threads = threads;
  const ForbiddenRegion region = forbidden_region(spec.model, spec.epsilon, spec.r, fopt);

  const int nx = g.nx, ny = g.ny;
  std::vector<double> mu(static_cast<size_t>(nx) * ny);
  parallel_for(static_cast<size_t>(ny), threads, [&](size_t j) {
    for (int i = 0; i < nx; ++i) mu[j * nx + i] = mu_N(an, region.grid_point(i, static_cast<int>(j)));
  });

  LimitOutcome out;
  out.mu_csv = "re_gamma,im_gamma,mu\n";
  int below_bound = 0;
  double max_inside_disc = 0.0;
  Json level_counts = Json::array();
  std::vector<int> counts(spec.levels.size(), 0);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const cplx gm = region.grid_point(i, j);
      const double v = mu[static_cast<size_t>(j) * nx + i];
      out.mu_csv += format_double(gm.real()) + "," + format_double(gm.imag()) + "," + format_double(v) + "\n";
      if (v < gm.imag() / double(spec.N) - 1e-12) ++below_bound;
      if (region.disc_contains(gm)) max_inside_disc = std::max(max_inside_disc, v);
      for (size_t l = 0; l < spec.levels.size(); ++l)
        if (v <= spec.levels[l]) ++counts[l];
    }
  }
  for (size_t l = 0; l < spec.levels.size(); ++l) level_counts.push_back({{"level", spec.levels[l]}, {"cells_at_or_below", counts[l]}});

  int forbidden_cells = 0;
  for (std::uint8_t f : region.forbidden) forbidden_cells += f;
  Json curve = Json::array();
  for (cplx z : region.gamma_boundary) curve.push_back(pair(z));
  Json boundary = Json::array();
  for (cplx z : region.boundary_points) boundary.push_back(pair(z));

  out.region = {{"name", spec.name},
                {"N", spec.N},
                {"sup_norm", spec.model.sup_norm},
                {"mass", spec.model.mass},
                {"disc", {{"center", pair(region.disc_center)}, {"radius", region.disc_radius}}},
                {"epsilon", spec.epsilon},
                {"r", spec.r},
                {"artifact_radius", region.artifact_radius},
                {"grid", {{"x0", g.x0}, {"x1", g.x1}, {"y0", g.y0}, {"y1", g.y1}, {"nx", nx}, {"ny", ny}}},
                {"forbidden_cells", forbidden_cells},
                {"mu", {{"lower_bound_violations", below_bound}, {"max_inside_disc", max_inside_disc}, {"levels", level_counts}}},
                {"boundary_points", boundary},
                {"boundary_curve", curve}};
  return out;
}

}  // namespace perturbatrix
