#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "perturbatrix/curves.hpp"
#include "perturbatrix/limits.hpp"
#include "perturbatrix/localize.hpp"

namespace perturbatrix {

using Json = nlohmann::ordered_json;

struct RunParams {
  std::vector<double> theta_deg;
  double t_max = 0.0;  // 0 selects the classification horizon
  int theta_grid = 18;
  double resolution_deg = 1e-6;
};

struct ProblemSpec {
  std::string name;
  Problem problem;
  std::optional<double> sigma1;  // declared sector half-angles (radians)
  std::optional<double> sigma2;
  RunParams run;
};

struct FamilySpec {
  std::string name;
  LimitModel model;
  Index N = 100;
  double epsilon = 1e-8;
  double r = 100.0;
  ForbiddenOptions grid;
  std::vector<double> levels{0.01, 0.02, 0.03, 0.04, 0.05};
};

/// Throws ParseError for malformed documents, DimensionMismatch, NotUnitVector for a
/// rank_one vector off the unit sphere, and NotHermitian for a non-Hermitian A.
ProblemSpec parse_problem_spec(const std::string& text);
ProblemSpec load_problem_spec(const std::string& path);
FamilySpec parse_family_spec(const std::string& text);
FamilySpec load_family_spec(const std::string& path);

/// %.17g.
std::string format_double(double x);
/// Serializes with fixed key order, two-space indent and %.17g floats.
std::string dump_json(const Json& j);

struct CheckOutcome {
  Json report;
  std::vector<std::string> failures;
};

CheckOutcome run_check(const ProblemSpec& spec);

struct TraceOutcome {
  std::string csv;
  std::vector<std::string> warnings;
};

/// Columns theta_deg, curve_id, t, re_lambda, im_lambda, end_class, end_index (1-based).
TraceOutcome run_trace(const ProblemAnalysis& analysis, const std::vector<double>& theta_deg, double t_max, bool force);

struct MonodromyOutcome {
  Json report;       // table and brackets
  std::string csv;   // theta_deg, tau_1..tau_N
};

/// Angles k (theta_max - theta_min) / grid inside the coupling sector, 0 < k < grid.
MonodromyOutcome run_monodromy(const ProblemAnalysis& analysis, int grid, double resolution_deg, int threads,
                               bool force = false);

struct LimitOutcome {
  std::string mu_csv;  // re_gamma, im_gamma, mu
  Json region;         // disc, boundary curve, artifact zone, contour summary
};

LimitOutcome run_limit(const FamilySpec& spec, int threads);

}  // namespace perturbatrix
