#include "perturbatrix/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace perturbatrix {

bool ProblemAnalysis::hypotheses_hold() const {
  return std::all_of(hypotheses.begin(), hypotheses.end(), [](const HypothesisCheck& h) { return h.pass; });
}

const HypothesisCheck* ProblemAnalysis::find(const std::string& name) const {
  for (const HypothesisCheck& h : hypotheses)
    if (h.name == name) return &h;
  return nullptr;
}

void sort_by_modulus_then_arg(VectorC& v) {
  std::vector<cplx> items(v.data(), v.data() + v.size());
  std::stable_sort(items.begin(), items.end(), [](cplx x, cplx y) {
    const double ax = std::abs(x), ay = std::abs(y);
    const double tol = 1e-12 * std::max(ax, ay);
    if (std::abs(ax - ay) > tol) return ax < ay;
    return std::arg(x) < std::arg(y);
  });
  for (Index k = 0; k < v.size(); ++k) v(k) = items[static_cast<size_t>(k)];
}

namespace {

// Smallest gap between consecutive entries of an ascending vector (infinity if fewer than 2).
double min_gap(const VectorR& v) {
  double g = std::numeric_limits<double>::infinity();
  for (Index k = 1; k < v.size(); ++k) g = std::min(g, v(k) - v(k - 1));
  return g;
}

double min_pair_distance(const VectorC& v) {
  double g = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < v.size(); ++i)
    for (Index j = i + 1; j < v.size(); ++j) g = std::min(g, std::abs(v(i) - v(j)));
  return g;
}

}  // namespace

ProblemAnalysis analyze_problem(const Problem& problem, const AnalysisOptions& opt) {
  require_square(problem.a, "analyze_problem");
  require_square(problem.b, "analyze_problem");
  require_finite(problem.a, "analyze_problem");
  require_finite(problem.b, "analyze_problem");
  if (problem.a.rows() != problem.b.rows()) fail(ErrorKind::DimensionMismatch, "analyze_problem: A and B sizes differ");

  ProblemAnalysis an;
  an.problem = problem;
  const Index n = problem.dimension();
  an.norm_a = operator_norm(problem.a);
  an.norm_b = operator_norm(problem.b);

  HypothesisCheck h1{"H1", true, 0.0, "A Hermitian and B sectorial"};
  const double herm = hermitian_residual(problem.a);
  if (herm > 1e-12) {
    h1.pass = false;
    h1.witness = herm;
    h1.detail = "A is not Hermitian";
  }
  bool sectorial = true;
  try {
    an.sector = analyze_sectorial(problem.b);
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::NotSectorial) throw;
    sectorial = false;
    h1.pass = false;
    h1.detail = err.what();
  }
  an.hypotheses.push_back(h1);

  const MatrixC a_sym = (problem.a + problem.a.adjoint()) * 0.5;
  const HermitianEigenSystem<double> ae = hermitian_eig(a_sym);
  an.alpha = ae.eigenvalues;
  an.alpha_vectors = ae.eigenvectors;
  const double scale_a = std::max(an.norm_a, 1e-300);

  HypothesisCheck h2{"H2", false, 0.0, ""};
  if (h1.pass || herm <= 1e-12) {
    const KrylovDecomposition kd = krylov_decompose(a_sym, problem.b);
    an.cyclic = kd.cyclic;
    h2.pass = kd.cyclic;
    h2.witness = static_cast<double>(kd.basis.cols());
    h2.detail = "Krylov span dimension " + std::to_string(kd.basis.cols()) + " of " + std::to_string(n);
  }
  an.hypotheses.push_back(h2);

  const double gap_a = min_gap(an.alpha);
  HypothesisCheck h3{"H3", !(gap_a <= opt.gap_tol * scale_a), gap_a / scale_a, "eigenvalues of A simple"};
  an.hypotheses.push_back(h3);

  HypothesisCheck h4{"H4", false, 0.0, "non-zero eigenvalues of B simple"};
  HypothesisCheck h5{"H5", false, 0.0, "eigenvalues of the truncation of A to Ker(B) simple"};
  if (sectorial) {
    const MatrixC bn = truncate(problem.b, an.sector.range_basis);
    an.beta = bn.rows() > 0 ? general_eig(bn).eigenvalues : VectorC();
    sort_by_modulus_then_arg(an.beta);
    const double gap_b = min_pair_distance(an.beta);
    h4.pass = !(gap_b <= opt.gap_tol * std::max(an.norm_b, 1e-300));
    h4.witness = std::isfinite(gap_b) ? gap_b / an.norm_b : gap_b;

    const MatrixC an_k = truncate(a_sym, an.sector.kernel_basis);
    an.delta = an_k.rows() > 0 ? hermitian_eigenvalues<double>(MatrixC((an_k + an_k.adjoint()) * 0.5)) : VectorR();
    const double gap_d = min_gap(an.delta);
    h5.pass = !(gap_d <= opt.gap_tol * scale_a);
    h5.witness = gap_d / scale_a;
  }
  an.hypotheses.push_back(h4);
  an.hypotheses.push_back(h5);
  return an;
}

}  // namespace perturbatrix
