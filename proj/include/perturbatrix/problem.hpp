#pragma once

#include <string>
#include <vector>

#include "perturbatrix/cyclicity.hpp"
#include "perturbatrix/sectorial.hpp"

namespace perturbatrix {

/// The family A + gamma B with A Hermitian and B sectorial.
struct Problem {
  MatrixC a;
  MatrixC b;

  Index dimension() const { return a.rows(); }
  MatrixC at(cplx gamma) const { return a + gamma * b; }
};

struct HypothesisCheck {
  std::string name;
  bool pass = false;
  double witness = 0.0;  // smallest relative gap or residual that decided the check
  std::string detail;
};

/// Spectral data needed by the tracing and classification code.
struct ProblemAnalysis {
  Problem problem;
  SectorialDecomposition sector;
  bool cyclic = false;
  VectorR alpha;           // eigenvalues of A, ascending
  MatrixC alpha_vectors;   // matching eigenvectors
  VectorC beta;            // non-zero eigenvalues of B, ascending |beta| then arg
  VectorR delta;           // eigenvalues of A truncated to Ker(B), ascending
  double norm_a = 0.0;
  double norm_b = 0.0;
  std::vector<HypothesisCheck> hypotheses;

  Index rank() const { return beta.size(); }
  bool hypotheses_hold() const;
  const HypothesisCheck* find(const std::string& name) const;
};

struct AnalysisOptions {
  double gap_tol = 1e-10;  // relative gap below which eigenvalues count as repeated
};

/// Runs the sectorial and cyclicity analyses and checks H1-H5. Throws only for malformed
/// input (DimensionMismatch, non-finite entries); hypothesis failures are recorded.
ProblemAnalysis analyze_problem(const Problem& problem, const AnalysisOptions& opt = {});

/// Orders complex numbers by modulus, then argument.
void sort_by_modulus_then_arg(VectorC& v);

}  // namespace perturbatrix
