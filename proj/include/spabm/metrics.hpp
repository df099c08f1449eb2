#pragma once

// Evaluation against ground truth.

#include "spabm/netcore.hpp"

#include <vector>

namespace spabm {

struct ClusteringError {
  // Proportion of misclustered nodes under the best label matching.
  double error = 0.0;
  // permutation[c] is the reference community matched to estimated community c.
  std::vector<int> permutation;
};

// Minimum-cost assignment on a square cost matrix (Hungarian method).
// Returns assignment[row] = column.
std::vector<int> min_cost_assignment(const Matrix& cost);

ClusteringError clustering_error(const Clustering& estimate, const Clustering& truth);

// n^-2 ||P_hat - P||_F^2, diagonal included.
double estimation_error(const Matrix& p_hat, const Matrix& p_true);

// Off-diagonal zeros of P_true estimated by values with |.| > zero_tol.
// Zero when P_true has no off-diagonal zero.
double false_positive_rate(const Matrix& p_hat, const Matrix& p_true, double zero_tol = 0.0);

// ||P_true restricted to {P_hat zero, P_true nonzero}||_F / ||P_true||_F,
// off-diagonal entries only.
double delta_fn(const Matrix& p_hat, const Matrix& p_true, double zero_tol = 0.0);

struct EvaluationReport {
  double clustering_error = 0.0;
  double estimation_error = 0.0;
  double rho_fp = 0.0;
  double delta_fn = 0.0;
  std::vector<int> matched_permutation;
};

EvaluationReport evaluate(const Clustering& estimate, const Clustering& truth, const Matrix& p_hat,
                          const Matrix& p_true, double zero_tol = 0.0);

}  // namespace spabm
