#pragma once

// Exhaustive solvers for toy instances, used as ground truth by the tests.
// Every quantity here is computed along a separate code path from the
// estimator: blocks are gathered by direct label scans, rank-one fits come
// from a full SVD, and the penalties are re-derived from their formulas.

#include "spabm/estimator.hpp"
#include "spabm/netcore.hpp"

#include <vector>

namespace spabm::oracle {

struct Candidate {
  std::vector<int> labels;
  double objective = 0.0;
};

struct ExactSolution {
  Clustering best_clustering;
  SupportFamily best_support;
  double best_objective = 0.0;
  long long enumeration_count = 0;
  // Every evaluated clustering, when requested.
  std::vector<Candidate> candidates;
};

// Residual plus penalty, evaluated independently of the estimator.
double evaluate_objective(const AdjacencyMatrix& a, const Clustering& z, const SupportFamily& j,
                          const PenaltyParams& params);

// Residual only.
double evaluate_residual(const AdjacencyMatrix& a, const Clustering& z, const SupportFamily& j);

// Nonzero-row supports, by direct scan.
SupportFamily nonzero_rows(const AdjacencyMatrix& a, const Clustering& z);

// Minimizes the fit criterion over every clustering into exactly K nonempty
// communities (canonical labelings: node 0 in community 0, first
// appearances in increasing order), with J set to the nonzero-row supports.
// Ties go to the lexicographically smallest labeling. Throws ConfigError
// when K^n / K! exceeds 1e6.
ExactSolution exact_clustering_search(const AdjacencyMatrix& a, int k, const PenaltyParams& params,
                                      bool record_candidates = false);

struct SupportSolution {
  SupportFamily support;
  double objective = 0.0;
  long long enumeration_count = 0;
};

// Minimizes residual + Pen^(0) over every family of row sets for a fixed
// clustering. Ties go to the smaller total support, then to the first family
// in enumeration order. Throws ConfigError when K * n exceeds 16.
SupportSolution exact_support_search(const AdjacencyMatrix& a, const Clustering& z, const PenaltyParams& params);

// (2n)^-1 min over label permutations of ||Z P - Z_ref||_1, by enumeration
// of all K! permutations. Throws ConfigError for K > 8.
double exact_permutation_match(const Clustering& z, const Clustering& z_ref);

}  // namespace spabm::oracle
