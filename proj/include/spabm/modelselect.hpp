#pragma once

// Choice of the number of communities by penalized fit:
//   K_hat = argmin_K ||P_hat_K - A||_F^2 + Pen(n, J_hat_K, K).

#include "spabm/estimator.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace spabm {

struct CandidateScore {
  int k = 0;
  bool ok = false;
  double residual = 0.0;
  double penalty = 0.0;
  double score = 0.0;
  // Set when the fit at this K failed.
  std::string failure;
};

struct SelectionResult {
  int k_hat = 0;
  // One entry per candidate, in k_range order.
  std::vector<CandidateScore> scores;
  // Parallel to scores; empty optional for failed candidates.
  std::vector<std::optional<FitResult>> fits;

  const CandidateScore& score_of(int k) const;
};

// {2, ..., min(10, floor(n/10))}; empty when n < 20.
std::vector<int> default_k_range(int n);

// ||P_hat - A||_F^2 over all entries, diagonal included.
double fit_residual(const AdjacencyMatrix& a, const ProbabilityMatrix& p_hat);

SelectionResult select_k(const AdjacencyMatrix& a, const std::vector<int>& k_range, const PenaltyParams& params,
                         std::uint64_t seed, const SscOptions& options = {});

}  // namespace spabm
