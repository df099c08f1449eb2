#include "spabm/modelselect.hpp"

#include "spabm/error.hpp"

#include <algorithm>
#include <iostream>

namespace spabm {

const CandidateScore& SelectionResult::score_of(int k) const {
  for (const auto& s : scores)
    if (s.k == k) return s;
  throw ConfigError("no score recorded for K=" + std::to_string(k));
}

std::vector<int> default_k_range(int n) {
  std::vector<int> out;
  for (int k = 2; k <= std::min(10, n / 10); ++k) out.push_back(k);
  return out;
}

double fit_residual(const AdjacencyMatrix& a, const ProbabilityMatrix& p_hat) {
  if (a.n() != p_hat.n()) throw DimensionError("fit_residual: dimension mismatch");
  return (p_hat.matrix() - a.matrix()).squaredNorm();
}

SelectionResult select_k(const AdjacencyMatrix& a, const std::vector<int>& k_range, const PenaltyParams& params,
                         std::uint64_t seed, const SscOptions& options) {
  if (k_range.empty()) throw ConfigError("select_k: empty K range");
  for (int k : k_range)
    if (k < 1 || k > a.n()) throw ConfigError("select_k: K=" + std::to_string(k) + " outside [1, n]");
  if (params.variant != PenaltyVariant::empirical) params.validate();

  // The self-representation and the Laplacian spectrum do not depend on K.
  const SpectralEmbedding embedding = embed_network(a, options);
  const double rho = density(a);

  SelectionResult out;
  out.scores.reserve(k_range.size());
  out.fits.reserve(k_range.size());
  for (int k : k_range) {
    CandidateScore s;
    s.k = k;
    try {
      FitResult f = fit_with_clustering(a, embedding.cluster(k, seed, options.spectral));
      const std::vector<int> sizes = f.clustering.sizes();
      s.residual = fit_residual(a, f.probability);
      s.penalty = penalty(a.n(), sizes, SupportCounts::of(f.support), params, rho);
      s.score = s.residual + s.penalty;
      s.ok = true;
      out.fits.emplace_back(std::move(f));
    } catch (const Error& e) {
      s.failure = e.what();
      std::cerr << "warning: select_k skipped K=" << k << ": " << e.what() << '\n';
      out.fits.emplace_back(std::nullopt);
    }
    out.scores.push_back(std::move(s));
  }

  const CandidateScore* best = nullptr;
  for (const auto& s : out.scores) {
    if (!s.ok) continue;
    // Ties go to the smaller K.
    if (!best || s.score < best->score || (s.score == best->score && s.k < best->k)) best = &s;
  }
  if (!best) throw NumericalError("select_k: every candidate K failed");
  out.k_hat = best->k;
  return out;
}

}  // namespace spabm
