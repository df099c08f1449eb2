#pragma once

// Rank-one block estimation of the connection-probability matrix, the
// support-complexity penalties, and the penalized fit criterion.

#include "spabm/netcore.hpp"
#include "spabm/ssc.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace spabm {

struct RankOneFactor {
  Vector u;
  Vector v;
  double sigma = 0.0;
};

struct RankOneApprox {
  RankOneFactor factor;
  // sigma * u * v^T
  Matrix matrix;
  int iterations = 0;
};

// Best Frobenius rank-one approximation from the leading singular triple.
// Power iteration on the smaller Gram matrix from a deterministic start;
// closed forms when either dimension is 1 or 2.
RankOneApprox rank_one_approx(const Matrix& m, double tol = 1e-13, int max_iter = 200000);

enum class PenaltyVariant { separable, nonseparable, empirical };

std::string_view to_string(PenaltyVariant v);
PenaltyVariant parse_penalty_variant(std::string_view name);

struct PenaltyParams {
  double beta1 = 1.0;
  double beta2 = 1.0;
  PenaltyVariant variant = PenaltyVariant::empirical;

  void validate() const;
};

// Cardinalities |J_{k,l}| in row-major K x K order.
struct SupportCounts {
  int k = 0;
  std::vector<long long> counts;

  static SupportCounts of(const SupportFamily& j);
  long long at(int a, int b) const { return counts[static_cast<std::size_t>(a) * k + b]; }
  long long total() const;
};

// Pen^(0): the part of the theoretical penalties that depends on supports
// and community sizes. Zero for the empirical variant.
double penalty_support_part(int n, std::span<const int> sizes, const SupportCounts& j, const PenaltyParams& params);

// Full penalty. `density` is only used by the empirical variant.
double penalty(int n, std::span<const int> sizes, const SupportCounts& j, const PenaltyParams& params,
               double density);

struct BlockEstimate {
  Clustering clustering;
  SupportFamily support;
  // K x K blocks in row-major order; block (l,k) is the transpose of (k,l).
  std::vector<Matrix> blocks;
  // Entries of the assembled estimate that had to be clipped into [0,1].
  long long clipped = 0;

  const Matrix& block(int k, int l) const { return blocks[static_cast<std::size_t>(k) * clustering.k() + l]; }
};

BlockEstimate estimate_theta(const AdjacencyMatrix& a, const Clustering& z, const SupportFamily& j);

// Undoes the rearrangement and clips into [0, 1].
ProbabilityMatrix assemble_p(const BlockEstimate& est);

// Sum over all K^2 blocks of ||A^{(k,l)} - Pi_1(Pi_J(A^{(k,l)}))||_F^2.
double block_residual(const AdjacencyMatrix& a, const Clustering& z, const SupportFamily& j);

// Residual plus penalty.
double objective(const AdjacencyMatrix& a, const Clustering& z, const SupportFamily& j, const PenaltyParams& params);

struct FitResult {
  Clustering clustering;
  SupportFamily support;
  BlockEstimate estimate;
  ProbabilityMatrix probability;
};

// Given a clustering: supports from nonzero rows, rank-one blocks, estimate.
FitResult fit_with_clustering(const AdjacencyMatrix& a, const Clustering& z);

FitResult fit(const AdjacencyMatrix& a, int k, std::uint64_t seed, const SscOptions& options = {});

}  // namespace spabm
