#pragma once

// Synthetic SPABM instances with controllable sparsity and heterogeneity.

#include "spabm/netcore.hpp"
#include "spabm/random.hpp"

#include <cstdint>
#include <vector>

namespace spabm {

struct GeneratorConfig {
  int n = 300;
  int k = 4;
  // Proportion of nonzero non-diagonal popularity entries, in (0, 1].
  double sigma = 0.5;
  // Multiplier applied to non-diagonal blocks of the popularity matrix, in [0, 1].
  double omega = 0.8;
  std::uint64_t seed = 1;
  bool balanced = true;
  // Community sizes when balanced == false; must sum to n.
  std::vector<int> sizes;

  void validate() const;
  std::vector<int> community_sizes() const;
};

struct LambdaDraw {
  // Rows in community-sorted order (community 0 first).
  PopularityMatrix lambda;
  SupportFamily true_support;
};

struct SyntheticInstance {
  // All matrices in original (scrambled) node order.
  PopularityMatrix lambda;
  Clustering clustering;
  ProbabilityMatrix probability;
  AdjacencyMatrix adjacency;
  SupportFamily true_support;
};

// Number of non-diagonal popularity entries zeroed for this config.
long long zeroed_entry_count(const GeneratorConfig& cfg);

LambdaDraw generate_lambda(const GeneratorConfig& cfg);
LambdaDraw generate_lambda(const GeneratorConfig& cfg, Rng& rng);

SyntheticInstance generate_instance(const GeneratorConfig& cfg);

// Lower triangle drawn entrywise, mirrored; zero diagonal.
AdjacencyMatrix sample_adjacency(const ProbabilityMatrix& p, Rng& rng);

}  // namespace spabm
