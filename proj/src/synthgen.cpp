#include "spabm/synthgen.hpp"

#include "spabm/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace spabm {

void GeneratorConfig::validate() const {
  if (n < 1) throw ConfigError("generator: n must be positive");
  if (k < 1 || k > n) throw ConfigError("generator: K must lie in [1, n]");
  if (!(sigma > 0.0 && sigma <= 1.0)) throw ConfigError("generator: sigma must lie in (0, 1]");
  if (!(omega >= 0.0 && omega <= 1.0)) throw ConfigError("generator: omega must lie in [0, 1]");
  if (balanced) {
    if (n % k != 0) throw ConfigError("generator: balanced communities need n divisible by K");
  } else {
    if (static_cast<int>(sizes.size()) != k) throw ConfigError("generator: need one size per community");
    if (std::any_of(sizes.begin(), sizes.end(), [](int s) { return s < 1; })) {
      throw ConfigError("generator: community sizes must be positive");
    }
    if (std::accumulate(sizes.begin(), sizes.end(), 0) != n) {
      throw ConfigError("generator: community sizes must sum to n");
    }
  }
}

std::vector<int> GeneratorConfig::community_sizes() const {
  if (balanced) return std::vector<int>(k, n / k);
  return sizes;
}

long long zeroed_entry_count(const GeneratorConfig& cfg) {
  const long long off = static_cast<long long>(cfg.n) * (cfg.k - 1);
  // floor(off * (1 - sigma)); the epsilon guards values like 0.7 that are
  // not exact in binary from truncating one entry too few.
  return static_cast<long long>(std::floor(static_cast<double>(off) * (1.0 - cfg.sigma) + 1e-9));
}

LambdaDraw generate_lambda(const GeneratorConfig& cfg) {
  Rng rng(cfg.seed);
  return generate_lambda(cfg, rng);
}

LambdaDraw generate_lambda(const GeneratorConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::vector<int> sizes = cfg.community_sizes();
  std::vector<int> labels;
  labels.reserve(cfg.n);
  for (int c = 0; c < cfg.k; ++c) labels.insert(labels.end(), sizes[c], c);
  Clustering sorted(std::move(labels), cfg.k);

  Matrix lam(cfg.n, cfg.k);
  for (int i = 0; i < cfg.n; ++i)
    for (int l = 0; l < cfg.k; ++l) lam(i, l) = rng.uniform();

  // Non-diagonal entries are (i, l) with l != community of i. Zero the
  // globally smallest ones, ties broken by row-major entry index.
  struct Entry {
    double value;
    int row;
    int col;
  };
  std::vector<Entry> off;
  off.reserve(static_cast<std::size_t>(cfg.n) * (cfg.k - 1));
  for (int i = 0; i < cfg.n; ++i)
    for (int l = 0; l < cfg.k; ++l)
      if (l != sorted.label(i)) off.push_back({lam(i, l), i, l});
  const auto zeros = static_cast<std::size_t>(zeroed_entry_count(cfg));
  std::stable_sort(off.begin(), off.end(), [](const Entry& a, const Entry& b) { return a.value < b.value; });
  for (std::size_t e = 0; e < off.size(); ++e) {
    if (e < zeros) {
      lam(off[e].row, off[e].col) = 0.0;
    } else {
      lam(off[e].row, off[e].col) *= cfg.omega;
    }
  }

  std::vector<IndexList> sets(static_cast<std::size_t>(cfg.k) * cfg.k);
  for (int a = 0; a < cfg.k; ++a) {
    const IndexList& rows = sorted.members(a);
    for (int l = 0; l < cfg.k; ++l)
      for (std::size_t r = 0; r < rows.size(); ++r)
        if (lam(rows[r], l) != 0.0) sets[a * cfg.k + l].push_back(static_cast<int>(r));
  }
  SupportFamily support(sizes, std::move(sets));
  return LambdaDraw{PopularityMatrix(std::move(lam), std::move(sorted)), std::move(support)};
}

AdjacencyMatrix sample_adjacency(const ProbabilityMatrix& p, Rng& rng) {
  const int n = p.n();
  Matrix a = Matrix::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      const double pij = p(i, j);
      // Always consume one draw so the stream layout does not depend on P.
      const double u = rng.uniform();
      if (u < pij) {
        a(i, j) = 1.0;
        a(j, i) = 1.0;
      }
    }
  }
  return AdjacencyMatrix(std::move(a));
}

SyntheticInstance generate_instance(const GeneratorConfig& cfg) {
  Rng rng(cfg.seed);
  LambdaDraw draw = generate_lambda(cfg, rng);
  const Clustering& sorted = draw.lambda.clustering();

  // Random assignment with the same community sizes: shuffle the sorted
  // label vector. Node i takes the popularity row of the sorted position it
  // lands on, in ascending order within its community.
  std::vector<int> labels = sorted.labels();
  rng.shuffle(std::span<int>(labels));
  Clustering z(std::move(labels), cfg.k);

  Matrix lam(cfg.n, cfg.k);
  for (int i = 0; i < cfg.n; ++i) lam.row(i) = draw.lambda.matrix().row(z.position(i));
  PopularityMatrix lambda(std::move(lam), z);

  ProbabilityMatrix p = probability_from_lambda(lambda);
  AdjacencyMatrix a = sample_adjacency(p, rng);
  return SyntheticInstance{std::move(lambda), std::move(z), std::move(p), std::move(a),
                           std::move(draw.true_support)};
}

}  // namespace spabm
