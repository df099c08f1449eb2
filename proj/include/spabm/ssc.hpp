#pragma once

// Sparse subspace clustering of network nodes: elastic-net
// self-representation of adjacency columns, symmetric affinity, and
// normalized-cut spectral clustering.

#include "spabm/netcore.hpp"
#include "spabm/random.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace spabm {

struct Gammas {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
};

struct ElasticNetOptions {
  // Stop when the largest coordinate change of a full sweep is below tol...
  double tol = 1e-7;
  // ...and every KKT condition holds to within kkt_tol.
  double kkt_tol = 1e-6;
  // Sweeps per column.
  int max_iter = 10000;
  int workers = 1;
};

struct SpectralOptions {
  int restarts = 20;
  int kmeans_max_iter = 300;
  bool row_normalize = true;
};

struct SscOptions {
  // Unset means the density-based defaults.
  std::optional<double> gamma1;
  std::optional<double> gamma2;
  // The default gamma1 is capped at this fraction of the largest
  // off-diagonal Gram entry, above which every column represents as zero.
  // Zero disables the cap. Ignored when gamma1 is set.
  double gamma1_cap_fraction = 0.5;
  ElasticNetOptions elastic_net;
  SpectralOptions spectral;
};

struct SelfRepresentation {
  Matrix w;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  std::vector<double> kkt_residual;
  std::vector<int> sweeps;
};

class AffinityMatrix {
 public:
  explicit AffinityMatrix(Matrix entries);
  int n() const { return static_cast<int>(entries_.rows()); }
  const Matrix& matrix() const { return entries_; }

 private:
  Matrix entries_;
};

// Off-diagonal density: nonzero entries over n(n-1).
double density(const AdjacencyMatrix& a);

// (30 rho, max(125 (1 - rho), 1)).
Gammas default_gammas(const AdjacencyMatrix& a);

// One column of the self-representation problem, expressed through the Gram
// matrix G = A^T A: minimizes
//   1/2 ||A_j - A w||^2 + gamma1 ||w||_1 + gamma2 ||w||^2,   w_j = 0.
struct ColumnSolution {
  Vector w;
  double kkt_residual = 0.0;
  int sweeps = 0;
  bool converged = false;
  // Objective after every sweep, filled when requested.
  std::vector<double> objective_trace;
};

ColumnSolution solve_elastic_net_column(const Matrix& gram, int column, double gamma1, double gamma2,
                                        const ElasticNetOptions& options,
                                        std::span<const int> coordinate_order = {},
                                        bool record_objective = false);

// Objective of column j evaluated directly from A.
double elastic_net_objective(const Matrix& a, int column, const Vector& w, double gamma1, double gamma2);

// Largest KKT violation of w for column j, evaluated directly from A.
double elastic_net_kkt_residual(const Matrix& a, int column, const Vector& w, double gamma1, double gamma2);

SelfRepresentation solve_self_representation(const AdjacencyMatrix& a, double gamma1, double gamma2,
                                             const ElasticNetOptions& options = {});

// |W| + |W^T| with the diagonal cleared.
AffinityMatrix affinity(const Matrix& w);
inline AffinityMatrix affinity(const SelfRepresentation& rep) { return affinity(rep.w); }

// I - D^{-1/2} S D^{-1/2}; rows with zero degree get a unit diagonal.
Matrix normalized_laplacian(const AffinityMatrix& s);

struct KMeansResult {
  std::vector<int> labels;
  double inertia = 0.0;
  bool valid = false;
};

// Lloyd iterations from a k-means++ seeding. Ties in the nearest-center
// search go to the lowest center index. Empty clusters are refilled with
// the point farthest from its center; if that is impossible the result is
// marked invalid.
KMeansResult kmeans_plus_plus(const Matrix& points, int k, Rng& rng, int max_iter);

// Eigendecomposition of the normalized Laplacian, computed once and reused
// for any number of clusters.
class SpectralEmbedding {
 public:
  explicit SpectralEmbedding(const AffinityMatrix& s);

  int n() const { return static_cast<int>(vectors_.rows()); }
  // Ascending.
  const Vector& eigenvalues() const { return values_; }
  // First k eigenvectors, rows optionally scaled to unit length.
  Matrix embed(int k, bool row_normalize) const;
  Clustering cluster(int k, std::uint64_t seed, const SpectralOptions& options = {}) const;

 private:
  Vector values_;
  Matrix vectors_;
};

Clustering normalized_cut(const AffinityMatrix& s, int k, std::uint64_t seed,
                          const SpectralOptions& options = {});

// Relabels clusters in order of first appearance (node 0 is in community 0).
Clustering canonical_labels(const std::vector<int>& labels, int k);

// max_{i != j} |(A^T A)_{ij}|: for gamma1 at or above it the
// self-representation is identically zero.
double gamma1_null_threshold(const AdjacencyMatrix& a);

// Defaults, cap, then explicit overrides.
Gammas resolve_gammas(const AdjacencyMatrix& a, const SscOptions& options);

// Self-representation and embedding, the K-independent part of the pipeline.
SpectralEmbedding embed_network(const AdjacencyMatrix& a, const SscOptions& options = {});

Clustering cluster_network(const AdjacencyMatrix& a, int k, std::uint64_t seed, const SscOptions& options = {});

}  // namespace spabm
