#include "spabm/ssc.hpp"

#include "spabm/error.hpp"
#include "spabm/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace spabm {

namespace {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

// Gradient of the smooth part at coordinate i, given q = G w.
double smooth_gradient(double q_i, double c_i, double w_i, double gamma2) {
  return q_i - c_i + 2.0 * gamma2 * w_i;
}

double kkt_violation(double g, double w, double gamma1) {
  if (w > 0.0) return std::abs(g + gamma1);
  if (w < 0.0) return std::abs(g - gamma1);
  return std::max(0.0, std::abs(g) - gamma1);
}

}  // namespace

AffinityMatrix::AffinityMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) throw DimensionError("affinity must be square");
  const Eigen::Index n = entries_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(entries_(i, j) >= 0.0)) throw DataError("affinity entries must be nonnegative");
      if (entries_(i, j) != entries_(j, i)) throw DataError("affinity must be symmetric");
    }
  }
}

double density(const AdjacencyMatrix& a) {
  const double n = a.n();
  if (a.n() < 2) throw DimensionError("density needs at least two nodes");
  return static_cast<double>(a.nonzeros()) / (n * (n - 1.0));
}

Gammas default_gammas(const AdjacencyMatrix& a) {
  const double rho = density(a);
  return {30.0 * rho, std::max(125.0 * (1.0 - rho), 1.0)};
}

ColumnSolution solve_elastic_net_column(const Matrix& gram, int column, double gamma1, double gamma2,
                                        const ElasticNetOptions& options,
                                        std::span<const int> coordinate_order, bool record_objective) {
  if (!(gamma2 > 0.0)) throw ConfigError("elastic net: gamma2 must be positive");
  if (!(gamma1 >= 0.0)) throw ConfigError("elastic net: gamma1 must be nonnegative");
  if (!(options.tol > 0.0)) throw ConfigError("elastic net: tol must be positive");
  const int n = static_cast<int>(gram.rows());
  if (column < 0 || column >= n) throw DimensionError("elastic net: column out of range");

  std::vector<int> coords;
  if (coordinate_order.empty()) {
    coords.resize(n);
    std::iota(coords.begin(), coords.end(), 0);
  } else {
    coords.assign(coordinate_order.begin(), coordinate_order.end());
    std::vector<int> check = coords;
    std::sort(check.begin(), check.end());
    bool permutation = static_cast<int>(check.size()) == n;
    for (int i = 0; permutation && i < n; ++i) permutation = check[i] == i;
    if (!permutation) throw ConfigError("elastic net: coordinate order must be a permutation");
  }
  std::erase(coords, column);

  const auto target = gram.col(column);
  ColumnSolution out;
  out.w = Vector::Zero(n);
  Vector& w = out.w;
  Vector q = Vector::Zero(n);

  auto objective = [&] {
    return 0.5 * (gram(column, column) - 2.0 * target.dot(w) + w.dot(q)) + gamma1 * w.lpNorm<1>() +
           gamma2 * w.squaredNorm();
  };
  auto update = [&](int i) {
    const double gii = gram(i, i);
    const double old = w(i);
    const double z = target(i) - q(i) + gii * old;
    const double fresh = soft_threshold(z, gamma1) / (gii + 2.0 * gamma2);
    const double delta = fresh - old;
    if (delta != 0.0) {
      w(i) = fresh;
      q.noalias() += delta * gram.col(i);
    }
    return std::abs(delta);
  };
  auto sweep = [&](const std::vector<int>& set) {
    double change = 0.0;
    for (int i : set) change = std::max(change, update(i));
    ++out.sweeps;
    if (record_objective) out.objective_trace.push_back(objective());
    return change;
  };
  auto refresh_and_check = [&] {
    q.setZero();
    for (int i : coords)
      if (w(i) != 0.0) q.noalias() += w(i) * gram.col(i);
    double worst = 0.0;
    for (int i : coords) worst = std::max(worst, kkt_violation(smooth_gradient(q(i), target(i), w(i), gamma2), w(i), gamma1));
    return worst;
  };

  std::vector<int> active;
  while (out.sweeps < options.max_iter) {
    if (sweep(coords) < options.tol) {
      out.kkt_residual = refresh_and_check();
      if (out.kkt_residual <= options.kkt_tol) {
        out.converged = true;
        return out;
      }
      continue;
    }
    active.clear();
    for (int i : coords)
      if (w(i) != 0.0) active.push_back(i);
    while (out.sweeps < options.max_iter) {
      if (sweep(active) < options.tol) break;
    }
  }
  out.kkt_residual = refresh_and_check();
  out.converged = out.kkt_residual <= options.kkt_tol;
  return out;
}

double elastic_net_objective(const Matrix& a, int column, const Vector& w, double gamma1, double gamma2) {
  const Vector r = a.col(column) - a * w;
  return 0.5 * r.squaredNorm() + gamma1 * w.lpNorm<1>() + gamma2 * w.squaredNorm();
}

double elastic_net_kkt_residual(const Matrix& a, int column, const Vector& w, double gamma1, double gamma2) {
  const Vector r = a.col(column) - a * w;
  const Vector g = -(a.transpose() * r) + 2.0 * gamma2 * w;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (i == column) continue;
    worst = std::max(worst, kkt_violation(g(i), w(i), gamma1));
  }
  return worst;
}

SelfRepresentation solve_self_representation(const AdjacencyMatrix& a, double gamma1, double gamma2,
                                             const ElasticNetOptions& options) {
  if (!(gamma2 > 0.0)) throw ConfigError("elastic net: gamma2 must be positive");
  const int n = a.n();
  const Matrix gram = a.matrix().transpose() * a.matrix();

  SelfRepresentation rep;
  rep.w = Matrix::Zero(n, n);
  rep.gamma1 = gamma1;
  rep.gamma2 = gamma2;
  rep.kkt_residual.assign(n, 0.0);
  rep.sweeps.assign(n, 0);
  std::vector<char> converged(n, 0);

  parallel_for(n, options.workers, [&](int j) {
    ColumnSolution col = solve_elastic_net_column(gram, j, gamma1, gamma2, options);
    rep.w.col(j) = col.w;
    rep.kkt_residual[j] = col.kkt_residual;
    rep.sweeps[j] = col.sweeps;
    converged[j] = col.converged ? 1 : 0;
  });

  for (int j = 0; j < n; ++j) {
    if (!converged[j]) {
      const double worst = *std::max_element(rep.kkt_residual.begin(), rep.kkt_residual.end());
      throw NumericalError("elastic net did not converge in " + std::to_string(options.max_iter) +
                           " sweeps (column " + std::to_string(j + 1) + ", worst KKT residual " +
                           std::to_string(worst) + ")");
    }
  }
  return rep;
}

AffinityMatrix affinity(const Matrix& w) {
  if (w.rows() != w.cols()) throw DimensionError("affinity: W must be square");
  Matrix s = w.cwiseAbs() + w.transpose().cwiseAbs();
  s.diagonal().setZero();
  return AffinityMatrix(std::move(s));
}

Matrix normalized_laplacian(const AffinityMatrix& s) {
  const Matrix& m = s.matrix();
  const Eigen::Index n = m.rows();
  Vector scale(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = m.row(i).sum();
    scale(i) = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
  }
  Matrix l = -(scale.asDiagonal() * m * scale.asDiagonal());
  l.diagonal().array() += 1.0;
  return l;
}

// ---------------------------------------------------------------- k-means

namespace {

int nearest_center(const Matrix& points, Eigen::Index p, const Matrix& centers, double* best_d2) {
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centers.rows(); ++c) {
    const double d = (points.row(p) - centers.row(c)).squaredNorm();
    if (d < best_dist) {
      best_dist = d;
      best = static_cast<int>(c);
    }
  }
  if (best_d2) *best_d2 = best_dist;
  return best;
}

// Recomputes centers from labels, refilling empty clusters. False when an
// empty cluster cannot be refilled.
bool update_centers(const Matrix& points, std::vector<int>& labels, Matrix& centers) {
  const Eigen::Index n = points.rows();
  const int k = static_cast<int>(centers.rows());
  auto recompute = [&](std::vector<int>& counts) {
    centers.setZero();
    counts.assign(k, 0);
    for (Eigen::Index p = 0; p < n; ++p) {
      centers.row(labels[p]) += points.row(p);
      ++counts[labels[p]];
    }
    for (int c = 0; c < k; ++c)
      if (counts[c] > 0) centers.row(c) /= counts[c];
  };
  std::vector<int> counts;
  recompute(counts);
  for (int c = 0; c < k; ++c) {
    if (counts[c] > 0) continue;
    Eigen::Index far = -1;
    double far_d = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      if (counts[labels[p]] < 2) continue;
      const double d = (points.row(p) - centers.row(labels[p])).squaredNorm();
      if (d > far_d && d > 1e-24) {
        far_d = d;
        far = p;
      }
    }
    if (far < 0) return false;
    labels[far] = c;
    recompute(counts);
  }
  return true;
}

}  // namespace

KMeansResult kmeans_plus_plus(const Matrix& points, int k, Rng& rng, int max_iter) {
  const Eigen::Index n = points.rows();
  if (k < 1 || k > n) throw ConfigError("k-means: K must lie in [1, n]");
  KMeansResult out;
  Matrix centers(k, points.cols());

  std::vector<double> d2(n);
  const auto first = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
  centers.row(0) = points.row(first);
  for (Eigen::Index p = 0; p < n; ++p) d2[p] = (points.row(p) - centers.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    Eigen::Index pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      pick = -1;
      for (Eigen::Index p = 0; p < n; ++p) {
        acc += d2[p];
        if (d2[p] > 0.0 && acc > target) {
          pick = p;
          break;
        }
      }
      if (pick < 0) {
        for (Eigen::Index p = n - 1; p >= 0; --p)
          if (d2[p] > 0.0) {
            pick = p;
            break;
          }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    centers.row(c) = points.row(pick);
    for (Eigen::Index p = 0; p < n; ++p) d2[p] = std::min(d2[p], (points.row(p) - centers.row(c)).squaredNorm());
  }

  std::vector<int>& labels = out.labels;
  labels.assign(n, 0);
  for (Eigen::Index p = 0; p < n; ++p) labels[p] = nearest_center(points, p, centers, nullptr);

  for (int iter = 0; iter < max_iter; ++iter) {
    if (!update_centers(points, labels, centers)) return out;
    bool changed = false;
    for (Eigen::Index p = 0; p < n; ++p) {
      const int c = nearest_center(points, p, centers, nullptr);
      if (c != labels[p]) {
        labels[p] = c;
        changed = true;
      }
    }
    if (!changed) break;
  }
  if (!update_centers(points, labels, centers)) return out;
  out.inertia = 0.0;
  for (Eigen::Index p = 0; p < n; ++p) out.inertia += (points.row(p) - centers.row(labels[p])).squaredNorm();
  out.valid = true;
  return out;
}

// ---------------------------------------------------------------- spectral

Clustering canonical_labels(const std::vector<int>& labels, int k) {
  std::vector<int> map(k, -1);
  std::vector<int> out(labels.size());
  int next = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int& m = map[labels[i]];
    if (m < 0) m = next++;
    out[i] = m;
  }
  return Clustering(std::move(out), k);
}

SpectralEmbedding::SpectralEmbedding(const AffinityMatrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(normalized_laplacian(s));
  if (solver.info() != Eigen::Success) throw NumericalError("normalized cut: eigendecomposition failed");
  values_ = solver.eigenvalues();
  vectors_ = solver.eigenvectors();
}

Matrix SpectralEmbedding::embed(int k, bool row_normalize) const {
  if (k < 1 || k > n()) throw ConfigError("spectral embedding: K must lie in [1, n]");
  Matrix x = vectors_.leftCols(k);
  if (row_normalize) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double norm = x.row(i).norm();
      if (norm > 0.0) x.row(i) /= norm;
    }
  }
  return x;
}

Clustering SpectralEmbedding::cluster(int k, std::uint64_t seed, const SpectralOptions& options) const {
  if (k < 1) throw ConfigError("normalized cut: K must be positive");
  if (k > n()) throw ConfigError("normalized cut: K exceeds the number of nodes");
  if (k == 1) return Clustering(std::vector<int>(n(), 0), 1);
  if (options.restarts < 1) throw ConfigError("normalized cut: need at least one restart");

  const Matrix points = embed(k, options.row_normalize);
  Rng rng(seed);
  KMeansResult best;
  for (int r = 0; r < options.restarts; ++r) {
    KMeansResult run = kmeans_plus_plus(points, k, rng, options.kmeans_max_iter);
    if (run.valid && (!best.valid || run.inertia < best.inertia)) best = std::move(run);
  }
  if (!best.valid) {
    throw NumericalError("normalized cut: every k-means restart left a community empty");
  }
  return canonical_labels(best.labels, k);
}

Clustering normalized_cut(const AffinityMatrix& s, int k, std::uint64_t seed, const SpectralOptions& options) {
  if (k < 1) throw ConfigError("normalized cut: K must be positive");
  if (k > s.n()) throw ConfigError("normalized cut: K exceeds the number of nodes");
  if (k == 1) return Clustering(std::vector<int>(s.n(), 0), 1);
  return SpectralEmbedding(s).cluster(k, seed, options);
}

double gamma1_null_threshold(const AdjacencyMatrix& a) {
  Matrix g = a.matrix().transpose() * a.matrix();
  g.diagonal().setZero();
  return g.cwiseAbs().maxCoeff();
}

Gammas resolve_gammas(const AdjacencyMatrix& a, const SscOptions& options) {
  Gammas g = default_gammas(a);
  if (options.gamma1_cap_fraction > 0.0)
    g.gamma1 = std::min(g.gamma1, options.gamma1_cap_fraction * gamma1_null_threshold(a));
  if (options.gamma1) g.gamma1 = *options.gamma1;
  if (options.gamma2) g.gamma2 = *options.gamma2;
  return g;
}

SpectralEmbedding embed_network(const AdjacencyMatrix& a, const SscOptions& options) {
  const Gammas g = resolve_gammas(a, options);
  const SelfRepresentation rep = solve_self_representation(a, g.gamma1, g.gamma2, options.elastic_net);
  return SpectralEmbedding(affinity(rep));
}

Clustering cluster_network(const AdjacencyMatrix& a, int k, std::uint64_t seed, const SscOptions& options) {
  if (k < 1) throw ConfigError("cluster_network: K must be positive");
  if (k > a.n()) throw ConfigError("cluster_network: K exceeds the number of nodes");
  return embed_network(a, options).cluster(k, seed, options.spectral);
}

}  // namespace spabm
