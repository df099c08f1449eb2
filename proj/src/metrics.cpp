#include "spabm/metrics.hpp"

#include "spabm/error.hpp"

#include <cmath>
#include <limits>

namespace spabm {

std::vector<int> min_cost_assignment(const Matrix& cost) {
  if (cost.rows() != cost.cols()) throw DimensionError("assignment: cost matrix must be square");
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  // Potentials formulation, 1-based internally; column 0 is a sentinel.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int row = 1; row <= n; ++row) {
    match[0] = row;
    int col0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[col0] = 1;
      const int r = match[col0];
      double delta = inf;
      int col1 = 0;
      for (int c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double cur = cost(r - 1, c - 1) - u[r] - v[c];
        if (cur < minv[c]) {
          minv[c] = cur;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = c;
        }
      }
      for (int c = 0; c <= n; ++c) {
        if (used[c]) {
          u[match[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const int col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int c = 1; c <= n; ++c)
    if (match[c] > 0) assignment[match[c] - 1] = c - 1;
  return assignment;
}

ClusteringError clustering_error(const Clustering& estimate, const Clustering& truth) {
  if (estimate.n() != truth.n()) throw DimensionError("clustering_error: different node counts");
  if (estimate.k() != truth.k()) throw DimensionError("clustering_error: different community counts");
  const int k = estimate.k();
  // Confusion counts; maximizing matches == minimizing negated counts.
  Matrix cost = Matrix::Zero(k, k);
  for (int i = 0; i < estimate.n(); ++i) cost(estimate.label(i), truth.label(i)) -= 1.0;
  ClusteringError out;
  out.permutation = min_cost_assignment(cost);
  long long matched = 0;
  for (int c = 0; c < k; ++c) matched -= static_cast<long long>(cost(c, out.permutation[c]));
  out.error = static_cast<double>(estimate.n() - matched) / estimate.n();
  return out;
}

namespace {

void require_same(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw DimensionError(std::string(what) + ": matrices must be square with equal size");
  }
}

}  // namespace

double estimation_error(const Matrix& p_hat, const Matrix& p_true) {
  require_same(p_hat, p_true, "estimation_error");
  const double n = static_cast<double>(p_true.rows());
  return (p_hat - p_true).squaredNorm() / (n * n);
}

double false_positive_rate(const Matrix& p_hat, const Matrix& p_true, double zero_tol) {
  require_same(p_hat, p_true, "false_positive_rate");
  long long zeros = 0;
  long long positives = 0;
  for (Eigen::Index j = 0; j < p_true.cols(); ++j) {
    for (Eigen::Index i = 0; i < p_true.rows(); ++i) {
      if (i == j || p_true(i, j) != 0.0) continue;
      ++zeros;
      if (std::abs(p_hat(i, j)) > zero_tol) ++positives;
    }
  }
  return zeros == 0 ? 0.0 : static_cast<double>(positives) / static_cast<double>(zeros);
}

double delta_fn(const Matrix& p_hat, const Matrix& p_true, double zero_tol) {
  require_same(p_hat, p_true, "delta_fn");
  double missed = 0.0;
  double total = 0.0;
  for (Eigen::Index j = 0; j < p_true.cols(); ++j) {
    for (Eigen::Index i = 0; i < p_true.rows(); ++i) {
      if (i == j) continue;
      const double t = p_true(i, j);
      total += t * t;
      if (t != 0.0 && std::abs(p_hat(i, j)) <= zero_tol) missed += t * t;
    }
  }
  if (total == 0.0) throw DataError("delta_fn: reference matrix has no off-diagonal mass");
  return std::sqrt(missed / total);
}

EvaluationReport evaluate(const Clustering& estimate, const Clustering& truth, const Matrix& p_hat,
                          const Matrix& p_true, double zero_tol) {
  EvaluationReport r;
  ClusteringError ce = clustering_error(estimate, truth);
  r.clustering_error = ce.error;
  r.matched_permutation = std::move(ce.permutation);
  r.estimation_error = estimation_error(p_hat, p_true);
  r.rho_fp = false_positive_rate(p_hat, p_true, zero_tol);
  r.delta_fn = delta_fn(p_hat, p_true, zero_tol);
  return r;
}

}  // namespace spabm
