#include "spabm/estimator.hpp"

#include "spabm/error.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace spabm {

// ---------------------------------------------------------------- rank one

namespace {

// Leading unit eigenvector of a symmetric 2x2 PSD matrix.
Vector leading_eigvec_2x2(double a, double b, double d) {
  Vector x(2);
  if (b == 0.0) {
    x << (a >= d ? 1.0 : 0.0), (a >= d ? 0.0 : 1.0);
    return x;
  }
  const double half = 0.5 * (a - d);
  const double lambda = 0.5 * (a + d) + std::hypot(half, b);
  // Two algebraically equivalent choices; take the one with the larger norm.
  Vector p(2), q(2);
  p << b, lambda - a;
  q << lambda - d, b;
  x = p.norm() >= q.norm() ? p : q;
  return x / x.norm();
}

struct PowerResult {
  Vector x;
  int iterations = 0;
  bool converged = false;
};

PowerResult power_iterate(const Matrix& gram, Vector x, double tol, int max_iter) {
  PowerResult out;
  for (int it = 1; it <= max_iter; ++it) {
    Vector y = gram * x;
    const double norm = y.norm();
    if (norm == 0.0) {
      out.x = std::move(x);
      out.iterations = it;
      out.converged = true;
      return out;
    }
    y /= norm;
    const double change = (y - x).norm();
    x = std::move(y);
    if (change <= tol) {
      out.x = std::move(x);
      out.iterations = it;
      out.converged = true;
      return out;
    }
  }
  out.x = std::move(x);
  out.iterations = max_iter;
  return out;
}

// Start vector: normalized all-ones, or the first canonical vector that the
// Gram matrix does not annihilate.
Vector start_vector(const Matrix& gram) {
  const Eigen::Index d = gram.rows();
  Vector x = Vector::Ones(d) / std::sqrt(static_cast<double>(d));
  if ((gram * x).norm() > 0.0) return x;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (gram.col(i).norm() > 0.0) return Vector::Unit(d, i);
  }
  return x;
}

// Leading right singular vector of m (unit), via the smaller Gram matrix.
Vector leading_right_vector(const Matrix& m, double tol, int max_iter, int* iterations) {
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  *iterations = 0;
  if (cols == 1) return Vector::Ones(1);
  if (rows == 1) return m.row(0).transpose() / m.row(0).norm();
  if (cols == 2) {
    const Matrix g = m.transpose() * m;
    return leading_eigvec_2x2(g(0, 0), g(0, 1), g(1, 1));
  }
  if (rows == 2) {
    const Matrix g = m * m.transpose();
    const Vector u = leading_eigvec_2x2(g(0, 0), g(0, 1), g(1, 1));
    const Vector v = m.transpose() * u;
    return v / v.norm();
  }
  const bool right = cols <= rows;
  const Matrix gram = right ? Matrix(m.transpose() * m) : Matrix(m * m.transpose());
  Vector start = start_vector(gram);
  PowerResult pr = power_iterate(gram, start, tol, max_iter);
  *iterations = pr.iterations;
  if (!pr.converged) {
    // Perturbed restart: deterministic alternating tilt.
    for (Eigen::Index i = 0; i < start.size(); ++i) start(i) *= 1.0 + 0.25 * ((i % 2 == 0) ? 1.0 : -1.0);
    start /= start.norm();
    pr = power_iterate(gram, start, tol, max_iter);
    *iterations += pr.iterations;
    if (!pr.converged) {
      throw NumericalError("rank_one_approx: power iteration did not converge on a " + std::to_string(rows) +
                           "x" + std::to_string(cols) + " block");
    }
  }
  if (right) return pr.x;
  const Vector v = m.transpose() * pr.x;
  return v / v.norm();
}

}  // namespace

RankOneApprox rank_one_approx(const Matrix& m, double tol, int max_iter) {
  if (!m.allFinite()) throw DataError("rank_one_approx: matrix has non-finite entries");
  RankOneApprox out;
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  out.matrix = Matrix::Zero(rows, cols);
  out.factor.u = rows > 0 ? Vector::Unit(rows, 0) : Vector();
  out.factor.v = cols > 0 ? Vector::Unit(cols, 0) : Vector();
  if (rows == 0 || cols == 0 || m.squaredNorm() == 0.0) return out;

  Vector v = leading_right_vector(m, tol, max_iter, &out.iterations);
  Vector mv = m * v;
  const double sigma = mv.norm();
  if (sigma == 0.0) return out;
  if (v.sum() < 0.0) {
    v = -v;
    mv = -mv;
  }
  out.factor.sigma = sigma;
  out.factor.u = mv / sigma;
  out.factor.v = v;
  // sigma u v^T == (M v) v^T; rows of M that are zero stay exactly zero.
  out.matrix.noalias() = mv * v.transpose();
  return out;
}

// ---------------------------------------------------------------- penalties

std::string_view to_string(PenaltyVariant v) {
  switch (v) {
    case PenaltyVariant::separable:
      return "separable";
    case PenaltyVariant::nonseparable:
      return "nonseparable";
    case PenaltyVariant::empirical:
      return "empirical";
  }
  return "empirical";
}

PenaltyVariant parse_penalty_variant(std::string_view name) {
  if (name == "separable") return PenaltyVariant::separable;
  if (name == "nonseparable") return PenaltyVariant::nonseparable;
  if (name == "empirical") return PenaltyVariant::empirical;
  throw ConfigError("unknown penalty variant '" + std::string(name) + "'");
}

void PenaltyParams::validate() const {
  if (!(beta1 > 0.0) || !(beta2 > 0.0)) throw ConfigError("penalty: beta1 and beta2 must be positive");
}

SupportCounts SupportCounts::of(const SupportFamily& j) {
  SupportCounts out;
  out.k = j.k();
  out.counts.resize(static_cast<std::size_t>(out.k) * out.k);
  for (int a = 0; a < out.k; ++a)
    for (int b = 0; b < out.k; ++b) out.counts[static_cast<std::size_t>(a) * out.k + b] = j.count(a, b);
  return out;
}

long long SupportCounts::total() const { return std::accumulate(counts.begin(), counts.end(), 0LL); }

namespace {

// x ln(c e / x), zero at x = 0.
double entropy_term(double x, double c) { return x > 0.0 ? x * std::log(c * std::exp(1.0) / x) : 0.0; }

void check_penalty_inputs(int n, std::span<const int> sizes, const SupportCounts& j) {
  const int k = static_cast<int>(sizes.size());
  if (n < 1 || k < 1) throw ConfigError("penalty: n and K must be positive");
  if (std::accumulate(sizes.begin(), sizes.end(), 0LL) != n) throw ConfigError("penalty: sizes must sum to n");
  if (j.k != k || j.counts.size() != static_cast<std::size_t>(k) * k) {
    throw ConfigError("penalty: support counts must be K x K");
  }
  for (int a = 0; a < k; ++a) {
    if (sizes[a] < 1) throw ConfigError("penalty: community sizes must be positive");
    for (int b = 0; b < k; ++b) {
      if (j.at(a, b) < 0 || j.at(a, b) > sizes[a]) throw ConfigError("penalty: |J_{k,l}| outside [0, n_k]");
    }
  }
}

}  // namespace

double penalty_support_part(int n, std::span<const int> sizes, const SupportCounts& j, const PenaltyParams& params) {
  check_penalty_inputs(n, sizes, j);
  const int k = static_cast<int>(sizes.size());
  switch (params.variant) {
    case PenaltyVariant::separable: {
      double support = 0.0;
      double logs = 0.0;
      for (int a = 0; a < k; ++a) {
        logs += std::log(static_cast<double>(sizes[a]));
        for (int b = 0; b < k; ++b) support += entropy_term(static_cast<double>(j.at(a, b)), sizes[a]);
      }
      return params.beta1 * support + params.beta2 * k * logs;
    }
    case PenaltyVariant::nonseparable:
      return params.beta1 * entropy_term(static_cast<double>(j.total()), static_cast<double>(n) * k) +
             2.0 * params.beta2 * std::log(static_cast<double>(n));
    case PenaltyVariant::empirical:
      return 0.0;
  }
  return 0.0;
}

double penalty(int n, std::span<const int> sizes, const SupportCounts& j, const PenaltyParams& params,
               double density) {
  const double k = static_cast<double>(sizes.size());
  const double dn = static_cast<double>(n);
  if (params.variant == PenaltyVariant::empirical) {
    check_penalty_inputs(n, sizes, j);
    const double lk = std::log(k);
    return density * dn * k * std::sqrt(std::log(dn) * lk * lk * lk);
  }
  params.validate();
  return penalty_support_part(n, sizes, j, params) + params.beta2 * (dn * std::log(k) + std::log(dn));
}

// ---------------------------------------------------------------- estimation

namespace {

void require_consistent(const AdjacencyMatrix& a, const Clustering& z, const SupportFamily& j) {
  if (a.n() != z.n()) throw DimensionError("adjacency and clustering disagree on n");
  if (j.sizes() != z.sizes()) throw DimensionError("support family does not match the clustering");
}

// lambda v v^T for the eigenvalue of largest magnitude, positive on ties,
// computed on the support rows only so that entries outside stay exactly 0.
// A general rank-one fit of a symmetric matrix need not be symmetric when
// the leading singular value is repeated.
Matrix symmetric_rank_one(const Matrix& m, const IndexList& support) {
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  const Eigen::Index s = static_cast<Eigen::Index>(support.size());
  if (s == 0) return out;
  Matrix sub(s, s);
  for (Eigen::Index r = 0; r < s; ++r)
    for (Eigen::Index c = 0; c < s; ++c) sub(r, c) = m(support[r], support[c]);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sub);
  if (eig.info() != Eigen::Success) throw NumericalError("symmetric rank-one fit: eigendecomposition failed");
  const Vector& values = eig.eigenvalues();
  const double top = values(s - 1);
  const bool negative = -values(0) > top * (1.0 + 1e-12) + 1e-300;
  const Eigen::Index pick = negative ? 0 : s - 1;
  const Vector v = eig.eigenvectors().col(pick);
  const Matrix outer = v * v.transpose();
  for (Eigen::Index r = 0; r < s; ++r)
    for (Eigen::Index c = 0; c < s; ++c) out(support[r], support[c]) = values(pick) * outer(r, c);
  return out;
}

// Rank-one fit of the projected block (k,l), k <= l.
Matrix fit_block(const Matrix& a, const Clustering& z, const SupportFamily& j, int k, int l, Matrix* raw_block) {
  Matrix blk = block(a, z, k, l).materialize();
  const Matrix projected = project_support(blk, j.block_rows(k, l), j.block_cols(k, l));
  Matrix theta = k == l ? symmetric_rank_one(projected, j.block_rows(k, l)) : rank_one_approx(projected).matrix;
  if (raw_block) *raw_block = std::move(blk);
  return theta;
}

}  // namespace

BlockEstimate estimate_theta(const AdjacencyMatrix& a, const Clustering& z, const SupportFamily& j) {
  require_consistent(a, z, j);
  const int k = z.k();
  BlockEstimate est{z, j, std::vector<Matrix>(static_cast<std::size_t>(k) * k), 0};
  for (int p = 0; p < k; ++p) {
    for (int q = p; q < k; ++q) {
      Matrix theta = fit_block(a.matrix(), z, j, p, q, nullptr);
      const long long outside = (theta.array() < 0.0).count() + (theta.array() > 1.0).count();
      est.clipped += p == q ? outside : 2 * outside;
      if (p != q) est.blocks[static_cast<std::size_t>(q) * k + p] = theta.transpose();
      est.blocks[static_cast<std::size_t>(p) * k + q] = std::move(theta);
    }
  }
  return est;
}

ProbabilityMatrix assemble_p(const BlockEstimate& est) {
  const Clustering& z = est.clustering;
  Matrix p(z.n(), z.n());
  for (int a = 0; a < z.k(); ++a)
    for (int b = 0; b < z.k(); ++b) scatter_block(p, z, a, b, est.block(a, b));
  return ProbabilityMatrix(p.cwiseMax(0.0).cwiseMin(1.0));
}

double block_residual(const AdjacencyMatrix& a, const Clustering& z, const SupportFamily& j) {
  require_consistent(a, z, j);
  double total = 0.0;
  for (int p = 0; p < z.k(); ++p) {
    for (int q = p; q < z.k(); ++q) {
      Matrix raw;
      const Matrix theta = fit_block(a.matrix(), z, j, p, q, &raw);
      const double r = (raw - theta).squaredNorm();
      total += p == q ? r : 2.0 * r;
    }
  }
  return total;
}

double objective(const AdjacencyMatrix& a, const Clustering& z, const SupportFamily& j, const PenaltyParams& params) {
  const std::vector<int> sizes = z.sizes();
  return block_residual(a, z, j) + penalty(a.n(), sizes, SupportCounts::of(j), params, density(a));
}

FitResult fit_with_clustering(const AdjacencyMatrix& a, const Clustering& z) {
  SupportFamily j = breve_support(a.matrix(), z);
  BlockEstimate est = estimate_theta(a, z, j);
  ProbabilityMatrix p = assemble_p(est);
  return FitResult{z, std::move(j), std::move(est), std::move(p)};
}

FitResult fit(const AdjacencyMatrix& a, int k, std::uint64_t seed, const SscOptions& options) {
  return fit_with_clustering(a, cluster_network(a, k, seed, options));
}

}  // namespace spabm
