#include "spabm/oracle.hpp"

#include "spabm/error.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

namespace spabm::oracle {

namespace {

std::vector<int> nodes_with_label(const std::vector<int>& labels, int c) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(labels.size()); ++i)
    if (labels[i] == c) out.push_back(i);
  return out;
}

bool member(const IndexList& set, int x) { return std::binary_search(set.begin(), set.end(), x); }

// ||B - Pi_1(Pi_{rows x cols}(B))||_F^2 via a full SVD.
double projected_rank_one_residual(const Matrix& b, const IndexList& rows, const IndexList& cols) {
  Matrix projected = Matrix::Zero(b.rows(), b.cols());
  for (Eigen::Index r = 0; r < b.rows(); ++r)
    for (Eigen::Index c = 0; c < b.cols(); ++c)
      if (member(rows, static_cast<int>(r)) && member(cols, static_cast<int>(c))) projected(r, c) = b(r, c);
  Matrix theta = Matrix::Zero(b.rows(), b.cols());
  if (projected.size() > 0) {
    Eigen::JacobiSVD<Matrix> svd(projected, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.singularValues().size() > 0) {
      theta = svd.singularValues()(0) * svd.matrixU().col(0) * svd.matrixV().col(0).transpose();
    }
  }
  return (b - theta).squaredNorm();
}

Matrix gather(const AdjacencyMatrix& a, const std::vector<int>& rows, const std::vector<int>& cols) {
  Matrix b(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) b(r, c) = a(rows[r], cols[c]);
  return b;
}

double xlog(double x, double c) { return x == 0.0 ? 0.0 : x * (std::log(c / x) + 1.0); }

// Pen^(0) and the full penalty, from the formulas.
double support_penalty(int n, const std::vector<int>& sizes, const SupportFamily& j, const PenaltyParams& p) {
  const int k = static_cast<int>(sizes.size());
  if (p.variant == PenaltyVariant::separable) {
    double s = 0.0;
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) s += p.beta1 * xlog(j.rows(a, b).size(), sizes[a]);
    for (int a = 0; a < k; ++a) s += p.beta2 * k * std::log(sizes[a]);
    return s;
  }
  if (p.variant == PenaltyVariant::nonseparable) {
    double total = 0.0;
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) total += static_cast<double>(j.rows(a, b).size());
    return p.beta1 * xlog(total, static_cast<double>(n) * k) + 2.0 * p.beta2 * std::log(n);
  }
  return 0.0;
}

double full_penalty(const AdjacencyMatrix& a, const std::vector<int>& sizes, const SupportFamily& j,
                    const PenaltyParams& p) {
  const int n = a.n();
  const double k = static_cast<double>(sizes.size());
  if (p.variant == PenaltyVariant::empirical) {
    double ones = 0.0;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        if (r != c && a(r, c) != 0.0) ones += 1.0;
    const double rho = ones / (static_cast<double>(n) * (n - 1));
    return rho * n * k * std::sqrt(std::log(static_cast<double>(n)) * std::pow(std::log(k), 3));
  }
  return support_penalty(n, sizes, j, p) + p.beta2 * (n * std::log(k) + std::log(static_cast<double>(n)));
}

std::vector<int> sizes_of(const std::vector<int>& labels, int k) {
  std::vector<int> s(k, 0);
  for (int l : labels) ++s[l];
  return s;
}

}  // namespace

SupportFamily nonzero_rows(const AdjacencyMatrix& a, const Clustering& z) {
  const int k = z.k();
  std::vector<IndexList> sets(static_cast<std::size_t>(k) * k);
  for (int p = 0; p < k; ++p) {
    const std::vector<int> rows = nodes_with_label(z.labels(), p);
    for (int q = 0; q < k; ++q) {
      const std::vector<int> cols = nodes_with_label(z.labels(), q);
      const Matrix b = gather(a, rows, cols);
      for (Eigen::Index r = 0; r < b.rows(); ++r)
        if (b.row(r).cwiseAbs().sum() > 0.0) sets[p * k + q].push_back(static_cast<int>(r));
    }
  }
  return SupportFamily(sizes_of(z.labels(), k), std::move(sets));
}

double evaluate_residual(const AdjacencyMatrix& a, const Clustering& z, const SupportFamily& j) {
  if (a.n() != z.n()) throw DimensionError("oracle: adjacency and clustering disagree on n");
  const int k = z.k();
  double total = 0.0;
  for (int p = 0; p < k; ++p) {
    const std::vector<int> rows = nodes_with_label(z.labels(), p);
    for (int q = 0; q < k; ++q) {
      const std::vector<int> cols = nodes_with_label(z.labels(), q);
      total += projected_rank_one_residual(gather(a, rows, cols), j.rows(p, q), j.rows(q, p));
    }
  }
  return total;
}

double evaluate_objective(const AdjacencyMatrix& a, const Clustering& z, const SupportFamily& j,
                          const PenaltyParams& params) {
  return evaluate_residual(a, z, j) + full_penalty(a, sizes_of(z.labels(), z.k()), j, params);
}

ExactSolution exact_clustering_search(const AdjacencyMatrix& a, int k, const PenaltyParams& params,
                                      bool record_candidates) {
  const int n = a.n();
  if (k < 1 || k > n) throw ConfigError("oracle: K must lie in [1, n]");
  const double log_size = n * std::log(static_cast<double>(k)) - std::lgamma(k + 1.0);
  if (log_size > std::log(1e6)) throw ConfigError("oracle: instance too large for exhaustive clustering search");

  std::vector<int> labels(n, 0);
  std::vector<int> best_labels;
  double best = std::numeric_limits<double>::infinity();
  ExactSolution out{Clustering(std::vector<int>(n, 0), 1), SupportFamily::none(std::vector<int>{n}), 0.0, 0, {}};

  // Restricted growth strings with exactly k distinct values, visited in
  // lexicographic order.
  auto visit = [&](auto&& self, int pos, int used) -> void {
    if (n - pos < k - used) return;
    if (pos == n) {
      if (used != k) return;
      Clustering z(labels, k);
      const double value = evaluate_objective(a, z, nonzero_rows(a, z), params);
      ++out.enumeration_count;
      if (record_candidates) out.candidates.push_back({labels, value});
      if (value < best) {
        best = value;
        best_labels = labels;
      }
      return;
    }
    const int top = std::min(used, k - 1);
    for (int c = 0; c <= top; ++c) {
      labels[pos] = c;
      self(self, pos + 1, std::max(used, c + 1));
    }
  };
  labels[0] = 0;
  visit(visit, 1, 1);

  out.best_clustering = Clustering(best_labels, k);
  out.best_support = nonzero_rows(a, out.best_clustering);
  out.best_objective = best;
  return out;
}

SupportSolution exact_support_search(const AdjacencyMatrix& a, const Clustering& z, const PenaltyParams& params) {
  const int k = z.k();
  const int n = z.n();
  if (a.n() != n) throw DimensionError("oracle: adjacency and clustering disagree on n");
  if (static_cast<long long>(k) * n > 16) throw ConfigError("oracle: instance too large for exhaustive support search");

  const std::vector<int> sizes = sizes_of(z.labels(), k);
  std::vector<std::vector<int>> members(k);
  for (int c = 0; c < k; ++c) members[c] = nodes_with_label(z.labels(), c);
  std::vector<Matrix> blocks(static_cast<std::size_t>(k) * k);
  for (int p = 0; p < k; ++p)
    for (int q = 0; q < k; ++q) blocks[p * k + q] = gather(a, members[p], members[q]);

  auto mask_to_set = [](unsigned mask, int size) {
    IndexList s;
    for (int i = 0; i < size; ++i)
      if (mask & (1u << i)) s.push_back(i);
    return s;
  };

  // Residual of block (p,q) depends only on the masks of J_{p,q} and J_{q,p}.
  std::map<std::tuple<int, unsigned, unsigned>, double> cache;
  auto block_res = [&](int p, int q, unsigned rows, unsigned cols) {
    const auto key = std::make_tuple(p * k + q, rows, cols);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const double r = projected_rank_one_residual(blocks[p * k + q], mask_to_set(rows, sizes[p]), mask_to_set(cols, sizes[q]));
    cache.emplace(key, r);
    return r;
  };

  const int sets = k * k;
  std::vector<unsigned> masks(sets, 0);
  SupportSolution out{SupportFamily::none(sizes), std::numeric_limits<double>::infinity(), 0};
  long long best_total = 0;

  auto visit = [&](auto&& self, int idx) -> void {
    if (idx == sets) {
      std::vector<IndexList> rowsets(sets);
      long long total = 0;
      for (int s = 0; s < sets; ++s) {
        rowsets[s] = mask_to_set(masks[s], sizes[s / k]);
        total += static_cast<long long>(rowsets[s].size());
      }
      SupportFamily j(sizes, rowsets);
      double value = support_penalty(n, sizes, j, params);
      for (int p = 0; p < k; ++p)
        for (int q = 0; q < k; ++q) value += block_res(p, q, masks[p * k + q], masks[q * k + p]);
      ++out.enumeration_count;
      if (value < out.objective || (value == out.objective && total < best_total)) {
        out.objective = value;
        out.support = std::move(j);
        best_total = total;
      }
      return;
    }
    const unsigned limit = 1u << sizes[idx / k];
    for (unsigned m = 0; m < limit; ++m) {
      masks[idx] = m;
      self(self, idx + 1);
    }
  };
  visit(visit, 0);
  return out;
}

double exact_permutation_match(const Clustering& z, const Clustering& z_ref) {
  if (z.n() != z_ref.n() || z.k() != z_ref.k()) throw DimensionError("oracle: clusterings are not comparable");
  const int k = z.k();
  if (k > 8) throw ConfigError("oracle: K too large for permutation enumeration");
  const int n = z.n();
  Matrix zm = Matrix::Zero(n, k);
  Matrix zr = Matrix::Zero(n, k);
  for (int i = 0; i < n; ++i) {
    zm(i, z.label(i)) = 1.0;
    zr(i, z_ref.label(i)) = 1.0;
  }
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    Matrix pm = Matrix::Zero(k, k);
    for (int c = 0; c < k; ++c) pm(c, perm[c]) = 1.0;
    best = std::min(best, (zm * pm - zr).cwiseAbs().sum());
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / (2.0 * n);
}

}  // namespace spabm::oracle
