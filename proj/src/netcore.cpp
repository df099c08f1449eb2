#include "spabm/netcore.hpp"

#include "spabm/error.hpp"

#include <algorithm>
#include <string>

namespace spabm {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected square");
  }
}

void require_match(const Matrix& m, const Clustering& z, const char* what) {
  require_square(m, what);
  if (m.rows() != z.n()) {
    throw DimensionError(std::string(what) + ": matrix dimension " + std::to_string(m.rows()) +
                         " does not match clustering of " + std::to_string(z.n()) + " nodes");
  }
}

void require_community(const Clustering& z, int c) {
  if (c < 0 || c >= z.k()) {
    throw DimensionError("community index " + std::to_string(c) + " out of range [0, " +
                         std::to_string(z.k()) + ")");
  }
}

}  // namespace

// ---------------------------------------------------------------- Clustering

Clustering::Clustering(std::vector<int> labels, int k) : labels_(std::move(labels)), k_(k) {
  if (k_ < 1) throw DataError("clustering needs at least one community");
  members_.assign(k_, {});
  for (int i = 0; i < n(); ++i) {
    const int c = labels_[i];
    if (c < 0 || c >= k_) {
      throw DataError("label " + std::to_string(c) + " of node " + std::to_string(i) +
                      " outside [0, " + std::to_string(k_) + ")");
    }
    members_[c].push_back(i);
  }
  offsets_.resize(k_);
  int offset = 0;
  for (int c = 0; c < k_; ++c) {
    if (members_[c].empty()) throw DataError("community " + std::to_string(c + 1) + " is empty");
    offsets_[c] = offset;
    offset += size(c);
    order_.insert(order_.end(), members_[c].begin(), members_[c].end());
  }
  positions_.resize(n());
  for (int p = 0; p < n(); ++p) positions_[order_[p]] = p;
}

Clustering Clustering::from_one_based(std::span<const int> labels) {
  std::vector<int> zero(labels.begin(), labels.end());
  int k = 0;
  for (int& v : zero) {
    if (v < 1) throw DataError("1-based label " + std::to_string(v) + " is not positive");
    k = std::max(k, v);
    --v;
  }
  return Clustering(std::move(zero), k);
}

std::vector<int> Clustering::one_based() const {
  std::vector<int> out(labels_);
  for (int& v : out) ++v;
  return out;
}

std::vector<int> Clustering::sizes() const {
  std::vector<int> out(k_);
  for (int c = 0; c < k_; ++c) out[c] = size(c);
  return out;
}

// ---------------------------------------------------------------- matrices

AdjacencyMatrix::AdjacencyMatrix(Matrix entries) : entries_(std::move(entries)) {
  require_square(entries_, "adjacency");
  const Eigen::Index n = entries_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (entries_(i, i) != 0.0) throw DataError("adjacency has a self-loop at node " + std::to_string(i + 1));
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = entries_(i, j);
      if (v != 0.0 && v != 1.0) {
        throw DataError("adjacency entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                        ") is not 0/1");
      }
      if (v != entries_(j, i)) throw DataError("adjacency is not symmetric");
    }
  }
}

AdjacencyMatrix AdjacencyMatrix::empty(int n) { return AdjacencyMatrix(Matrix::Zero(n, n)); }

long long AdjacencyMatrix::nonzeros() const {
  return static_cast<long long>((entries_.array() != 0.0).count());
}

ProbabilityMatrix::ProbabilityMatrix(Matrix entries) : entries_(std::move(entries)) {
  require_square(entries_, "probability");
  const Eigen::Index n = entries_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = entries_(i, j);
      if (!(v >= 0.0 && v <= 1.0)) throw DataError("probability entry outside [0,1]");
      if (v != entries_(j, i)) throw DataError("probability matrix is not symmetric");
    }
  }
}

PopularityMatrix::PopularityMatrix(Matrix entries, Clustering clustering)
    : entries_(std::move(entries)), clustering_(std::move(clustering)) {
  if (entries_.rows() != clustering_.n() || entries_.cols() != clustering_.k()) {
    throw DimensionError("popularity matrix must be n x K for its clustering");
  }
  if ((entries_.array() < 0.0).any() || (entries_.array() > 1.0).any()) {
    throw DataError("popularity entries must lie in [0,1]");
  }
}

Vector PopularityMatrix::popularity(int k, int l) const {
  require_community(clustering_, k);
  require_community(clustering_, l);
  const IndexList& rows = clustering_.members(k);
  Vector out(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) out(r) = entries_(rows[r], l);
  return out;
}

// ---------------------------------------------------------------- supports

SupportFamily::SupportFamily(std::vector<int> sizes, std::vector<IndexList> rowsets)
    : sizes_(std::move(sizes)), rowsets_(std::move(rowsets)) {
  const std::size_t k = sizes_.size();
  if (rowsets_.size() != k * k) throw DimensionError("support family needs K*K row sets");
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      IndexList& set = rowsets_[a * k + b];
      std::sort(set.begin(), set.end());
      if (std::adjacent_find(set.begin(), set.end()) != set.end()) {
        throw DataError("support row set has duplicates");
      }
      if (!set.empty() && (set.front() < 0 || set.back() >= sizes_[a])) {
        throw DimensionError("support row index outside its community");
      }
    }
  }
}

SupportFamily SupportFamily::full(std::span<const int> sizes) {
  const std::size_t k = sizes.size();
  std::vector<IndexList> sets(k * k);
  for (std::size_t a = 0; a < k; ++a) {
    IndexList all(sizes[a]);
    for (int i = 0; i < sizes[a]; ++i) all[i] = i;
    for (std::size_t b = 0; b < k; ++b) sets[a * k + b] = all;
  }
  return SupportFamily({sizes.begin(), sizes.end()}, std::move(sets));
}

SupportFamily SupportFamily::none(std::span<const int> sizes) {
  return SupportFamily({sizes.begin(), sizes.end()}, std::vector<IndexList>(sizes.size() * sizes.size()));
}

long long SupportFamily::total() const {
  long long t = 0;
  for (const auto& s : rowsets_) t += static_cast<long long>(s.size());
  return t;
}

bool SupportFamily::subset_of(const SupportFamily& other) const {
  if (sizes_ != other.sizes_) return false;
  for (std::size_t i = 0; i < rowsets_.size(); ++i) {
    if (!std::includes(other.rowsets_[i].begin(), other.rowsets_[i].end(), rowsets_[i].begin(),
                       rowsets_[i].end())) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- algebra

Matrix BlockView::materialize() const {
  Matrix out(rows(), cols());
  for (int c = 0; c < cols(); ++c)
    for (int r = 0; r < rows(); ++r) out(r, c) = (*this)(r, c);
  return out;
}

Matrix rearrange(const Matrix& b, const Clustering& z) {
  require_match(b, z, "rearrange");
  const IndexList& order = z.order();
  const int n = z.n();
  Matrix out(n, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) out(r, c) = b(order[r], order[c]);
  return out;
}

Matrix inverse_rearrange(const Matrix& b, const Clustering& z) {
  require_match(b, z, "inverse_rearrange");
  const IndexList& order = z.order();
  const int n = z.n();
  Matrix out(n, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) out(order[r], order[c]) = b(r, c);
  return out;
}

BlockView block(const Matrix& b, const Clustering& z, int k, int l) {
  require_match(b, z, "block");
  require_community(z, k);
  require_community(z, l);
  return BlockView(b, k, l, z.members(k), z.members(l));
}

void scatter_block(Matrix& target, const Clustering& z, int k, int l, const Matrix& values) {
  require_match(target, z, "scatter_block");
  require_community(z, k);
  require_community(z, l);
  const IndexList& rows = z.members(k);
  const IndexList& cols = z.members(l);
  if (values.rows() != static_cast<Eigen::Index>(rows.size()) ||
      values.cols() != static_cast<Eigen::Index>(cols.size())) {
    throw DimensionError("scatter_block: block has wrong shape");
  }
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t r = 0; r < rows.size(); ++r) target(rows[r], cols[c]) = values(r, c);
}

ProbabilityMatrix probability_from_lambda(const PopularityMatrix& lambda) {
  const Clustering& z = lambda.clustering();
  const Matrix& lam = lambda.matrix();
  const int n = z.n();
  Matrix p(n, n);
  // P_ij = Lambda(i, c_j) * Lambda(j, c_i); evaluated once per unordered pair.
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double v = lam(i, z.label(j)) * lam(j, z.label(i));
      p(i, j) = v;
      p(j, i) = v;
    }
  }
  return ProbabilityMatrix(std::move(p));
}

SupportFamily breve_support(const Matrix& b, const Clustering& z) {
  require_match(b, z, "breve_support");
  const int k = z.k();
  std::vector<IndexList> sets(static_cast<std::size_t>(k) * k);
  for (int a = 0; a < k; ++a) {
    const IndexList& rows = z.members(a);
    for (int c = 0; c < k; ++c) {
      const IndexList& cols = z.members(c);
      IndexList& set = sets[a * k + c];
      for (std::size_t r = 0; r < rows.size(); ++r) {
        for (int col : cols) {
          if (b(rows[r], col) != 0.0) {
            set.push_back(static_cast<int>(r));
            break;
          }
        }
      }
    }
  }
  return SupportFamily(z.sizes(), std::move(sets));
}

Matrix project_support(const Matrix& m, const IndexList& rows, const IndexList& cols) {
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (int c : cols) {
    if (c < 0 || c >= m.cols()) throw DimensionError("project_support: column index out of range");
    for (int r : rows) {
      if (r < 0 || r >= m.rows()) throw DimensionError("project_support: row index out of range");
      out(r, c) = m(r, c);
    }
  }
  return out;
}

}  // namespace spabm
