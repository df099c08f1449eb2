#pragma once

// Core network types and the block/permutation algebra.
//
// Indices are 0-based throughout the C++ API. File formats and the CLI use
// 1-based node and community ids; conversion happens at the I/O boundary.
//
// Block (k,l) of a matrix B under clustering Z is the sub-matrix whose rows
// are the members of community k and whose columns are the members of
// community l, members listed in ascending node order. Support row sets
// J_{k,l} hold positions inside community k's member list, not node ids.

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

namespace spabm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexList = std::vector<int>;

// Assignment of n nodes to k nonempty communities.
class Clustering {
 public:
  // labels[i] in [0, k); every community must be nonempty.
  Clustering(std::vector<int> labels, int k);

  // Accepts 1-based labels; k is the largest label.
  static Clustering from_one_based(std::span<const int> labels);

  int n() const { return static_cast<int>(labels_.size()); }
  int k() const { return k_; }
  int label(int node) const { return labels_[node]; }
  const std::vector<int>& labels() const { return labels_; }
  std::vector<int> one_based() const;

  // Members of community c in ascending node order.
  const IndexList& members(int c) const { return members_[c]; }
  int size(int c) const { return static_cast<int>(members_[c].size()); }
  std::vector<int> sizes() const;

  // First position of community c in the rearranged order.
  int offset(int c) const { return offsets_[c]; }

  // order()[p] is the node sitting at position p after rearrangement;
  // position()[node] is its inverse.
  const IndexList& order() const { return order_; }
  int position(int node) const { return positions_[node]; }

  bool operator==(const Clustering& other) const {
    return k_ == other.k_ && labels_ == other.labels_;
  }

 private:
  std::vector<int> labels_;
  int k_;
  std::vector<IndexList> members_;
  std::vector<int> offsets_;
  IndexList order_;
  IndexList positions_;
};

// Symmetric 0/1 matrix with zero diagonal.
class AdjacencyMatrix {
 public:
  explicit AdjacencyMatrix(Matrix entries);
  static AdjacencyMatrix empty(int n);

  int n() const { return static_cast<int>(entries_.rows()); }
  const Matrix& matrix() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }
  // Number of nonzero entries (each undirected edge counted twice).
  long long nonzeros() const;

 private:
  Matrix entries_;
};

// Symmetric matrix with entries in [0, 1].
class ProbabilityMatrix {
 public:
  explicit ProbabilityMatrix(Matrix entries);

  int n() const { return static_cast<int>(entries_.rows()); }
  const Matrix& matrix() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }

 private:
  Matrix entries_;
};

// n x K popularity matrix in original node order. Block (k,l) is column l
// restricted to the members of community k.
class PopularityMatrix {
 public:
  PopularityMatrix(Matrix entries, Clustering clustering);

  int n() const { return static_cast<int>(entries_.rows()); }
  int k() const { return static_cast<int>(entries_.cols()); }
  const Matrix& matrix() const { return entries_; }
  const Clustering& clustering() const { return clustering_; }
  Vector popularity(int k, int l) const;

 private:
  Matrix entries_;
  Clustering clustering_;
};

// K x K family of row sets J_{k,l}, each a sorted list of positions inside
// community k. The rectangular support of block (k,l) is J_{k,l} x J_{l,k}.
class SupportFamily {
 public:
  // sizes[k] bounds the positions allowed in J_{k,l}.
  SupportFamily(std::vector<int> sizes, std::vector<IndexList> rowsets);
  static SupportFamily full(std::span<const int> sizes);
  static SupportFamily none(std::span<const int> sizes);

  int k() const { return static_cast<int>(sizes_.size()); }
  const std::vector<int>& sizes() const { return sizes_; }
  const IndexList& rows(int k, int l) const { return rowsets_[k * this->k() + l]; }
  // Rows and columns of the rectangular support of block (k,l).
  const IndexList& block_rows(int k, int l) const { return rows(k, l); }
  const IndexList& block_cols(int k, int l) const { return rows(l, k); }
  int count(int k, int l) const { return static_cast<int>(rows(k, l).size()); }
  long long total() const;

  // J_{k,l} subset of other.J_{k,l} for every block.
  bool subset_of(const SupportFamily& other) const;

  bool operator==(const SupportFamily& other) const {
    return sizes_ == other.sizes_ && rowsets_ == other.rowsets_;
  }

 private:
  std::vector<int> sizes_;
  std::vector<IndexList> rowsets_;
};

// Read-only view of block (k,l) of a matrix under a clustering.
class BlockView {
 public:
  BlockView(const Matrix& source, int k, int l, const IndexList& rows, const IndexList& cols)
      : source_(source), k_(k), l_(l), rows_(rows), cols_(cols) {}

  int k() const { return k_; }
  int l() const { return l_; }
  int rows() const { return static_cast<int>(rows_.get().size()); }
  int cols() const { return static_cast<int>(cols_.get().size()); }
  const IndexList& row_nodes() const { return rows_; }
  const IndexList& col_nodes() const { return cols_; }
  double operator()(int r, int c) const { return source_.get()(rows_.get()[r], cols_.get()[c]); }
  Matrix materialize() const;

 private:
  std::reference_wrapper<const Matrix> source_;
  int k_;
  int l_;
  std::reference_wrapper<const IndexList> rows_;
  std::reference_wrapper<const IndexList> cols_;
};

// B(Z,K): rows and columns permuted so community 0 comes first, then 1, ...
Matrix rearrange(const Matrix& b, const Clustering& z);
// Inverse of rearrange: maps a rearranged matrix back to node order.
Matrix inverse_rearrange(const Matrix& b, const Clustering& z);

BlockView block(const Matrix& b, const Clustering& z, int k, int l);

// Writes `values` (n_k x n_l) into block (k,l) of `target`, node order.
void scatter_block(Matrix& target, const Clustering& z, int k, int l, const Matrix& values);

// Block (k,l) equals Lambda^{(k,l)} (Lambda^{(l,k)})^T.
ProbabilityMatrix probability_from_lambda(const PopularityMatrix& lambda);

// Row sets of nonzero rows of every block of b under z.
SupportFamily breve_support(const Matrix& b, const Clustering& z);

// Keeps m on rows x cols, zero elsewhere.
Matrix project_support(const Matrix& m, const IndexList& rows, const IndexList& cols);

}  // namespace spabm
