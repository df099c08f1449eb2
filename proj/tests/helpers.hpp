#pragma once

#include "spabm/netcore.hpp"
#include "spabm/random.hpp"

#include <cstdint>
#include <initializer_list>
#include <utility>
#include <vector>

namespace spabm::testing {

inline AdjacencyMatrix graph(int n, std::initializer_list<std::pair<int, int>> edges) {
  Matrix a = Matrix::Zero(n, n);
  for (auto [i, j] : edges) a(i, j) = a(j, i) = 1.0;
  return AdjacencyMatrix(a);
}

// Disjoint cliques of the given sizes, nodes numbered consecutively.
inline AdjacencyMatrix cliques(std::initializer_list<int> sizes) {
  int n = 0;
  for (int s : sizes) n += s;
  Matrix a = Matrix::Zero(n, n);
  int start = 0;
  for (int s : sizes) {
    a.block(start, start, s, s).setOnes();
    start += s;
  }
  a.diagonal().setZero();
  return AdjacencyMatrix(a);
}

inline std::vector<int> consecutive_labels(std::initializer_list<int> sizes) {
  std::vector<int> labels;
  int c = 0;
  for (int s : sizes) {
    labels.insert(labels.end(), s, c);
    ++c;
  }
  return labels;
}

// Five nodes, true communities {1,2} and {3,4,5}; node 4 never meets
// community 1. With the edge 3-4 present and node 3 moved to community 1,
// block (2,1) becomes [[0,0,1],[1,1,1]].
inline AdjacencyMatrix five_node_network(bool edge_34) {
  Matrix a = Matrix::Zero(5, 5);
  auto link = [&](int i, int j) { a(i - 1, j - 1) = a(j - 1, i - 1) = 1.0; };
  link(1, 2);
  link(1, 3);
  link(2, 3);
  link(1, 5);
  link(2, 5);
  link(3, 5);
  link(4, 5);
  if (edge_34) link(3, 4);
  return AdjacencyMatrix(a);
}

// Entries uniform on [-1, 1).
inline Matrix random_matrix(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

}  // namespace spabm::testing
