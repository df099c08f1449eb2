#pragma once

// Plain-text file formats.
//
// Matrix file: optional '#' comment lines, then a header "rows cols", then
// one line per row of space-separated values. Labels file: one 1-based
// community id per line. Support file: one line per block, "k l i1 i2 ...",
// with 1-based community ids and 1-based positions inside community k.

#include "spabm/netcore.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace spabm::io {

// Header line shared by every text output, e.g. "# config_hash=... seed=...".
struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string comment() const;
};

std::string format_double(double x);

void write_matrix(std::ostream& out, const Matrix& m, const Provenance& prov);
Matrix read_matrix(std::istream& in, const std::string& source = "<stream>");

void write_labels(std::ostream& out, const Clustering& z, const Provenance& prov);
// k is inferred as the largest label.
Clustering read_labels(std::istream& in, const std::string& source = "<stream>");

void write_support(std::ostream& out, const SupportFamily& j, const Provenance& prov);
SupportFamily read_support(std::istream& in, std::vector<int> sizes, const std::string& source = "<stream>");

struct EdgeListOptions {
  // Edges with a weight column are kept when weight > threshold.
  double weight_threshold = 0.0;
};

struct EdgeList {
  AdjacencyMatrix adjacency;
  // original_ids[i] is the id from the file of internal node i.
  std::vector<long long> original_ids;
  long long edges = 0;
  long long self_loops = 0;
  long long duplicates = 0;
  long long below_threshold = 0;
};

// Lines "i j" or "i j w"; '#' comments and blank lines ignored. Node ids are
// integers; internal nodes are numbered by ascending id.
EdgeList read_edge_list(std::istream& in, const EdgeListOptions& options = {},
                        const std::string& source = "<stream>");

// Symmetric weighted matrix to adjacency: |w| > threshold becomes 1, the
// diagonal is dropped.
AdjacencyMatrix binarize(const Matrix& weights, double threshold = 0.0);

// File helpers; failures raise DataError naming the path.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);
Matrix load_matrix(const std::filesystem::path& path);
Clustering load_labels(const std::filesystem::path& path);

}  // namespace spabm::io
