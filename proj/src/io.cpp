#include "spabm/io.hpp"

#include "spabm/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

namespace spabm::io {

namespace {

// Splits on blanks and tabs.
std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool skippable(std::string_view line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

[[noreturn]] void fail(const std::string& source, long long line, const std::string& what) {
  throw DataError(source + ":" + std::to_string(line) + ": " + what);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

double parse_double(std::string_view s, const std::string& source, long long line) {
  double v = 0.0;
  if (!parse_number(s, v) || !std::isfinite(v)) fail(source, line, "not a finite number: '" + std::string(s) + "'");
  return v;
}

long long parse_integer(std::string_view s, const std::string& source, long long line) {
  long long v = 0;
  if (!parse_number(s, v)) fail(source, line, "not an integer: '" + std::string(s) + "'");
  return v;
}

// Reads the next non-comment line; false at end of input.
bool next_line(std::istream& in, std::string& line, long long& number) {
  while (std::getline(in, line)) {
    ++number;
    if (!skippable(line)) return true;
  }
  return false;
}

}  // namespace

std::string Provenance::comment() const {
  return "# config_hash=" + config_hash + " seed=" + std::to_string(seed) + "\n";
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
  return buf;
}

void write_matrix(std::ostream& out, const Matrix& m, const Provenance& prov) {
  out << prov.comment() << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

Matrix read_matrix(std::istream& in, const std::string& source) {
  std::string line;
  long long number = 0;
  if (!next_line(in, line, number)) throw DataError(source + ": missing matrix header");
  const auto head = tokens(line);
  if (head.size() != 2) fail(source, number, "header must be 'rows cols'");
  const long long rows = parse_integer(head[0], source, number);
  const long long cols = parse_integer(head[1], source, number);
  if (rows < 0 || cols < 0) fail(source, number, "negative dimension");
  Matrix m(rows, cols);
  for (long long r = 0; r < rows; ++r) {
    if (!next_line(in, line, number)) throw DataError(source + ": expected " + std::to_string(rows) + " rows, found " + std::to_string(r));
    const auto vals = tokens(line);
    if (static_cast<long long>(vals.size()) != cols)
      fail(source, number, "expected " + std::to_string(cols) + " values, found " + std::to_string(vals.size()));
    for (long long c = 0; c < cols; ++c) m(r, c) = parse_double(vals[c], source, number);
  }
  if (next_line(in, line, number)) fail(source, number, "trailing data after matrix");
  return m;
}

void write_labels(std::ostream& out, const Clustering& z, const Provenance& prov) {
  out << prov.comment();
  for (int l : z.one_based()) out << l << '\n';
}

Clustering read_labels(std::istream& in, const std::string& source) {
  std::vector<int> labels;
  std::string line;
  long long number = 0;
  while (next_line(in, line, number)) {
    const auto t = tokens(line);
    if (t.size() != 1) fail(source, number, "expected one label per line");
    const long long v = parse_integer(t[0], source, number);
    if (v < 1 || v > 1'000'000) fail(source, number, "label out of range");
    labels.push_back(static_cast<int>(v));
  }
  if (labels.empty()) throw DataError(source + ": no labels");
  try {
    return Clustering::from_one_based(labels);
  } catch (const Error& e) {
    throw DataError(source + ": " + e.what());
  }
}

void write_support(std::ostream& out, const SupportFamily& j, const Provenance& prov) {
  out << prov.comment();
  for (int k = 0; k < j.k(); ++k) {
    for (int l = 0; l < j.k(); ++l) {
      out << k + 1 << ' ' << l + 1;
      for (int i : j.rows(k, l)) out << ' ' << i + 1;
      out << '\n';
    }
  }
}

SupportFamily read_support(std::istream& in, std::vector<int> sizes, const std::string& source) {
  const int k = static_cast<int>(sizes.size());
  std::vector<IndexList> sets(static_cast<std::size_t>(k) * k);
  std::vector<char> seen(sets.size(), 0);
  std::string line;
  long long number = 0;
  while (next_line(in, line, number)) {
    const auto t = tokens(line);
    if (t.size() < 2) fail(source, number, "expected 'k l [positions...]'");
    const long long a = parse_integer(t[0], source, number);
    const long long b = parse_integer(t[1], source, number);
    if (a < 1 || a > k || b < 1 || b > k) fail(source, number, "community id out of range");
    const std::size_t slot = static_cast<std::size_t>(a - 1) * k + (b - 1);
    if (seen[slot]) fail(source, number, "block listed twice");
    seen[slot] = 1;
    for (std::size_t i = 2; i < t.size(); ++i) {
      const long long p = parse_integer(t[i], source, number);
      if (p < 1 || p > sizes[a - 1]) fail(source, number, "position out of range");
      sets[slot].push_back(static_cast<int>(p - 1));
    }
  }
  try {
    return SupportFamily(std::move(sizes), std::move(sets));
  } catch (const Error& e) {
    throw DataError(source + ": " + e.what());
  }
}

EdgeList read_edge_list(std::istream& in, const EdgeListOptions& options, const std::string& source) {
  std::set<std::pair<long long, long long>> edges;
  std::set<long long> ids;
  long long self_loops = 0;
  long long duplicates = 0;
  long long below = 0;
  std::string line;
  long long number = 0;
  while (next_line(in, line, number)) {
    const auto t = tokens(line);
    if (t.size() != 2 && t.size() != 3) fail(source, number, "expected 'i j' or 'i j weight'");
    const long long i = parse_integer(t[0], source, number);
    const long long j = parse_integer(t[1], source, number);
    if (t.size() == 3 && !(parse_double(t[2], source, number) > options.weight_threshold)) {
      ++below;
      continue;
    }
    if (i == j) {
      ++self_loops;
      continue;
    }
    if (!edges.emplace(std::min(i, j), std::max(i, j)).second) ++duplicates;
    ids.insert(i);
    ids.insert(j);
  }
  if (edges.empty()) throw DataError(source + ": graph has no edges");

  std::vector<long long> original(ids.begin(), ids.end());
  std::map<long long, int> index;
  for (std::size_t p = 0; p < original.size(); ++p) index[original[p]] = static_cast<int>(p);
  const int n = static_cast<int>(original.size());
  Matrix a = Matrix::Zero(n, n);
  for (const auto& [i, j] : edges) {
    a(index[i], index[j]) = 1.0;
    a(index[j], index[i]) = 1.0;
  }
  return EdgeList{AdjacencyMatrix(std::move(a)), std::move(original), static_cast<long long>(edges.size()), self_loops,
                  duplicates, below};
}

AdjacencyMatrix binarize(const Matrix& weights, double threshold) {
  if (weights.rows() != weights.cols()) throw DimensionError("binarize: weight matrix must be square");
  const Eigen::Index n = weights.rows();
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const bool on = std::abs(weights(i, j)) > threshold;
      if (on != (std::abs(weights(j, i)) > threshold)) throw DataError("binarize: weight matrix is not symmetric");
      a(i, j) = on ? 1.0 : 0.0;
    }
  }
  return AdjacencyMatrix(std::move(a));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << contents;
  if (!out) throw DataError("write failed for " + path.string());
}

Matrix load_matrix(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  return read_matrix(in, path.string());
}

Clustering load_labels(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  return read_labels(in, path.string());
}

}  // namespace spabm::io
