#include "helpers.hpp"

#include "spabm/error.hpp"
#include "spabm/metrics.hpp"
#include "spabm/random.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace spabm;

namespace {

Clustering labels(std::vector<int> l, int k) { return Clustering(std::move(l), k); }

double brute_force_assignment(const Matrix& cost) {
  const int k = static_cast<int>(cost.rows());
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double c = 0.0;
    for (int r = 0; r < k; ++r) c += cost(r, perm[r]);
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Matrix hand_p_true() {
  Matrix p(4, 4);
  p << 0.5, 0.2, 0.0, 0.1,
       0.2, 0.5, 0.3, 0.0,
       0.0, 0.3, 0.5, 0.4,
       0.1, 0.0, 0.4, 0.5;
  return p;
}

// Misses (0,1) and (2,3), falsely fills (0,2).
Matrix hand_p_hat() {
  Matrix p(4, 4);
  p << 0.5, 0.0, 0.2, 0.1,
       0.0, 0.5, 0.3, 0.0,
       0.2, 0.3, 0.5, 0.0,
       0.1, 0.0, 0.0, 0.5;
  return p;
}

}  // namespace

TEST_CASE("clustering error of identical and relabelled clusterings is zero") {
  const Clustering z = labels({0, 0, 1, 1, 2, 2, 2}, 3);
  CHECK(clustering_error(z, z).error == 0.0);
  const Clustering swapped = labels({2, 2, 0, 0, 1, 1, 1}, 3);
  const ClusteringError e = clustering_error(swapped, z);
  CHECK(e.error == 0.0);
  CHECK(e.permutation == std::vector<int>{1, 2, 0});
}

TEST_CASE("moving one node of ten costs 0.1") {
  const Clustering truth = labels({0, 0, 0, 0, 0, 1, 1, 1, 1, 1}, 2);
  const Clustering moved = labels({1, 1, 1, 1, 0, 0, 0, 0, 0, 0}, 2);
  CHECK(clustering_error(moved, truth).error == doctest::Approx(0.1));
}

TEST_CASE("clustering error is symmetric and bounded") {
  Rng rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    const int k = 2 + static_cast<int>(rng.below(4));
    const int n = k + static_cast<int>(rng.below(30));
    std::vector<int> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = i < k ? i : static_cast<int>(rng.below(k));
      b[i] = i < k ? k - 1 - i : static_cast<int>(rng.below(k));
    }
    const Clustering za(a, k);
    const Clustering zb(b, k);
    const double ab = clustering_error(za, zb).error;
    CHECK(ab == doctest::Approx(clustering_error(zb, za).error));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0 - 1.0 / k + 1e-12);
  }
}

TEST_CASE("Hungarian assignment matches brute force") {
  Rng rng(5);
  for (int rep = 0; rep < 300; ++rep) {
    const int k = 1 + static_cast<int>(rng.below(7));
    Matrix cost(k, k);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) cost(r, c) = std::floor(10.0 * rng.uniform());
    const std::vector<int> a = min_cost_assignment(cost);
    std::vector<int> sorted = a;
    std::sort(sorted.begin(), sorted.end());
    for (int c = 0; c < k; ++c) REQUIRE(sorted[c] == c);
    double total = 0.0;
    for (int r = 0; r < k; ++r) total += cost(r, a[r]);
    CHECK(total == doctest::Approx(brute_force_assignment(cost)));
  }
  CHECK_THROWS_AS(min_cost_assignment(Matrix::Zero(2, 3)), DimensionError);
}

TEST_CASE("estimation error") {
  const Matrix p = hand_p_true();
  CHECK(estimation_error(p, p) == 0.0);
  CHECK(estimation_error(Matrix::Constant(3, 3, 1.0), Matrix::Zero(3, 3)) == 1.0);
  Matrix a = Matrix::Zero(5, 5);
  Matrix b = Matrix::Zero(5, 5);
  a(0, 0) = 0.5;
  a(1, 3) = a(3, 1) = 0.2;
  b(4, 2) = 0.1;
  CHECK(estimation_error(a, b) == doctest::Approx((0.25 + 0.04 + 0.04 + 0.01) / 25.0));
  CHECK_THROWS_AS(estimation_error(Matrix::Zero(3, 3), Matrix::Zero(4, 4)), DimensionError);
}

TEST_CASE("false positive rate and false negative mass on a hand example") {
  const Matrix truth = hand_p_true();
  const Matrix hat = hand_p_hat();
  // Off-diagonal zeros of the truth: (0,2),(2,0),(1,3),(3,1); two are filled.
  CHECK(false_positive_rate(hat, truth) == doctest::Approx(0.5));
  // Missed mass 2(0.2^2 + 0.4^2) over off-diagonal mass 2(0.04+0.01+0.09+0.16).
  CHECK(delta_fn(hat, truth) == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(delta_fn(hat, truth) == doctest::Approx(0.816496580927726));
  CHECK(false_positive_rate(truth, truth) == 0.0);
  CHECK(delta_fn(truth, truth) == 0.0);
}

TEST_CASE("zero tolerance treats tiny estimates as zeros") {
  const Matrix truth = hand_p_true();
  Matrix hat = truth;
  hat(0, 2) = hat(2, 0) = 1e-12;
  CHECK(false_positive_rate(hat, truth, 0.0) == doctest::Approx(0.5));
  CHECK(false_positive_rate(hat, truth, 1e-9) == 0.0);
  hat(0, 1) = hat(1, 0) = 1e-12;
  CHECK(delta_fn(hat, truth, 0.0) == 0.0);
  CHECK(delta_fn(hat, truth, 1e-9) > 0.0);
}

TEST_CASE("degenerate truths") {
  // No off-diagonal zeros: the false positive rate is defined as zero.
  CHECK(false_positive_rate(Matrix::Constant(3, 3, 0.5), Matrix::Constant(3, 3, 0.5)) == 0.0);
  // The diagonal is ignored by both measures, so a diagonal truth has every
  // off-diagonal entry zero and no mass to miss.
  const Matrix diag = Matrix::Identity(3, 3) * 0.5;
  CHECK(false_positive_rate(Matrix::Zero(3, 3), diag) == 0.0);
  CHECK(false_positive_rate(Matrix::Constant(3, 3, 0.1), diag) == 1.0);
  CHECK_THROWS_AS(delta_fn(Matrix::Zero(3, 3), diag), DataError);
}

TEST_CASE("evaluate bundles the measures") {
  const Clustering truth = labels({0, 0, 1, 1}, 2);
  const Clustering est = labels({1, 1, 0, 0}, 2);
  const EvaluationReport r = evaluate(est, truth, hand_p_hat(), hand_p_true());
  CHECK(r.clustering_error == 0.0);
  CHECK(r.matched_permutation == std::vector<int>{1, 0});
  CHECK(r.estimation_error == doctest::Approx(estimation_error(hand_p_hat(), hand_p_true())));
  CHECK(r.rho_fp == doctest::Approx(0.5));
  CHECK(r.delta_fn == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK_THROWS_AS(evaluate(labels({0, 1, 0}, 2), truth, hand_p_hat(), hand_p_true()), DimensionError);
}
