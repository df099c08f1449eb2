#include "spabm/error.hpp"
#include "spabm/synthgen.hpp"

#include <doctest.h>

#include <cmath>

using namespace spabm;

namespace {

GeneratorConfig config(int n, int k, double sigma, double omega, std::uint64_t seed) {
  GeneratorConfig c;
  c.n = n;
  c.k = k;
  c.sigma = sigma;
  c.omega = omega;
  c.seed = seed;
  return c;
}

long long off_diagonal_zeros(const PopularityMatrix& lam) {
  long long zeros = 0;
  for (int i = 0; i < lam.n(); ++i)
    for (int l = 0; l < lam.k(); ++l)
      if (l != lam.clustering().label(i) && lam.matrix()(i, l) == 0.0) ++zeros;
  return zeros;
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_NOTHROW(config(12, 3, 0.5, 0.5, 1).validate());
  CHECK_THROWS_AS(config(10, 3, 0.5, 0.5, 1).validate(), ConfigError);
  CHECK_THROWS_AS(config(12, 3, 0.0, 0.5, 1).validate(), ConfigError);
  CHECK_THROWS_AS(config(12, 3, 1.2, 0.5, 1).validate(), ConfigError);
  CHECK_THROWS_AS(config(12, 3, 0.5, -0.1, 1).validate(), ConfigError);
  CHECK_THROWS_AS(config(12, 13, 0.5, 0.5, 1).validate(), ConfigError);
  GeneratorConfig u = config(10, 3, 0.5, 0.5, 1);
  u.balanced = false;
  u.sizes = {2, 3, 5};
  CHECK_NOTHROW(u.validate());
  CHECK(u.community_sizes() == std::vector<int>{2, 3, 5});
  u.sizes = {2, 3, 4};
  CHECK_THROWS_AS(u.validate(), ConfigError);
  u.sizes = {0, 5, 5};
  CHECK_THROWS_AS(u.validate(), ConfigError);
}

TEST_CASE("omega = 0 makes the probability matrix block diagonal") {
  const SyntheticInstance inst = generate_instance(config(40, 4, 0.6, 0.0, 2));
  const Matrix& p = inst.probability.matrix();
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j)
      if (inst.clustering.label(i) != inst.clustering.label(j)) CHECK(p(i, j) == 0.0);
}

TEST_CASE("sigma = 1 zeroes nothing") {
  const GeneratorConfig c = config(60, 3, 1.0, 0.7, 3);
  CHECK(zeroed_entry_count(c) == 0);
  const SyntheticInstance inst = generate_instance(c);
  CHECK(off_diagonal_zeros(inst.lambda) == 0);
  CHECK(inst.lambda.matrix().minCoeff() > 0.0);
}

TEST_CASE("n=300, K=4, sigma=0.5 zeroes exactly 450 non-diagonal popularity entries") {
  const GeneratorConfig c = config(300, 4, 0.5, 0.8, 11);
  CHECK(zeroed_entry_count(c) == 450);
  CHECK(off_diagonal_zeros(generate_instance(c).lambda) == 450);
  CHECK(off_diagonal_zeros(generate_lambda(c).lambda) == 450);
}

TEST_CASE("zeroed count uses the floor of n(K-1)(1-sigma)") {
  CHECK(zeroed_entry_count(config(300, 4, 0.3, 0.8, 1)) == 630);
  CHECK(zeroed_entry_count(config(420, 4, 0.7, 0.8, 1)) == 378);
  CHECK(zeroed_entry_count(config(10, 2, 0.75, 0.8, 1)) == 2);
}

TEST_CASE("zeroed entries are the smallest non-diagonal draws and survivors are scaled by omega") {
  const GeneratorConfig c = config(60, 3, 0.5, 0.6, 4);
  const GeneratorConfig unscaled = config(60, 3, 1.0, 1.0, 4);
  const SyntheticInstance a = generate_instance(c);
  const SyntheticInstance b = generate_instance(unscaled);
  // Same seed, same raw draws.
  REQUIRE(a.clustering == b.clustering);
  double largest_zeroed = 0.0;
  double smallest_kept = 1.0;
  for (int i = 0; i < 60; ++i) {
    for (int l = 0; l < 3; ++l) {
      const double raw = b.lambda.matrix()(i, l);
      const double got = a.lambda.matrix()(i, l);
      if (l == a.clustering.label(i)) {
        CHECK(got == raw);
      } else if (got == 0.0) {
        largest_zeroed = std::max(largest_zeroed, raw);
      } else {
        CHECK(got == doctest::Approx(0.6 * raw).epsilon(1e-15));
        smallest_kept = std::min(smallest_kept, raw);
      }
    }
  }
  CHECK(largest_zeroed <= smallest_kept);
}

TEST_CASE("lambda entries stay in [0,1] and diagonal blocks are never zeroed") {
  const SyntheticInstance inst = generate_instance(config(120, 4, 0.2, 0.9, 5));
  const Matrix& lam = inst.lambda.matrix();
  CHECK(lam.minCoeff() >= 0.0);
  CHECK(lam.maxCoeff() <= 1.0);
  for (int i = 0; i < 120; ++i) CHECK(lam(i, inst.clustering.label(i)) > 0.0);
}

TEST_CASE("communities are balanced, or follow the given sizes") {
  const SyntheticInstance inst = generate_instance(config(60, 4, 0.5, 0.5, 6));
  CHECK(inst.clustering.sizes() == std::vector<int>{15, 15, 15, 15});
  GeneratorConfig u = config(30, 3, 0.5, 0.5, 6);
  u.balanced = false;
  u.sizes = {5, 10, 15};
  CHECK(generate_instance(u).clustering.sizes() == u.sizes);
}

TEST_CASE("instance pieces are mutually consistent") {
  const SyntheticInstance inst = generate_instance(config(48, 3, 0.4, 0.7, 7));
  CHECK((probability_from_lambda(inst.lambda).matrix() - inst.probability.matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(inst.lambda.clustering() == inst.clustering);
  CHECK(inst.true_support == breve_support(inst.probability.matrix(), inst.clustering));
  // The labels are scrambled, not sorted.
  CHECK_FALSE(std::is_sorted(inst.clustering.labels().begin(), inst.clustering.labels().end()));
}

TEST_CASE("adjacency is zero wherever the probability is zero") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const SyntheticInstance inst = generate_instance(config(80, 4, 0.3, 0.8, seed));
    const Matrix& p = inst.probability.matrix();
    const Matrix& a = inst.adjacency.matrix();
    for (int i = 0; i < 80; ++i) {
      CHECK(a(i, i) == 0.0);
      for (int j = 0; j < 80; ++j)
        if (p(i, j) == 0.0) CHECK(a(i, j) == 0.0);
    }
  }
}

TEST_CASE("Bernoulli(0) blocks stay empty and Bernoulli(1) gives a complete graph") {
  Matrix p = Matrix::Zero(6, 6);
  p.block(0, 0, 3, 3).setOnes();
  Rng rng(1);
  for (int r = 0; r < 50; ++r) {
    const Matrix a = sample_adjacency(ProbabilityMatrix(p), rng).matrix();
    CHECK(a.block(0, 3, 3, 3).isZero(0.0));
    CHECK(a.block(3, 3, 3, 3).isZero(0.0));
    CHECK(a.block(0, 0, 3, 3).sum() == 6.0);
  }
  const Matrix full = sample_adjacency(ProbabilityMatrix(Matrix::Ones(5, 5)), rng).matrix();
  CHECK(full.sum() == 20.0);
}

TEST_CASE("same seed gives a bit-identical instance") {
  const GeneratorConfig c = config(60, 3, 0.5, 0.8, 42);
  const SyntheticInstance a = generate_instance(c);
  const SyntheticInstance b = generate_instance(c);
  CHECK(a.clustering == b.clustering);
  CHECK(a.lambda.matrix() == b.lambda.matrix());
  CHECK(a.probability.matrix() == b.probability.matrix());
  CHECK(a.adjacency.matrix() == b.adjacency.matrix());
  CHECK(a.true_support == b.true_support);
  GeneratorConfig other = c;
  other.seed = 43;
  CHECK(generate_instance(other).adjacency.matrix() != a.adjacency.matrix());
}

TEST_CASE("mean of diagonal-block probabilities is close to 1/4") {
  double sum = 0.0;
  long long count = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const SyntheticInstance inst = generate_instance(config(300, 4, 0.5, 0.8, seed));
    const Matrix& p = inst.probability.matrix();
    for (int i = 0; i < 300; ++i) {
      for (int j = 0; j < 300; ++j) {
        if (i == j || inst.clustering.label(i) != inst.clustering.label(j)) continue;
        sum += p(i, j);
        ++count;
      }
    }
  }
  CHECK(std::abs(sum / count - 0.25) < 0.02);
}

TEST_CASE("edge frequencies converge to the probabilities") {
  const SyntheticInstance inst = generate_instance(config(10, 2, 0.5, 0.8, 9));
  const Matrix& p = inst.probability.matrix();
  const int reps = 2000;
  Matrix freq = Matrix::Zero(10, 10);
  Rng rng(77);
  for (int r = 0; r < reps; ++r) freq += sample_adjacency(inst.probability, rng).matrix();
  freq /= reps;
  double worst = 0.0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      if (i != j) worst = std::max(worst, std::abs(freq(i, j) - p(i, j)));
  CHECK(worst <= 4.0 * std::sqrt(std::log(10.0) / reps));
}

TEST_CASE("every block of the rearranged probability matrix has rank at most one") {
  const SyntheticInstance inst = generate_instance(config(36, 3, 0.5, 0.8, 10));
  for (int k = 0; k < 3; ++k) {
    for (int l = 0; l < 3; ++l) {
      const Matrix b = block(inst.probability.matrix(), inst.clustering, k, l).materialize();
      Eigen::JacobiSVD<Matrix> svd(b);
      CHECK(svd.singularValues()(1) <= 1e-12 * std::max(1.0, svd.singularValues()(0)));
    }
  }
}
