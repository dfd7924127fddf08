#include <cmath>
#include <random>

#include "aod/markov_core.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace aod;
using aod::testing::Dense;

namespace {
const Dense kDefault{{0.98, 0.02}, {0.01, 0.99}};
}

TEST_CASE("construction validates the chain") {
  CHECK_NOTHROW((void)Dtmc(kDefault));
  CHECK_THROWS_AS(Dtmc(Dense{{1.0, 0.0}, {0.0, 1.0}}), ModelError);  // two closed classes
  CHECK_THROWS_AS(Dtmc(Dense{{0.5, 0.6}, {0.2, 0.8}}), ModelError);  // row sum 1.1
  CHECK_THROWS_AS(Dtmc(Dense{{1.0}}), ModelError);                   // n < 2
  CHECK_THROWS_AS(Dtmc(Dense{{0.0, 1.0}, {1.0, 0.0}}), ModelError);  // period 2
  CHECK_THROWS_AS(Dtmc(Dense{{0.5, 0.5}, {0.5}}), ModelError);       // ragged
  CHECK_THROWS_AS(Dtmc(Dense{{1.5, -0.5}, {0.5, 0.5}}), ModelError);
  // Transient state 0 feeding a closed class {1, 2}.
  CHECK_THROWS_AS(Dtmc(Dense{{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.0, 0.5, 0.5}}), ModelError);
}

TEST_CASE("period and irreducibility helpers") {
  Matrix cyc(3, 3);
  cyc << 0, 1, 0, 0, 0, 1, 1, 0, 0;
  CHECK(is_irreducible(cyc));
  CHECK(period(cyc) == 3);
  Matrix lazy = 0.5 * (cyc + Matrix::Identity(3, 3));
  CHECK(period(lazy) == 1);
}

TEST_CASE("n_step matches hand multiplication") {
  const Dtmc d(kDefault);
  CHECK(d.n_step(0).isIdentity());
  const Dense p2 = aod::testing::matpow(kDefault, 2);
  const Dense p3 = aod::testing::matpow(kDefault, 3);
  CHECK(p2[0][0] == doctest::Approx(0.9606).epsilon(1e-14));
  CHECK(p3[0][0] == doctest::Approx(0.941782).epsilon(1e-14));
  CHECK(std::abs(d.n_step(2)(0, 0) - 0.9606) < 1e-12);
  CHECK(std::abs(d.n_step(3)(0, 0) - 0.941782) < 1e-12);
  CHECK(&d.n_step(3) == &d.n_step(3));
  CHECK_THROWS_AS(d.n_step(d.max_power() + 1), std::out_of_range);
  CHECK_THROWS_AS(d.n_step(-1), std::out_of_range);
}

TEST_CASE("cached powers are row-stochastic and chained") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 4;
    const Dtmc d(aod::testing::random_stochastic(n, rng), 40);
    for (int k = 0; k < d.max_power(); ++k) {
      const Matrix next = d.n_step(k) * d.matrix();
      CHECK((next - d.n_step(k + 1)).cwiseAbs().maxCoeff() <= 1e-12);
      for (int i = 0; i < n; ++i) CHECK(std::abs(d.n_step(k).row(i).sum() - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("self_stay_power is a scalar power, not a matrix entry") {
  const Dtmc d(kDefault);
  CHECK(d.self_stay_power(0, 0) == 1.0);
  CHECK(std::abs(d.self_stay_power(0, 2) - 0.9604) < 1e-15);
  CHECK(std::abs(d.self_stay_power(1, 5) - 0.9509900499) < 1e-15);
  CHECK(d.self_stay_power(0, 2) != doctest::Approx(d.n_step(2)(0, 0)));
  CHECK_THROWS_AS(d.self_stay_power(2, 1), std::out_of_range);
}

TEST_CASE("stationary distribution") {
  auto pi = Dtmc(kDefault).stationary().pi;
  CHECK(std::abs(pi[0] - 1.0 / 3.0) < 1e-10);
  CHECK(std::abs(pi[1] - 2.0 / 3.0) < 1e-10);
  pi = Dtmc(Dense{{0.9, 0.1}, {0.1, 0.9}}).stationary().pi;
  CHECK(std::abs(pi[0] - 0.5) < 1e-12);
  pi = Dtmc(Dense{{0.97, 0.03}, {0.01, 0.99}}).stationary().pi;
  CHECK(std::abs(pi[0] - 0.25) < 1e-10);
  CHECK(std::abs(pi[1] - 0.75) < 1e-10);
  CHECK_THROWS_AS(Dtmc(kDefault).stationary(1e-12, 3), ConvergenceError);
}

TEST_CASE("stationary fixed point on random chains") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Dtmc d(aod::testing::random_stochastic(2 + trial % 5, rng));
    const auto pi = d.stationary().pi;
    const Eigen::Map<const Eigen::RowVectorXd> row(pi.data(), static_cast<Eigen::Index>(pi.size()));
    CHECK((row * d.matrix() - row).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(std::abs(row.sum() - 1.0) <= 1e-12);
    CHECK(row.minCoeff() > 0.0);
  }
}

TEST_CASE("Chapman-Kolmogorov on random exponents") {
  std::mt19937_64 rng(7);
  const Dtmc d(aod::testing::random_stochastic(4, rng), 40);
  std::uniform_int_distribution<int> k(0, 20);
  for (int trial = 0; trial < 50; ++trial) {
    const int a = k(rng), b = k(rng);
    CHECK((d.n_step(a + b) - d.n_step(a) * d.n_step(b)).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("powers converge to the stationary rows") {
  // Two-state closed form: P^k = Pi + (1-a-b)^k / (a+b) * [[a, -a], [-b, b]].
  // With a = 0.02, b = 0.01 the gap at k = 200 is still about 1.5e-3.
  const double a = 0.02, b = 0.01;
  const Dtmc d(kDefault, 500);
  const double pi[2] = {b / (a + b), a / (a + b)};
  for (int k : {1, 50, 200, 500}) {
    const double r = aod::testing::scalar_pow(1.0 - a - b, k) / (a + b);
    const double gap[2][2] = {{a * r, -a * r}, {-b * r, b * r}};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(std::abs(d.n_step(k)(i, j) - pi[j] - gap[i][j]) <= 1e-12);
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(std::abs(d.n_step(500)(i, j) - pi[j]) <= 1e-6);
}

TEST_CASE("never leaving is a subset of returning") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const Dtmc d(aod::testing::random_stochastic(3, rng), 30);
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k <= 30; ++k) CHECK(d.self_stay_power(j, k) <= d.n_step(k)(j, j) + 1e-15);
  }
}

TEST_CASE("sampling") {
  const double degenerate[] = {0.0, 1.0};
  for (double u : {0.0, 0.3, 0.999999}) CHECK(sample_row(degenerate, u) == 1);
  const double row[] = {0.25, 0.0, 0.75};
  CHECK(sample_row(row, 0.2) == 0);
  CHECK(sample_row(row, 0.25) == 2);
  CHECK(sample_row(row, 1.0) == 2);

  const Dtmc d(kDefault);
  Rng rng(42);
  const int draws = 1'000'000;
  int moved = 0;
  for (int k = 0; k < draws; ++k) moved += d.step_sample(0, rng) == 1;
  const double p = 0.02;
  const double se = std::sqrt(p * (1 - p) / draws);
  CHECK(std::abs(static_cast<double>(moved) / draws - p) <= 3 * se);

  Rng a(3), b(3);
  int xa = 0, xb = 0;
  for (int t = 0; t < 1000; ++t) {
    xa = d.step_sample(xa, a);
    xb = d.step_sample(xb, b);
    REQUIRE(xa == xb);
  }
}
