#include <random>

#include "aod/kernels.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace aod;
namespace k = aod::kernels;

namespace {

MdpModel random_model(std::mt19937_64& rng, int n, TruncationConfig t) {
  return MdpModel(Dtmc(aod::testing::random_stochastic(n, rng)), 0.7, t);
}

std::vector<Action> random_policy(std::mt19937_64& rng, int size) {
  std::bernoulli_distribution coin(0.3);
  std::vector<Action> a(static_cast<std::size_t>(size));
  for (auto& v : a) v = coin(rng) ? 1 : 0;
  return a;
}

}  // namespace

TEST_CASE("serial and parallel Bellman backups are bitwise identical") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (double aperiodicity : {0.0, 0.3}) {
    const auto m = random_model(rng, 3, {9, 11});
    const int n = m.size();
    std::vector<double> h(static_cast<std::size_t>(n));
    for (auto& v : h) v = unif(rng);
    std::vector<double> n1(h.size()), n2(h.size());
    std::vector<Action> a1(h.size()), a2(h.size());
    const auto r1 = k::serial::bellman_backup(m.table(), 0.4, aperiodicity, 1e-12, h, n1, a1);
    const auto r2 = k::omp::bellman_backup(m.table(), 0.4, aperiodicity, 1e-12, h, n2, a2);
    CHECK(n1 == n2);
    CHECK(a1 == a2);
    CHECK(r1.lo == r2.lo);
    CHECK(r1.hi == r2.hi);
  }
}

TEST_CASE("Bellman backup against a direct evaluation") {
  std::mt19937_64 rng(12);
  const auto m = random_model(rng, 2, {3, 4});
  const int n = m.size();
  std::vector<double> h(static_cast<std::size_t>(n));
  std::uniform_real_distribution<double> unif(0.0, 2.0);
  for (auto& v : h) v = unif(rng);
  std::vector<double> next(h.size());
  std::vector<Action> act(h.size());
  const double lambda = 0.25;
  const auto range = k::serial::bellman_backup(m.table(), lambda, 0.0, 1e-12, h, next, act);
  double lo = 1e300, hi = -1e300;
  for (int s = 0; s < n; ++s) {
    double q[2];
    for (int u = 0; u < 2; ++u) {
      q[u] = m.cost(m.state_of(s), static_cast<Action>(u)) + lambda * u;
      for (const auto& t : m.transitions(m.state_of(s), static_cast<Action>(u)))
        q[u] += t.prob * h[static_cast<std::size_t>(m.index_of(t.to))];
    }
    const double best = std::min(q[0], q[1]);
    CHECK(next[s] == doctest::Approx(best).epsilon(1e-13));
    if (q[1] < q[0] - 1e-9) CHECK(act[s] == 1);
    if (q[0] < q[1] - 1e-9) CHECK(act[s] == 0);
    lo = std::min(lo, best - h[s]);
    hi = std::max(hi, best - h[s]);
  }
  CHECK(range.lo == doctest::Approx(lo).epsilon(1e-12));
  CHECK(range.hi == doctest::Approx(hi).epsilon(1e-12));
}

TEST_CASE("exact ties resolve to action 0") {
  // One state, both actions self-loop with equal relaxed cost.
  TransitionTable t;
  t.num_states = 1;
  t.offsets = {0, 1, 2};
  t.dest = {0, 0};
  t.prob = {1.0, 1.0};
  t.cost = {0.5, 0.3};
  std::vector<double> h{0.0}, next{0.0};
  std::vector<Action> act{1};
  k::serial::bellman_backup(t, 0.2, 0.0, 1e-12, h, next, act);
  CHECK(act[0] == 0);
  k::omp::bellman_backup(t, 0.2, 0.0, 1e-12, h, next, act);
  CHECK(act[0] == 0);
  k::omp::bellman_backup(t, 0.1, 0.0, 1e-12, h, next, act);
  CHECK(act[0] == 1);
}

TEST_CASE("induced chain rows and transpose") {
  std::mt19937_64 rng(13);
  const auto m = random_model(rng, 3, {4, 4});
  const auto pol = random_policy(rng, m.size());
  const auto chain = k::induce(m.table(), pol);
  const auto dense = aod::testing::induced_dense(m, pol);
  for (int s = 0; s < m.size(); ++s) {
    std::vector<double> row(static_cast<std::size_t>(m.size()), 0.0);
    for (int e = chain.offsets[s]; e < chain.offsets[s + 1]; ++e) row[chain.idx[e]] += chain.prob[e];
    for (int d = 0; d < m.size(); ++d) CHECK(row[d] == doctest::Approx(dense[s][d]).epsilon(1e-14));
  }
  const auto back = k::transpose(chain);
  CHECK(back.idx.size() == chain.idx.size());
  for (int d = 0; d < m.size(); ++d) {
    double col = 0.0;
    for (int e = back.offsets[d]; e < back.offsets[d + 1]; ++e) col += back.prob[e];
    double expect = 0.0;
    for (int s = 0; s < m.size(); ++s) expect += dense[s][d];
    CHECK(col == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("serial scatter and parallel gather propagation agree") {
  std::mt19937_64 rng(14);
  const auto m = random_model(rng, 4, {6, 7});
  const auto pol = random_policy(rng, m.size());
  const auto chain = k::induce(m.table(), pol);
  const auto back = k::transpose(chain);
  std::vector<double> x(static_cast<std::size_t>(m.size()));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double sum = 0.0;
  for (auto& v : x) sum += (v = unif(rng));
  for (auto& v : x) v /= sum;
  std::vector<double> y1(x.size()), y2(x.size());
  k::serial::propagate(chain, 0.25, x, y1);
  k::omp::propagate(back, 0.25, x, y2);
  CHECK(k::l1_distance(y1, y2) < 1e-14);
  double total = 0.0;
  for (double v : y1) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("l1 distance") {
  const std::vector<double> a{1.0, -2.0, 0.5}, b{0.0, 1.0, 0.5};
  CHECK(k::l1_distance(a, b) == 4.0);
}
