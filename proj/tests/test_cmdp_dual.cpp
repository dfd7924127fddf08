#include <algorithm>
#include <cmath>

#include "aod/cmdp_dual.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace aod;

namespace {

MdpModel default_model(double p01 = 0.02) {
  return MdpModel(Dtmc::two_state(p01, 0.01), 0.8, {20, 20});
}

}  // namespace

TEST_CASE("mixing probability") {
  CHECK(mixing_probability(0.12, 0.08, 0.1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(mixing_probability(0.12, 0.08, 0.08) == 0.0);
  CHECK(mixing_probability(0.12, 0.08, 0.12) == 1.0);
  CHECK_THROWS_AS(mixing_probability(0.08, 0.12, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(mixing_probability(0.1, 0.1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(mixing_probability(0.12, 0.08, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(mixing_probability(0.12, 0.08, 0.01), std::invalid_argument);
}

TEST_CASE("nu = 1 leaves the constraint inactive") {
  const auto m = default_model();
  const auto sol = solve_cmdp(m, 1.0);
  CHECK_FALSE(sol.constraint_active);
  CHECK(sol.lambda_star == 0.0);
  CHECK(sol.mixed.is_pure());
  CHECK(sol.mixed.mu == 1.0);
  CHECK(sol.trace.size() == 1);
}

TEST_CASE("frequency is nonincreasing on a lambda grid") {
  const auto m = default_model();
  double prev = 2.0;
  for (int k = 0; k <= 10; ++k) {
    const auto r = frequency_of_lambda(m, 0.1 * k);
    CAPTURE(r.lambda);
    CHECK(r.frequency <= prev + 1e-12);
    CHECK(r.frequency >= 0.0);
    CHECK(std::abs(r.avg_cost + r.lambda * r.frequency - r.gain) <= 1e-6);
    prev = r.frequency;
  }
}

TEST_CASE("large lambda makes sampling vanish") {
  const auto r = frequency_of_lambda(default_model(), 10.0);
  CHECK(r.frequency <= 1e-9);
}

TEST_CASE("default parameters: mixing, slackness and duality") {
  const auto m = default_model();
  const double nu = 0.1;
  const auto sol = solve_cmdp(m, nu);
  REQUIRE(sol.constraint_active);
  CHECK(sol.lambda_minus < sol.lambda_plus);
  CHECK(sol.freq_minus >= nu - 1e-12);
  CHECK(sol.freq_plus <= nu + 1e-12);
  CHECK(sol.mixed.mu >= 0.0);
  CHECK(sol.mixed.mu <= 1.0);

  // Complementary slackness, recomputed from fresh evaluations of both tables.
  const auto em = evaluate_policy(m, sol.mixed.pi_minus);
  const auto ep = evaluate_policy(m, sol.mixed.pi_plus);
  const double mu = sol.mixed.mu;
  CHECK(std::abs(mu * em.avg_frequency + (1 - mu) * ep.avg_frequency - nu) <= 1e-6);
  CHECK(std::abs(mu * em.avg_cost + (1 - mu) * ep.avg_cost - sol.avg_cost) <= 1e-12);
  CHECK(sol.frequency <= nu + 1e-6);
  CHECK(sol.avg_cost >= 0.0);
  CHECK(sol.avg_cost <= 1.0);

  // Weak duality and monotone probes over the recorded trace.
  for (const auto& p : sol.trace) CHECK(p.gain - p.lambda * nu <= sol.avg_cost + 1e-6);
  auto probes = sol.trace;
  std::sort(probes.begin(), probes.end(),
            [](const LambdaProbe& a, const LambdaProbe& b) { return a.lambda < b.lambda; });
  for (std::size_t k = 1; k < probes.size(); ++k)
    CHECK(probes[k].frequency <= probes[k - 1].frequency + 1e-12);

  // The lambda = 0 probe carries the largest frequency of the trace.
  const auto f0 = frequency_of_lambda(m, 0.0);
  double fmax = 0.0;
  for (const auto& p : sol.trace) fmax = std::max(fmax, p.frequency);
  CHECK(fmax == f0.frequency);
  CHECK(sol.trace.front().lambda == 0.0);
}

TEST_CASE("deterministic solution") {
  const auto m = default_model(0.03);
  const auto a = solve_cmdp(m, 0.1);
  const auto b = solve_cmdp(m, 0.1);
  CHECK(a.lambda_star == b.lambda_star);
  CHECK(a.mixed.mu == b.mixed.mu);
  CHECK(a.mixed.pi_minus == b.mixed.pi_minus);
  CHECK(a.mixed.pi_plus == b.mixed.pi_plus);
}

TEST_CASE("a probe hitting nu exactly returns a pure policy") {
  const auto m = default_model();
  // Take nu from the frequency realised at the first bisection midpoint.
  DualConfig cfg;
  const auto mid = frequency_of_lambda(m, 0.5 * (cfg.lambda_lo + cfg.lambda_hi), cfg);
  REQUIRE(mid.frequency > 0.0);
  const auto sol = solve_cmdp(m, mid.frequency, cfg);
  CHECK(sol.mixed.is_pure());
  CHECK(sol.frequency == mid.frequency);
}

TEST_CASE("input validation and bracket failure") {
  const auto m = default_model();
  CHECK_THROWS_AS(solve_cmdp(m, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_cmdp(m, 1.5), std::invalid_argument);
  DualConfig bad;
  bad.lambda_lo = 1.0;
  bad.lambda_hi = 1.0;
  CHECK_THROWS_AS(solve_cmdp(m, 0.1, bad), std::invalid_argument);
  DualConfig narrow;
  narrow.lambda_hi = 0.01;
  CHECK_THROWS_AS(solve_cmdp(m, 0.1, narrow), BracketError);
}

TEST_CASE("dominant policy follows the larger weight") {
  MixedPolicy mp{PurePolicy::constant(3, 0), PurePolicy::constant(3, 1), 0.5};
  CHECK(&mp.dominant() == &mp.pi_minus);
  mp.mu = 0.3;
  CHECK(&mp.dominant() == &mp.pi_plus);
  CHECK_FALSE(mp.is_pure());
  mp.mu = 0.0;
  CHECK(mp.is_pure());
}
