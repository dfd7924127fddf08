#include "aod/cmdp_dual.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace aod {

namespace {

// Frequencies are exact stationary expectations; treat differences below
// this as equality.
constexpr double kFreqTolerance = 1e-12;

LambdaProbe to_probe(const FrequencyResult& r) {
  return {r.lambda, r.gain, r.frequency, r.avg_cost};
}

}  // namespace

FrequencyResult frequency_of_lambda(const MdpModel& model, double lambda,
                                    const DualConfig& config) {
  auto rvi = rvi_solve(model, lambda, config.rvi);
  const auto eval = evaluate_policy(model, rvi.policy, config.eval);
  FrequencyResult out;
  out.lambda = lambda;
  out.frequency = eval.avg_frequency;
  out.avg_cost = eval.avg_cost;
  out.gain = rvi.gain;
  out.policy = std::move(rvi.policy);
  return out;
}

double mixing_probability(double f_minus, double f_plus, double nu) {
  if (!(f_minus > f_plus)) {
    throw std::invalid_argument("mixing_probability: need f_minus > f_plus");
  }
  if (nu < f_plus - kFreqTolerance || nu > f_minus + kFreqTolerance) {
    std::ostringstream msg;
    msg << "mixing_probability: nu=" << nu << " outside [" << f_plus << ", " << f_minus << "]";
    throw std::invalid_argument(msg.str());
  }
  return std::clamp((nu - f_plus) / (f_minus - f_plus), 0.0, 1.0);
}

CmdpSolution solve_cmdp(const MdpModel& model, double nu, const DualConfig& config) {
  if (!(nu > 0.0 && nu <= 1.0)) throw std::invalid_argument("nu must lie in (0, 1]");
  if (!(config.lambda_lo >= 0.0 && config.lambda_lo < config.lambda_hi)) {
    throw std::invalid_argument("need 0 <= lambda_lo < lambda_hi");
  }
  if (!(config.lambda_tolerance > 0.0) || !(config.epsilon > 0.0)) {
    throw std::invalid_argument("lambda_tolerance and epsilon must be > 0");
  }

  CmdpSolution sol;
  sol.nu = nu;
  auto record = [&](FrequencyResult r) {
    sol.trace.push_back(to_probe(r));
    return r;
  };
  auto finish_pure = [&](const FrequencyResult& r, bool active) {
    sol.lambda_star = sol.lambda_minus = sol.lambda_plus = r.lambda;
    sol.mixed = {r.policy, r.policy, 1.0};
    sol.avg_cost = sol.cost_minus = sol.cost_plus = r.avg_cost;
    sol.frequency = sol.freq_minus = sol.freq_plus = r.frequency;
    sol.constraint_active = active;
    return sol;
  };

  auto lo = record(frequency_of_lambda(model, config.lambda_lo, config));
  if (lo.frequency <= nu + kFreqTolerance) return finish_pure(lo, false);

  auto hi = record(frequency_of_lambda(model, config.lambda_hi, config));
  if (hi.frequency > nu + kFreqTolerance) {
    std::ostringstream msg;
    msg << "f(lambda_hi=" << config.lambda_hi << ") = " << hi.frequency << " exceeds nu = " << nu
        << "; increase lambda_hi";
    throw BracketError(msg.str());
  }

  while (hi.lambda - lo.lambda > config.lambda_tolerance) {
    const double mid = 0.5 * (lo.lambda + hi.lambda);
    auto r = record(frequency_of_lambda(model, mid, config));
    if (std::abs(r.frequency - nu) <= kFreqTolerance) return finish_pure(r, true);
    if (r.frequency > nu) {
      lo = std::move(r);
    } else {
      hi = std::move(r);
    }
  }

  const double lambda_star = 0.5 * (lo.lambda + hi.lambda);
  auto minus = record(frequency_of_lambda(
      model, std::max(config.lambda_lo, lambda_star - config.epsilon), config));
  auto plus = record(frequency_of_lambda(model, lambda_star + config.epsilon, config));
  // Monotonicity can only fail through solver tolerance; the bracket ends are
  // ordered by construction.
  if (!(minus.frequency >= nu && plus.frequency <= nu && minus.frequency > plus.frequency)) {
    minus = lo;
    plus = hi;
  }

  sol.lambda_star = lambda_star;
  sol.lambda_minus = minus.lambda;
  sol.lambda_plus = plus.lambda;
  sol.constraint_active = true;
  const double mu = mixing_probability(minus.frequency, plus.frequency, nu);
  sol.cost_minus = minus.avg_cost;
  sol.freq_minus = minus.frequency;
  sol.cost_plus = plus.avg_cost;
  sol.freq_plus = plus.frequency;
  sol.avg_cost = mu * minus.avg_cost + (1.0 - mu) * plus.avg_cost;
  sol.frequency = mu * minus.frequency + (1.0 - mu) * plus.frequency;
  sol.mixed = {std::move(minus.policy), std::move(plus.policy), mu};
  return sol;
}

}  // namespace aod
