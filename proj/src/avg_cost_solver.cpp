#include "aod/avg_cost_solver.hpp"

#include <sstream>
#include <stdexcept>

namespace aod {

RviSolution rvi_solve(const MdpModel& model, double lambda, const RviConfig& config) {
  return rvi_solve(model.table(), model.index_of(config.reference_state), lambda, config);
}

RviSolution rvi_solve(const TransitionTable& table, int ref, double lambda,
                      const RviConfig& config) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  if (!(config.span_tolerance > 0.0)) throw std::invalid_argument("span_tolerance must be > 0");
  if (config.aperiodicity < 0.0 || config.aperiodicity >= 1.0) {
    throw std::invalid_argument("aperiodicity must lie in [0, 1)");
  }
  const int n = table.num_states;
  if (ref < 0 || ref >= n) throw std::out_of_range("reference state index out of range");

  std::vector<double> h(static_cast<std::size_t>(n), 0.0);
  std::vector<double> next(h.size(), 0.0);
  std::vector<Action> action(h.size(), 0);

  kernels::DiffRange range{0.0, 0.0};
  long it = 0;
  bool converged = false;
  while (it < config.max_iterations) {
    ++it;
    range = kernels::bellman_backup(config.backend, table, lambda, config.aperiodicity,
                                    config.tie_epsilon, h, next, action);
    const double anchor = next[static_cast<std::size_t>(ref)];
    for (int s = 0; s < n; ++s) h[s] = next[s] - anchor;
    if (range.span() <= config.span_tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "RVI hit the iteration cap (" << config.max_iterations
        << ") with span " << range.span() << " > " << config.span_tolerance;
    throw ConvergenceError(msg.str());
  }

  // The actions of the last sweep are greedy for the previous bias; one more
  // sweep with the converged bias makes the policy and bias consistent.
  kernels::bellman_backup(config.backend, table, lambda, config.aperiodicity,
                          config.tie_epsilon, h, next, action);

  RviSolution sol;
  sol.policy = PurePolicy(std::move(action));
  sol.gain = 0.5 * (range.lo + range.hi);
  sol.iterations = it;
  sol.span = range.span();
  sol.bias = std::move(h);
  if (config.aperiodicity > 0.0) {
    for (double& v : sol.bias) v *= (1.0 - config.aperiodicity);
  }
  return sol;
}

PolicyEvaluation evaluate_policy(const MdpModel& model, const PurePolicy& policy,
                                 const EvalConfig& config) {
  return evaluate_policy(model.table(), model.index_of(config.initial_state), policy, config);
}

PolicyEvaluation evaluate_policy(const TransitionTable& table, int initial_index,
                                 const PurePolicy& policy, const EvalConfig& config) {
  const int n = table.num_states;
  if (policy.size() != n) {
    throw std::invalid_argument("policy size does not match the state space");
  }
  if (!(config.laziness > 0.0 && config.laziness < 1.0)) {
    throw std::invalid_argument("laziness must lie in (0, 1)");
  }
  if (initial_index < 0 || initial_index >= n) {
    throw std::out_of_range("initial state index out of range");
  }
  const auto chain = kernels::induce(table, policy.actions());
  const bool parallel = config.backend == kernels::Backend::OpenMP;
  const auto backward = parallel ? kernels::transpose(chain) : kernels::InducedChain{};

  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  std::vector<double> y(x.size(), 0.0);
  x[static_cast<std::size_t>(initial_index)] = 1.0;

  long it = 0;
  bool converged = false;
  while (it < config.max_iterations) {
    ++it;
    if (parallel) {
      kernels::omp::propagate(backward, config.laziness, x, y);
    } else {
      kernels::serial::propagate(chain, config.laziness, x, y);
    }
    const double diff = kernels::l1_distance(x, y);
    x.swap(y);
    if (diff <= config.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw ConvergenceError("policy evaluation did not converge within " +
                           std::to_string(config.max_iterations) + " iterations");
  }

  double total = 0.0;
  for (double v : x) total += v;
  PolicyEvaluation out;
  for (int s = 0; s < n; ++s) {
    x[s] /= total;
    const Action u = policy[s];
    out.avg_cost += x[s] * table.cost[table.row(s, u)];
    out.avg_frequency += x[s] * static_cast<double>(u);
  }
  out.occupation = std::move(x);
  out.iterations = it;
  return out;
}

}  // namespace aod
