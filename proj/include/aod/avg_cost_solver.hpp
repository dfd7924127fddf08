// Average-cost solution of the lambda-relaxed MDP.
#pragma once

#include <vector>

#include "aod/aod_mdp.hpp"
#include "aod/kernels.hpp"

namespace aod {

/// Deterministic action table indexed by MdpModel state index.
class PurePolicy {
 public:
  PurePolicy() = default;
  explicit PurePolicy(std::vector<Action> actions) : actions_(std::move(actions)) {}

  static PurePolicy constant(int num_states, Action a) {
    return PurePolicy(std::vector<Action>(static_cast<std::size_t>(num_states), a));
  }

  int size() const { return static_cast<int>(actions_.size()); }
  Action operator[](int s) const { return actions_[static_cast<std::size_t>(s)]; }
  Action& operator[](int s) { return actions_[static_cast<std::size_t>(s)]; }
  const std::vector<Action>& actions() const { return actions_; }

  friend bool operator==(const PurePolicy&, const PurePolicy&) = default;

 private:
  std::vector<Action> actions_;
};

struct RviConfig {
  double span_tolerance = 1e-9;
  long max_iterations = 1'000'000;
  MdpState reference_state = MdpModel::reference_state();
  /// Weight of the self-loop in the aperiodicity transform; 0 disables it.
  /// Some optimal chains are periodic, and plain RVI then never settles.
  double aperiodicity = 0.1;
  /// Action 1 must beat action 0 by more than this to be selected.
  double tie_epsilon = 1e-12;
  kernels::Backend backend = kernels::Backend::OpenMP;
};

struct RviSolution {
  PurePolicy policy;
  double gain = 0.0;
  std::vector<double> bias;  // zero at the reference state
  long iterations = 0;
  double span = 0.0;
};

RviSolution rvi_solve(const MdpModel& model, double lambda, const RviConfig& config = {});

/// Same solver on a bare transition table; reference_state is ignored in
/// favour of reference_index.
RviSolution rvi_solve(const TransitionTable& table, int reference_index, double lambda,
                      const RviConfig& config = {});

struct EvalConfig {
  double tolerance = 1e-12;
  long max_iterations = 10'000'000;
  /// Self-loop weight of the lazy chain iterated; any value in (0, 1) gives
  /// the same limit and removes periodicity.
  double laziness = 0.25;
  MdpState initial_state = MdpModel::reference_state();
  kernels::Backend backend = kernels::Backend::OpenMP;
};

struct PolicyEvaluation {
  double avg_cost = 0.0;       // long-run AoD per slot
  double avg_frequency = 0.0;  // long-run fraction of slots with a request
  std::vector<double> occupation;
  long iterations = 0;
};

/// Long-run averages of a pure policy. The occupation is the limiting
/// distribution of the induced chain started from config.initial_state; for
/// unichain policies this is the stationary distribution.
PolicyEvaluation evaluate_policy(const MdpModel& model, const PurePolicy& policy,
                                 const EvalConfig& config = {});

PolicyEvaluation evaluate_policy(const TransitionTable& table, int initial_index,
                                 const PurePolicy& policy, const EvalConfig& config = {});

}  // namespace aod
