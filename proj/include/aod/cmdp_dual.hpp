// Frequency-constrained problem: Lagrange multiplier search and the
// randomized policy that meets the constraint with equality.
#pragma once

#include <stdexcept>
#include <vector>

#include "aod/avg_cost_solver.hpp"

namespace aod {

/// f(lambda_hi) still exceeds the frequency budget.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DualConfig {
  double lambda_lo = 0.0;
  double lambda_hi = 50.0;
  double lambda_tolerance = 1e-4;
  double epsilon = 1e-4;
  RviConfig rvi;
  EvalConfig eval;
};

struct LambdaProbe {
  double lambda;
  double gain;
  double frequency;
  double avg_cost;
};

struct FrequencyResult {
  double lambda = 0.0;
  double frequency = 0.0;
  double avg_cost = 0.0;
  double gain = 0.0;
  PurePolicy policy;
};

/// Randomization between two pure policies: pi_minus is used with
/// probability mu, pi_plus otherwise.
struct MixedPolicy {
  PurePolicy pi_minus;
  PurePolicy pi_plus;
  double mu = 1.0;

  /// The pure policy carrying the larger weight (pi_minus on mu == 0.5).
  const PurePolicy& dominant() const { return mu >= 0.5 ? pi_minus : pi_plus; }
  bool is_pure() const { return mu == 1.0 || mu == 0.0 || pi_minus == pi_plus; }
};

struct CmdpSolution {
  double nu = 0.0;
  double lambda_star = 0.0;
  double lambda_minus = 0.0;
  double lambda_plus = 0.0;
  MixedPolicy mixed;
  double avg_cost = 0.0;   // J of the mixture
  double frequency = 0.0;  // f of the mixture
  double cost_minus = 0.0, freq_minus = 0.0;
  double cost_plus = 0.0, freq_plus = 0.0;
  bool constraint_active = false;
  std::vector<LambdaProbe> trace;
};

/// Solves the relaxed problem at lambda and evaluates the optimal pure policy.
FrequencyResult frequency_of_lambda(const MdpModel& model, double lambda,
                                    const DualConfig& config = {});

/// mu = (nu - f_plus) / (f_minus - f_plus). Requires f_plus <= nu <= f_minus
/// and f_minus > f_plus.
double mixing_probability(double f_minus, double f_plus, double nu);

CmdpSolution solve_cmdp(const MdpModel& model, double nu, const DualConfig& config = {});

}  // namespace aod
