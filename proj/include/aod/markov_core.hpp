// Finite ergodic discrete-time Markov chains.
#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace aod {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised when a transition matrix fails validation.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by iterative routines that hit their iteration cap.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Rng = std::mt19937_64;

/// Stationary distribution of a Dtmc.
struct StationaryDist {
  std::vector<double> pi;
  int iterations = 0;
};

/// Row-stochastic, irreducible and aperiodic transition matrix together with
/// its cached powers P^0 .. P^max_power. Immutable after construction.
class Dtmc {
 public:
  static constexpr int kDefaultMaxPower = 64;

  explicit Dtmc(const std::vector<std::vector<double>>& rows,
                int max_power = kDefaultMaxPower);
  explicit Dtmc(Matrix p, int max_power = kDefaultMaxPower);

  /// Two-state chain [[1-p01, p01], [p10, 1-p10]].
  static Dtmc two_state(double p01, double p10, int max_power = kDefaultMaxPower);

  int size() const { return static_cast<int>(p_.rows()); }
  int max_power() const { return static_cast<int>(powers_.size()) - 1; }

  double prob(int i, int j) const { return p_(i, j); }
  const Matrix& matrix() const { return p_; }

  /// P^k. Throws std::out_of_range if k exceeds the cache bound.
  const Matrix& n_step(int k) const;

  /// (P[j][j])^k: probability of k consecutive self-loops at j. This is not
  /// the (j, j) entry of P^k.
  double self_stay_power(int j, int k) const;

  /// Power iteration from the uniform vector; tolerance 1e-12 in L1.
  StationaryDist stationary(double tolerance = 1e-12, int max_iterations = 1'000'000) const;

  /// Draws the successor of state i.
  int step_sample(int i, Rng& rng) const;

  /// Same Dtmc with a cache covering at least k powers.
  Dtmc with_max_power(int k) const;

 private:
  Matrix p_;
  std::vector<Matrix> powers_;
};

/// Inverse-CDF draw from a probability row given u in [0, 1). Exposed so that
/// degenerate rows can be exercised directly.
int sample_row(std::span<const double> row, double u);

/// True if the support graph of p is strongly connected.
bool is_irreducible(const Matrix& p);

/// Period of an irreducible chain (gcd of cycle lengths).
int period(const Matrix& p);

}  // namespace aod
