#include "aod/markov_core.hpp"

#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

namespace aod {

namespace {

constexpr double kRowSumTolerance = 1e-12;

std::vector<int> bfs_levels(const Matrix& p, bool reverse) {
  const int n = static_cast<int>(p.rows());
  std::vector<int> level(n, -1);
  std::queue<int> frontier;
  level[0] = 0;
  frontier.push(0);
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v = 0; v < n; ++v) {
      const double w = reverse ? p(v, u) : p(u, v);
      if (w > 0.0 && level[v] < 0) {
        level[v] = level[u] + 1;
        frontier.push(v);
      }
    }
  }
  return level;
}

void validate(const Matrix& p) {
  if (p.rows() != p.cols()) {
    throw ModelError("transition matrix must be square");
  }
  if (p.rows() < 2) {
    throw ModelError("transition matrix needs at least 2 states");
  }
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      const double v = p(i, j);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        std::ostringstream msg;
        msg << "entry (" << i << "," << j << ") = " << v << " is not a probability";
        throw ModelError(msg.str());
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "row " << i << " sums to " << sum << ", expected 1";
      throw ModelError(msg.str());
    }
  }
  if (!is_irreducible(p)) {
    throw ModelError("chain is not ergodic: more than one communicating class");
  }
  if (const int d = period(p); d != 1) {
    throw ModelError("chain is not ergodic: period " + std::to_string(d));
  }
}

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix p(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != n) {
      throw ModelError("transition matrix must be square");
    }
    for (Eigen::Index j = 0; j < n; ++j) p(i, j) = rows[i][j];
  }
  return p;
}

}  // namespace

bool is_irreducible(const Matrix& p) {
  for (bool reverse : {false, true}) {
    for (int l : bfs_levels(p, reverse)) {
      if (l < 0) return false;
    }
  }
  return true;
}

int period(const Matrix& p) {
  const auto level = bfs_levels(p, false);
  int g = 0;
  for (Eigen::Index u = 0; u < p.rows(); ++u) {
    for (Eigen::Index v = 0; v < p.cols(); ++v) {
      if (p(u, v) > 0.0 && level[u] >= 0 && level[v] >= 0) {
        g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
      }
    }
  }
  return g;
}

Dtmc::Dtmc(const std::vector<std::vector<double>>& rows, int max_power)
    : Dtmc(from_rows(rows), max_power) {}

Dtmc::Dtmc(Matrix p, int max_power) : p_(std::move(p)) {
  validate(p_);
  if (max_power < 1) max_power = 1;
  powers_.reserve(static_cast<std::size_t>(max_power) + 1);
  powers_.push_back(Matrix::Identity(p_.rows(), p_.cols()));
  for (int k = 0; k < max_power; ++k) {
    powers_.push_back(powers_.back() * p_);
  }
}

Dtmc Dtmc::two_state(double p01, double p10, int max_power) {
  return Dtmc(std::vector<std::vector<double>>{{1.0 - p01, p01}, {p10, 1.0 - p10}}, max_power);
}

const Matrix& Dtmc::n_step(int k) const {
  if (k < 0 || k > max_power()) {
    throw std::out_of_range("n_step exponent " + std::to_string(k) +
                            " outside cache bound " + std::to_string(max_power()));
  }
  return powers_[static_cast<std::size_t>(k)];
}

double Dtmc::self_stay_power(int j, int k) const {
  if (j < 0 || j >= size() || k < 0) {
    throw std::out_of_range("self_stay_power: state or exponent out of range");
  }
  const double pjj = p_(j, j);
  double out = 1.0;
  for (int e = 0; e < k; ++e) out *= pjj;
  return out;
}

StationaryDist Dtmc::stationary(double tolerance, int max_iterations) const {
  const auto n = p_.rows();
  Eigen::RowVectorXd pi = Eigen::RowVectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (int it = 1; it <= max_iterations; ++it) {
    Eigen::RowVectorXd next = pi * p_;
    next /= next.sum();
    const double diff = (next - pi).cwiseAbs().sum();
    pi = std::move(next);
    if (diff <= tolerance) {
      return {std::vector<double>(pi.data(), pi.data() + n), it};
    }
  }
  throw ConvergenceError("stationary distribution did not converge");
}

int sample_row(std::span<const double> row, double u) {
  double acc = 0.0;
  int last_positive = 0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (row[k] <= 0.0) continue;
    acc += row[k];
    last_positive = static_cast<int>(k);
    if (u < acc) return last_positive;
  }
  // Rounding left u above the accumulated mass.
  return last_positive;
}

int Dtmc::step_sample(int i, Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  // Eigen is column-major; copy the row into contiguous storage.
  double buf[16];
  const int n = size();
  if (n <= 16) {
    for (int j = 0; j < n; ++j) buf[j] = p_(i, j);
    return sample_row(std::span<const double>(buf, static_cast<std::size_t>(n)), u);
  }
  std::vector<double> row(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = p_(i, j);
  return sample_row(row, u);
}

Dtmc Dtmc::with_max_power(int k) const {
  if (k <= max_power()) return *this;
  return Dtmc(p_, k);
}

}  // namespace aod
