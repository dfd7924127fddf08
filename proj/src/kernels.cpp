#include "aod/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aod::kernels {

namespace {

inline double q_value(const TransitionTable& t, int s, int u, double lambda, double aperiodicity,
                      std::span<const double> h) {
  const int r = t.row(s, u);
  double expect = 0.0;
  for (int e = t.offsets[r]; e < t.offsets[r + 1]; ++e) {
    expect += t.prob[e] * h[t.dest[e]];
  }
  if (aperiodicity > 0.0) {
    expect = aperiodicity * h[s] + (1.0 - aperiodicity) * expect;
  }
  return t.cost[r] + lambda * u + expect;
}

inline void backup_state(const TransitionTable& t, int s, double lambda, double aperiodicity,
                         double tie_eps, std::span<const double> h, std::span<double> next,
                         std::span<Action> action) {
  const double q0 = q_value(t, s, 0, lambda, aperiodicity, h);
  const double q1 = q_value(t, s, 1, lambda, aperiodicity, h);
  if (q1 < q0 - tie_eps) {
    next[s] = q1;
    action[s] = 1;
  } else {
    next[s] = q0;
    action[s] = 0;
  }
}

}  // namespace

namespace serial {

DiffRange bellman_backup(const TransitionTable& t, double lambda, double aperiodicity,
                         double tie_eps, std::span<const double> h, std::span<double> next,
                         std::span<Action> action) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int s = 0; s < t.num_states; ++s) {
    backup_state(t, s, lambda, aperiodicity, tie_eps, h, next, action);
    const double d = next[s] - h[s];
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return {lo, hi};
}

void propagate(const InducedChain& forward, double laziness, std::span<const double> x,
               std::span<double> y) {
  for (int s = 0; s < forward.num_states; ++s) y[s] = laziness * x[s];
  const double move = 1.0 - laziness;
  for (int s = 0; s < forward.num_states; ++s) {
    const double mass = move * x[s];
    if (mass == 0.0) continue;
    for (int e = forward.offsets[s]; e < forward.offsets[s + 1]; ++e) {
      y[forward.idx[e]] += mass * forward.prob[e];
    }
  }
}

}  // namespace serial

namespace omp {

DiffRange bellman_backup(const TransitionTable& t, double lambda, double aperiodicity,
                         double tie_eps, std::span<const double> h, std::span<double> next,
                         std::span<Action> action) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const int n = t.num_states;
#pragma omp parallel for schedule(static) reduction(min : lo) reduction(max : hi)
  for (int s = 0; s < n; ++s) {
    backup_state(t, s, lambda, aperiodicity, tie_eps, h, next, action);
    const double d = next[s] - h[s];
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return {lo, hi};
}

void propagate(const InducedChain& backward, double laziness, std::span<const double> x,
               std::span<double> y) {
  const int n = backward.num_states;
  const double move = 1.0 - laziness;
#pragma omp parallel for schedule(static)
  for (int s = 0; s < n; ++s) {
    double acc = 0.0;
    for (int e = backward.offsets[s]; e < backward.offsets[s + 1]; ++e) {
      acc += x[backward.idx[e]] * backward.prob[e];
    }
    y[s] = laziness * x[s] + move * acc;
  }
}

}  // namespace omp

DiffRange bellman_backup(Backend b, const TransitionTable& t, double lambda,
                         double aperiodicity, double tie_eps, std::span<const double> h,
                         std::span<double> next, std::span<Action> action) {
  return b == Backend::OpenMP
             ? omp::bellman_backup(t, lambda, aperiodicity, tie_eps, h, next, action)
             : serial::bellman_backup(t, lambda, aperiodicity, tie_eps, h, next, action);
}

InducedChain induce(const TransitionTable& t, std::span<const Action> policy) {
  InducedChain c;
  c.num_states = t.num_states;
  c.offsets.reserve(static_cast<std::size_t>(t.num_states) + 1);
  c.offsets.push_back(0);
  for (int s = 0; s < t.num_states; ++s) {
    const int r = t.row(s, policy[s]);
    for (int e = t.offsets[r]; e < t.offsets[r + 1]; ++e) {
      c.idx.push_back(t.dest[e]);
      c.prob.push_back(t.prob[e]);
    }
    c.offsets.push_back(static_cast<std::int32_t>(c.idx.size()));
  }
  return c;
}

InducedChain transpose(const InducedChain& c) {
  InducedChain out;
  out.num_states = c.num_states;
  std::vector<std::int32_t> count(static_cast<std::size_t>(c.num_states) + 1, 0);
  for (auto d : c.idx) ++count[static_cast<std::size_t>(d) + 1];
  for (std::size_t k = 1; k < count.size(); ++k) count[k] += count[k - 1];
  out.offsets = count;
  out.idx.resize(c.idx.size());
  out.prob.resize(c.prob.size());
  for (int s = 0; s < c.num_states; ++s) {
    for (int e = c.offsets[s]; e < c.offsets[s + 1]; ++e) {
      const auto slot = count[static_cast<std::size_t>(c.idx[e])]++;
      out.idx[slot] = s;
      out.prob[slot] = c.prob[e];
    }
  }
  return out;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d += std::abs(a[k] - b[k]);
  return d;
}

}  // namespace aod::kernels
