// Inner loops of the solvers. Every kernel has a serial reference and an
// OpenMP version; the serial one is kept for testing and benchmarking.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aod/aod_mdp.hpp"

namespace aod::kernels {

enum class Backend { Serial, OpenMP };

/// min and max of (next - h) over all states after a backup.
struct DiffRange {
  double lo;
  double hi;
  double span() const { return hi - lo; }
};

/// One backup of the lambda-relaxed Bellman operator
///   next[s] = min_u  c(s,u) + lambda*u + sum_s' Pa(s'|s,u) h[s'],
/// with Pa = a*I + (1-a)*P (a = aperiodicity, 0 disables the transform).
/// Ties within tie_eps resolve to action 0.
namespace serial {
DiffRange bellman_backup(const TransitionTable& t, double lambda, double aperiodicity,
                         double tie_eps, std::span<const double> h, std::span<double> next,
                         std::span<Action> action);
}
namespace omp {
DiffRange bellman_backup(const TransitionTable& t, double lambda, double aperiodicity,
                         double tie_eps, std::span<const double> h, std::span<double> next,
                         std::span<Action> action);
}

DiffRange bellman_backup(Backend b, const TransitionTable& t, double lambda,
                         double aperiodicity, double tie_eps, std::span<const double> h,
                         std::span<double> next, std::span<Action> action);

/// Markov chain induced by a deterministic policy, stored as CSR rows.
struct InducedChain {
  int num_states = 0;
  std::vector<std::int32_t> offsets;
  std::vector<std::int32_t> idx;
  std::vector<double> prob;
};

InducedChain induce(const TransitionTable& t, std::span<const Action> policy);

/// Column-major view (row s lists the predecessors of s).
InducedChain transpose(const InducedChain& c);

/// y = x * (laziness*I + (1-laziness)*P).
/// serial: scatter over the forward chain; omp: gather over the transpose.
namespace serial {
void propagate(const InducedChain& forward, double laziness, std::span<const double> x,
               std::span<double> y);
}
namespace omp {
void propagate(const InducedChain& backward, double laziness, std::span<const double> x,
               std::span<double> y);
}

/// L1 distance.
double l1_distance(std::span<const double> a, std::span<const double> b);

}  // namespace aod::kernels
