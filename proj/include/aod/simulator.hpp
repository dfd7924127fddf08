// Slot-level Monte Carlo of the pull-based monitoring system: Markov source,
// request-driven sensor with retransmissions and a Bernoulli-loss channel.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <variant>
#include <vector>

#include "aod/cmdp_dual.hpp"

namespace aod {

enum class MixingMode {
  /// One pure policy drawn per episode.
  Episode,
  /// Independent draw in every slot where the two tables disagree.
  PerStep,
};

struct SimConfig {
  long horizon = 1'000'000;
  int replications = 20;
  long warmup = 10'000;
  std::uint64_t seed = 1;
  bool parallel = true;
};

namespace policy {
struct CmdpMixed {
  MixedPolicy mixed;
  MixingMode mode = MixingMode::Episode;
};
struct PureTable {
  PurePolicy table;
};
/// Request right after every delivery (no pending sample).
struct ZeroWait {};
/// Non-causal: request exactly when the source changed state.
struct Clairvoyant {};
/// Request in every slot t with t % k == 0.
struct Periodic {
  int k = 1;
};
}  // namespace policy

using MonitorPolicy = std::variant<policy::CmdpMixed, policy::PureTable, policy::ZeroWait,
                                   policy::Clairvoyant, policy::Periodic>;

struct TraceRecord {
  long t;
  int true_state;
  int i;  // freshest received state at slot start
  int tau1;
  int tau2;
  Action action;
  bool success;  // a sample was delivered at the end of the slot
};

struct EpisodeMetrics {
  double avg_aod = 0.0;
  double freq = 0.0;
  double fresh_error = 0.0;
  double map_error = 0.0;
  long slots = 0;
};

struct EpisodeResult {
  EpisodeMetrics metrics;
  std::vector<TraceRecord> trace;  // empty unless requested; covers every slot
};

struct Estimate {
  double mean = 0.0;
  double se = 0.0;  // 0 for a single replication
  int n = 0;
};

struct SimMetrics {
  Estimate avg_aod;
  Estimate freq;
  Estimate fresh_error;
  Estimate map_error;
};

/// Independent random streams of one replication.
struct StreamSet {
  Rng chain;
  Rng channel;
  Rng mix;
};

StreamSet make_streams(std::uint64_t seed, int replication);

/// argmax_x P^elapsed[i][x], ties to the smaller index; rows of the
/// stationary distribution beyond the power cache.
int map_estimate(const Dtmc& dtmc, int i, long elapsed);

/// a[t] = 1 iff trajectory[t] != trajectory[t-1]; a[0] = 0.
std::vector<Action> clairvoyant_actions(const std::vector<int>& trajectory);

/// True if, over states reachable from the reference state under the
/// policy, some (tau1 > 0, tau2, i) has actions that differ across j.
bool is_j_dependent(const MdpModel& model, const PurePolicy& policy);

SimMetrics aggregate(const std::vector<EpisodeMetrics>& episodes);

class Simulator {
 public:
  explicit Simulator(const MdpModel& model);

  /// Runs one episode from the reference configuration: the monitor holds a
  /// delivered sample of state 0 taken one slot before t = 0, and the source
  /// is in state 0 at that time.
  EpisodeResult run_episode(const MonitorPolicy& policy, const SimConfig& config,
                            StreamSet& streams, bool record_trace = false) const;

  /// Replications run concurrently when config.parallel is set; results are
  /// identical either way.
  std::vector<EpisodeMetrics> run(const MonitorPolicy& policy, const SimConfig& config) const;

  SimMetrics simulate(const MonitorPolicy& policy, const SimConfig& config) const {
    return aggregate(run(policy, config));
  }

  /// Table coordinate j used for lookups when only (tau1, tau2, i) is
  /// observable: i for tau1 == 0, else the MAP state of P^tau1 row i.
  int resolve_j(int tau1, int i) const;

  const MdpModel& model() const { return model_; }

 private:
  MdpModel model_;
  std::vector<std::vector<int>> map_table_;  // [elapsed][i], elapsed <= max_power
  std::vector<int> map_stationary_;
};

void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace);

}  // namespace aod
