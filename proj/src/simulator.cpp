#include "aod/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>
#include <random>
#include <type_traits>

namespace aod {

namespace {

enum Purpose : std::uint32_t { kChain = 0, kChannel = 1, kMix = 2 };

Rng make_stream(std::uint64_t seed, int replication, Purpose purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replication), static_cast<std::uint32_t>(purpose)};
  return Rng(seq);
}

template <typename Row>
int argmax_row(const Row& row, int n) {
  int best = 0;
  for (int x = 1; x < n; ++x) {
    if (row(x) > row(best)) best = x;
  }
  return best;
}

// Per-slot decision state for the policy variants.
struct Decider {
  const Simulator& sim;
  const MonitorPolicy& policy;
  const PurePolicy* episode_table = nullptr;

  Action operator()(long t, int tau1, int tau2, int i, int prev, int x, bool pending,
                    Rng& mix) const {
    return std::visit(
        [&](const auto& p) -> Action {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, policy::ZeroWait>) {
            return pending ? 0 : 1;
          } else if constexpr (std::is_same_v<P, policy::Clairvoyant>) {
            return x != prev ? 1 : 0;
          } else if constexpr (std::is_same_v<P, policy::Periodic>) {
            return t % p.k == 0 ? 1 : 0;
          } else {
            const int s = sim.model().index_of({tau1, tau2, i, sim.resolve_j(tau1, i)});
            if constexpr (std::is_same_v<P, policy::PureTable>) {
              return p.table[s];
            } else {
              if (p.mode == MixingMode::Episode) return (*episode_table)[s];
              const Action a = p.mixed.pi_minus[s];
              const Action b = p.mixed.pi_plus[s];
              if (a == b) return a;
              std::uniform_real_distribution<double> unif(0.0, 1.0);
              return unif(mix) < p.mixed.mu ? a : b;
            }
          }
        },
        policy);
  }
};

void check_inputs(const MdpModel& model, const MonitorPolicy& policy, const SimConfig& config) {
  if (config.horizon <= config.warmup || config.warmup < 0) {
    throw std::invalid_argument("need horizon > warmup >= 0");
  }
  if (const auto* p = std::get_if<policy::Periodic>(&policy); p && p->k < 1) {
    throw std::invalid_argument("periodic policy needs k >= 1");
  }
  if (const auto* p = std::get_if<policy::PureTable>(&policy); p && p->table.size() != model.size()) {
    throw std::invalid_argument("policy table does not match the state space");
  }
  if (const auto* p = std::get_if<policy::CmdpMixed>(&policy)) {
    if (p->mixed.pi_minus.size() != model.size() || p->mixed.pi_plus.size() != model.size()) {
      throw std::invalid_argument("mixed policy tables do not match the state space");
    }
  }
}

}  // namespace

StreamSet make_streams(std::uint64_t seed, int replication) {
  return {make_stream(seed, replication, kChain), make_stream(seed, replication, kChannel),
          make_stream(seed, replication, kMix)};
}

int map_estimate(const Dtmc& dtmc, int i, long elapsed) {
  if (elapsed < 0) throw std::invalid_argument("map_estimate: elapsed must be >= 0");
  const int n = dtmc.size();
  if (elapsed <= dtmc.max_power()) {
    const Matrix& pk = dtmc.n_step(static_cast<int>(elapsed));
    return argmax_row([&](int x) { return pk(i, x); }, n);
  }
  const auto pi = dtmc.stationary().pi;
  return argmax_row([&](int x) { return pi[static_cast<std::size_t>(x)]; }, n);
}

std::vector<Action> clairvoyant_actions(const std::vector<int>& trajectory) {
  std::vector<Action> out(trajectory.size(), 0);
  for (std::size_t t = 1; t < trajectory.size(); ++t) {
    out[t] = trajectory[t] != trajectory[t - 1] ? 1 : 0;
  }
  return out;
}

bool is_j_dependent(const MdpModel& model, const PurePolicy& policy) {
  const auto& table = model.table();
  std::vector<char> seen(static_cast<std::size_t>(model.size()), 0);
  std::queue<int> frontier;
  const int start = model.index_of(MdpModel::reference_state());
  seen[static_cast<std::size_t>(start)] = 1;
  frontier.push(start);
  while (!frontier.empty()) {
    const int s = frontier.front();
    frontier.pop();
    const int r = table.row(s, policy[s]);
    for (int e = table.offsets[r]; e < table.offsets[r + 1]; ++e) {
      const int d = table.dest[e];
      if (!seen[static_cast<std::size_t>(d)]) {
        seen[static_cast<std::size_t>(d)] = 1;
        frontier.push(d);
      }
    }
  }
  const int n = model.source_states();
  for (int s = 0; s < model.size(); ++s) {
    if (!seen[static_cast<std::size_t>(s)]) continue;
    const MdpState st = model.state_of(s);
    if (st.tau1 == 0) continue;
    for (int j = 0; j < n; ++j) {
      const int other = model.index_of({st.tau1, st.tau2, st.i, j});
      if (seen[static_cast<std::size_t>(other)] && policy[other] != policy[s]) return true;
    }
  }
  return false;
}

SimMetrics aggregate(const std::vector<EpisodeMetrics>& episodes) {
  if (episodes.empty()) throw std::invalid_argument("aggregate: no episodes");
  auto estimate = [&](auto field) {
    Estimate e;
    e.n = static_cast<int>(episodes.size());
    bool constant = true;
    for (const auto& m : episodes) {
      e.mean += field(m);
      constant = constant && field(m) == field(episodes.front());
    }
    e.mean /= e.n;
    // Identical replications: report the value itself and an exact zero spread.
    if (constant) {
      e.mean = field(episodes.front());
    } else if (e.n > 1) {
      double ss = 0.0;
      for (const auto& m : episodes) ss += (field(m) - e.mean) * (field(m) - e.mean);
      e.se = std::sqrt(ss / (e.n - 1) / e.n);
    }
    return e;
  };
  SimMetrics out;
  out.avg_aod = estimate([](const EpisodeMetrics& m) { return m.avg_aod; });
  out.freq = estimate([](const EpisodeMetrics& m) { return m.freq; });
  out.fresh_error = estimate([](const EpisodeMetrics& m) { return m.fresh_error; });
  out.map_error = estimate([](const EpisodeMetrics& m) { return m.map_error; });
  return out;
}

Simulator::Simulator(const MdpModel& model) : model_(model) {
  const Dtmc& dtmc = model_.dtmc();
  const int n = dtmc.size();
  map_table_.resize(static_cast<std::size_t>(dtmc.max_power()) + 1);
  for (int k = 0; k <= dtmc.max_power(); ++k) {
    for (int i = 0; i < n; ++i) map_table_[k].push_back(map_estimate(dtmc, i, k));
  }
  const int stationary_map = map_estimate(dtmc, 0, static_cast<long>(dtmc.max_power()) + 1);
  map_stationary_.assign(static_cast<std::size_t>(n), stationary_map);
}

int Simulator::resolve_j(int tau1, int i) const {
  return tau1 == 0 ? i : map_table_[static_cast<std::size_t>(tau1)][static_cast<std::size_t>(i)];
}

EpisodeResult Simulator::run_episode(const MonitorPolicy& policy, const SimConfig& config,
                                     StreamSet& streams, bool record_trace) const {
  check_inputs(model_, policy, config);
  const Dtmc& dtmc = model_.dtmc();
  const double q = model_.q();
  const int tau1_max = model_.truncation().tau1_max;
  const int tau2_max = model_.truncation().tau2_max;

  Decider decide{*this, policy};
  if (const auto* m = std::get_if<policy::CmdpMixed>(&policy)) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    decide.episode_table = unif(streams.mix) < m->mixed.mu ? &m->mixed.pi_minus
                                                            : &m->mixed.pi_plus;
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // Reference configuration: sample of state 0 generated and delivered at t = -1.
  int x = 0;
  int tau1 = 0, tau2 = 1, i = 0, j = 0;
  bool pending = false;
  long received_gen = -1;  // generation time of the freshest delivered sample
  long held_gen = -1;      // generation time of the latest requested sample

  EpisodeResult result;
  if (record_trace) result.trace.reserve(static_cast<std::size_t>(config.horizon));
  double sum_cost = 0.0, sum_req = 0.0, sum_fresh = 0.0, sum_map = 0.0;

  for (long t = 0; t < config.horizon; ++t) {
    const int prev = x;
    x = dtmc.step_sample(x, streams.chain);

    const Action u = decide(t, tau1, tau2, i, prev, x, pending, streams.mix);
    const double channel = unif(streams.channel);

    if (t >= config.warmup) {
      sum_cost += model_.cost({tau1, tau2, i, j}, u);
      sum_req += u;
      sum_fresh += (i != x) ? 1.0 : 0.0;
      const long elapsed = t - received_gen;
      const int est = elapsed < static_cast<long>(map_table_.size())
                          ? map_table_[static_cast<std::size_t>(elapsed)][static_cast<std::size_t>(i)]
                          : map_stationary_[static_cast<std::size_t>(i)];
      sum_map += (est != x) ? 1.0 : 0.0;
    }

    const int tau1_before = tau1, tau2_before = tau2, i_before = i;
    bool delivered = false;
    if (u == 1) {
      held_gen = t;
      if (channel < q) {
        i = j = x;
        tau1 = 0;
        received_gen = t;
        pending = false;
        delivered = true;
      } else {
        tau1 = std::min(tau1 + tau2, tau1_max);
        j = x;
        pending = true;
      }
      tau2 = 1;
    } else {
      const bool forced = tau2 + 1 > tau2_max;
      if (pending && (forced || channel < q)) {
        i = j;
        tau1 = 0;
        received_gen = held_gen;
        pending = false;
        delivered = true;
      }
      tau2 = std::min(tau2 + 1, tau2_max);
    }

    if (record_trace) {
      result.trace.push_back({t, x, i_before, tau1_before, tau2_before, u, delivered});
    }
  }

  const double slots = static_cast<double>(config.horizon - config.warmup);
  result.metrics = {sum_cost / slots, sum_req / slots, sum_fresh / slots, sum_map / slots,
                    config.horizon - config.warmup};
  return result;
}

std::vector<EpisodeMetrics> Simulator::run(const MonitorPolicy& policy,
                                           const SimConfig& config) const {
  if (config.replications < 1) throw std::invalid_argument("replications must be >= 1");
  check_inputs(model_, policy, config);
  std::vector<EpisodeMetrics> out(static_cast<std::size_t>(config.replications));
  const int reps = config.replications;
#pragma omp parallel for schedule(dynamic) if (config.parallel)
  for (int r = 0; r < reps; ++r) {
    auto streams = make_streams(config.seed, r);
    out[static_cast<std::size_t>(r)] = run_episode(policy, config, streams).metrics;
  }
  return out;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace) {
  os << "t,true_state,i,tau1,tau2,action,success\n";
  for (const auto& r : trace) {
    os << r.t << ',' << r.true_state << ',' << r.i << ',' << r.tau1 << ',' << r.tau2 << ','
       << static_cast<int>(r.action) << ',' << (r.success ? 1 : 0) << '\n';
  }
}

}  // namespace aod
