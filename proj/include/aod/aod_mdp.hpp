// Truncated Age-of-Detection MDP over a Markov source and a lossy channel.
//
// A state (tau1, tau2, i, j) records
//   tau1 : slots from the generation of the freshest received sample to the
//          latest request (0 when the latest request has been delivered),
//   tau2 : slots since the latest request (>= 1),
//   i    : source state carried by the freshest received sample,
//   j    : source state carried by the latest requested sample.
// States with tau1 == 0 and i != j cannot occur and are not enumerated.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "aod/markov_core.hpp"

namespace aod {

struct MdpState {
  int tau1 = 0;
  int tau2 = 1;
  int i = 0;
  int j = 0;

  friend bool operator==(const MdpState&, const MdpState&) = default;
};

std::string to_string(const MdpState& s);

struct TruncationConfig {
  int tau1_max = 20;
  int tau2_max = 20;
};

enum class CostVariant {
  /// Cross terms over j' != i only, plus the -p_ii^(tau1) term.
  Exclusive,
  /// Sum over every j' including i; the default.
  InclusiveSelf,
};

std::string_view to_string(CostVariant v);
CostVariant parse_cost_variant(std::string_view s);

using Action = std::uint8_t;

struct Transition {
  MdpState to;
  double prob;
};

/// Flattened (state, action) -> successors table consumed by the solver
/// kernels. Row r = 2 * state + action.
struct TransitionTable {
  int num_states = 0;
  std::vector<std::int32_t> offsets;  // size 2 * num_states + 1
  std::vector<std::int32_t> dest;
  std::vector<double> prob;
  std::vector<double> cost;  // size 2 * num_states, AoD cost without lambda

  int row(int s, int u) const { return 2 * s + u; }
};

class MdpModel {
 public:
  static constexpr std::size_t kDefaultStateCeiling = 4'000'000;

  MdpModel(Dtmc dtmc, double q, TruncationConfig trunc,
           CostVariant variant = CostVariant::InclusiveSelf,
           std::size_t state_ceiling = kDefaultStateCeiling);

  const Dtmc& dtmc() const { return dtmc_; }
  double q() const { return q_; }
  const TruncationConfig& truncation() const { return trunc_; }
  CostVariant variant() const { return variant_; }

  int size() const { return num_states_; }
  int source_states() const { return dtmc_.size(); }

  /// Closed form tau2_max * n + tau1_max * tau2_max * n^2.
  static long long expected_size(int n, const TruncationConfig& trunc);

  bool contains(const MdpState& s) const;
  int index_of(const MdpState& s) const;
  MdpState state_of(int index) const;

  /// (0, 1, 0, 0); present in every enumeration.
  static MdpState reference_state() { return {0, 1, 0, 0}; }

  /// Per-slot AoD cost in [0, 1]; independent of s.j.
  double cost(const MdpState& s, Action u) const;

  /// Successor distribution with duplicate destinations merged, ordered by
  /// destination index.
  std::vector<Transition> transitions(const MdpState& s, Action u) const;

  const TransitionTable& table() const { return table_; }

 private:
  double cost_bracket(int tau1, int tau2, int i) const;
  void build_table();

  Dtmc dtmc_;
  double q_;
  TruncationConfig trunc_;
  CostVariant variant_;
  int num_states_ = 0;
  TransitionTable table_;
};

}  // namespace aod
