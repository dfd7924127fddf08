#include "aod/aod_mdp.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace aod {

std::string to_string(const MdpState& s) {
  std::ostringstream os;
  os << '(' << s.tau1 << ',' << s.tau2 << ',' << s.i << ',' << s.j << ')';
  return os.str();
}

std::string_view to_string(CostVariant v) {
  switch (v) {
    case CostVariant::Exclusive:
      return "exclusive";
    case CostVariant::InclusiveSelf:
      return "inclusive";
  }
  return "?";
}

CostVariant parse_cost_variant(std::string_view s) {
  if (s == "exclusive") return CostVariant::Exclusive;
  if (s == "inclusive") return CostVariant::InclusiveSelf;
  throw std::invalid_argument("unknown cost variant '" + std::string(s) +
                              "' (expected inclusive|exclusive)");
}

long long MdpModel::expected_size(int n, const TruncationConfig& trunc) {
  const long long nn = n;
  return trunc.tau2_max * nn + static_cast<long long>(trunc.tau1_max) * trunc.tau2_max * nn * nn;
}

MdpModel::MdpModel(Dtmc dtmc, double q, TruncationConfig trunc, CostVariant variant,
                   std::size_t state_ceiling)
    : dtmc_(std::move(dtmc)), q_(q), trunc_(trunc), variant_(variant) {
  if (!(q_ > 0.0 && q_ <= 1.0)) {
    throw ModelError("success probability q must lie in (0, 1]");
  }
  if (trunc_.tau1_max < 1 || trunc_.tau2_max < 1) {
    throw ModelError("truncation bounds must be >= 1");
  }
  const long long count = expected_size(dtmc_.size(), trunc_);
  if (count > static_cast<long long>(state_ceiling)) {
    throw ModelError("state space of " + std::to_string(count) +
                     " states exceeds the ceiling of " + std::to_string(state_ceiling));
  }
  num_states_ = static_cast<int>(count);
  dtmc_ = dtmc_.with_max_power(trunc_.tau1_max + trunc_.tau2_max);
  build_table();
}

bool MdpModel::contains(const MdpState& s) const {
  const int n = dtmc_.size();
  if (s.i < 0 || s.i >= n || s.j < 0 || s.j >= n) return false;
  if (s.tau2 < 1 || s.tau2 > trunc_.tau2_max) return false;
  if (s.tau1 < 0 || s.tau1 > trunc_.tau1_max) return false;
  return s.tau1 > 0 || s.i == s.j;
}

int MdpModel::index_of(const MdpState& s) const {
  if (!contains(s)) {
    throw std::out_of_range("state " + to_string(s) + " is not in the state space");
  }
  const int n = dtmc_.size();
  if (s.tau1 == 0) return (s.tau2 - 1) * n + s.i;
  const int base = trunc_.tau2_max * n;
  return base + (((s.tau1 - 1) * trunc_.tau2_max + (s.tau2 - 1)) * n + s.i) * n + s.j;
}

MdpState MdpModel::state_of(int index) const {
  if (index < 0 || index >= num_states_) {
    throw std::out_of_range("state index " + std::to_string(index) + " out of range");
  }
  const int n = dtmc_.size();
  const int base = trunc_.tau2_max * n;
  if (index < base) {
    const int i = index % n;
    return {0, index / n + 1, i, i};
  }
  int r = index - base;
  const int j = r % n;
  r /= n;
  const int i = r % n;
  r /= n;
  const int tau2 = r % trunc_.tau2_max + 1;
  const int tau1 = r / trunc_.tau2_max + 1;
  return {tau1, tau2, i, j};
}

double MdpModel::cost_bracket(int tau1, int tau2, int i) const {
  const Matrix& pk = dtmc_.n_step(tau1);
  const int n = dtmc_.size();
  double acc = 1.0;
  for (int jp = 0; jp < n; ++jp) {
    if (variant_ == CostVariant::Exclusive && jp == i) {
      acc -= pk(i, i);
    } else {
      acc -= pk(i, jp) * dtmc_.self_stay_power(jp, tau2 - 1);
    }
  }
  return std::clamp(acc, 0.0, 1.0);
}

double MdpModel::cost(const MdpState& s, Action u) const {
  return (1.0 - q_ * static_cast<double>(u)) * cost_bracket(s.tau1, s.tau2, s.i);
}

std::vector<Transition> MdpModel::transitions(const MdpState& s, Action u) const {
  std::vector<Transition> out;
  const double q = q_;
  if (u == 0) {
    if (s.tau2 + 1 > trunc_.tau2_max) {
      // Crossing the tau2 cap counts as a successful reception.
      out.push_back({{0, trunc_.tau2_max, s.j, s.j}, 1.0});
    } else {
      out.push_back({{s.tau1, s.tau2 + 1, s.i, s.j}, 1.0 - q});
      out.push_back({{0, s.tau2 + 1, s.j, s.j}, q});
    }
  } else {
    const int gap = s.tau1 + s.tau2;
    const Matrix& pk = dtmc_.n_step(gap);
    const int tau1_next = std::min(gap, trunc_.tau1_max);
    for (int jp = 0; jp < dtmc_.size(); ++jp) {
      const double p = pk(s.i, jp);
      out.push_back({{tau1_next, 1, s.i, jp}, p * (1.0 - q)});
      out.push_back({{0, 1, jp, jp}, p * q});
    }
  }

  // Merge duplicates and drop zero mass.
  std::vector<std::pair<int, double>> keyed;
  keyed.reserve(out.size());
  for (const auto& t : out) {
    if (t.prob > 0.0) keyed.emplace_back(index_of(t.to), t.prob);
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Transition> merged;
  for (const auto& [idx, p] : keyed) {
    if (!merged.empty() && index_of(merged.back().to) == idx) {
      merged.back().prob += p;
    } else {
      merged.push_back({state_of(idx), p});
    }
  }
  return merged;
}

void MdpModel::build_table() {
  table_ = TransitionTable{};
  table_.num_states = num_states_;
  table_.offsets.reserve(2 * static_cast<std::size_t>(num_states_) + 1);
  table_.cost.reserve(2 * static_cast<std::size_t>(num_states_));
  table_.offsets.push_back(0);
  for (int s = 0; s < num_states_; ++s) {
    const MdpState st = state_of(s);
    for (Action u : {Action{0}, Action{1}}) {
      for (const auto& t : transitions(st, u)) {
        table_.dest.push_back(index_of(t.to));
        table_.prob.push_back(t.prob);
      }
      table_.offsets.push_back(static_cast<std::int32_t>(table_.dest.size()));
      table_.cost.push_back(cost(st, u));
    }
  }
}

}  // namespace aod
