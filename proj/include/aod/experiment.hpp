// Experiment configuration and the solve / policy-map / sweep / simulate /
// compare pipelines behind the aodctl command line tool.
//
// Config files are flat "key = value" text; '#' starts a comment. Lists are
// comma separated, optionally bracketed; the transition matrix is written as
// nested brackets, e.g.  matrix = [[0.98, 0.02], [0.01, 0.99]].
#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aod/simulator.hpp"

namespace aod {

/// Invalid or inconsistent configuration. Maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SweepAxis { None, P01, P10, Q, Nu };

std::string_view to_string(SweepAxis a);

enum class SimPolicyKind { Cmdp, ZeroWait, Clairvoyant, Periodic, Never, Always };

std::string_view to_string(SimPolicyKind k);

struct ExperimentConfig {
  // Source: either a full matrix or the two-state shorthand (p01, p10).
  std::vector<std::vector<double>> matrix;
  double p01 = 0.02;
  double p10 = 0.01;

  double q = 0.8;
  double nu = 0.1;
  TruncationConfig trunc;
  CostVariant variant = CostVariant::InclusiveSelf;
  DualConfig dual;
  SimConfig sim;
  MixingMode mixing = MixingMode::Episode;

  SweepAxis axis = SweepAxis::None;
  std::vector<double> sweep_values;
  bool sweep_simulate = false;

  std::vector<double> compare_nu{0.2, 0.6, 0.8};
  std::vector<double> compare_p10{0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.10};
  int periodic_k = 5;

  SimPolicyKind policy = SimPolicyKind::Cmdp;
  int map_i = 0;
  int map_j = 0;

  std::string output;

  bool two_state() const { return matrix.empty(); }
  /// Builds the Dtmc; throws ConfigError on an invalid matrix.
  Dtmc make_dtmc() const;
  MdpModel make_model() const;
};

ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig parse_config(const std::string& path);

/// Documented CSV headers (pinned by golden files under tests/golden).
namespace csv {
extern const char* const kSolveHeader;
extern const char* const kPolicyMapHeader;
extern const char* const kSweepHeader;
extern const char* const kSimulateHeader;
extern const char* const kCompareHeader;
}  // namespace csv

CmdpSolution run_solve(const ExperimentConfig& cfg);
void write_solve_report(std::ostream& os, const ExperimentConfig& cfg, const CmdpSolution& sol);
void write_solve_csv(std::ostream& os, const ExperimentConfig& cfg, const CmdpSolution& sol,
                     bool header = true);

struct PolicyMapRow {
  int tau1;
  int tau2;
  Action action;  // from the mu-dominant pure policy
  Action action_minus;
  Action action_plus;
};

struct PolicyMap {
  int i = 0;
  int j = 0;
  std::vector<PolicyMapRow> rows;  // tau1 outer, tau2 inner
  bool monotone = true;            // for the dominant grid
};

/// Decision grid over (tau1, tau2) for fixed (i, j). tau1 = 0 rows are
/// present only when i == j.
PolicyMap policy_map(const MdpModel& model, const MixedPolicy& mixed, int i, int j);

/// If a(t1, t2) = 1 then a = 1 at every (t1', t2') >= (t1, t2) in the grid.
bool is_componentwise_monotone(const PolicyMap& map);

/// Set of (tau1, tau2) cells with action 1 in a is contained in that of b.
bool sampling_region_subset(const PolicyMap& a, const PolicyMap& b);

void write_policy_map_csv(std::ostream& os, const PolicyMap& map);

struct SweepRow {
  SweepAxis axis;
  double value;
  ExperimentConfig point;
  std::optional<CmdpSolution> solution;
  std::optional<SimMetrics> sim;
  std::string error;
};

/// Applies one grid value of the active axis to a copy of cfg.
ExperimentConfig with_axis_value(const ExperimentConfig& cfg, SweepAxis axis, double value);

/// Solves every grid point from scratch, in grid order. When out is given,
/// the header and each row are written and flushed as soon as they are ready;
/// a failing point records its message in the error column.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg,
                                std::ostream* out = nullptr);

struct SimulateResult {
  SimPolicyKind kind;
  std::optional<double> nu;
  SimMetrics metrics;
  std::optional<double> exact_aod;
  std::optional<double> exact_freq;
  bool j_dependent = false;
};

SimulateResult run_simulate(const ExperimentConfig& cfg,
                            std::vector<TraceRecord>* trace = nullptr);
void write_simulate_csv(std::ostream& os, const ExperimentConfig& cfg, const SimulateResult& r);

struct CompareRow {
  SimPolicyKind kind;
  std::optional<double> nu;
  double p10;
  SimMetrics metrics;
  std::optional<double> exact_aod;
  std::optional<double> exact_freq;
  bool j_dependent = false;
};

/// CMDP policies at every compare_nu plus the zero-wait, clairvoyant and
/// periodic baselines, for each p10 in compare_p10 (p01 fixed).
std::vector<CompareRow> run_compare(const ExperimentConfig& cfg, std::ostream* out = nullptr);

}  // namespace aod
