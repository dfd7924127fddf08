// aodctl: solve, inspect and simulate AoD-optimal sampling policies.
//
//   aodctl solve       --config exp.cfg [--out solve.csv]
//   aodctl policy-map  --config exp.cfg [--i 0 --j 0] [--out map.csv]
//   aodctl sweep       --config exp.cfg [--out sweep.csv]
//   aodctl simulate    --config exp.cfg [--seed 7] [--trace] [--out sim.csv]
//   aodctl compare     --config exp.cfg [--out compare.csv]
//
// Exit codes: 0 success, 1 configuration error, 2 solver failure.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "aod/experiment.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool trace = false;
  std::optional<int> map_i;
  std::optional<int> map_j;
};

// Opens --out (or the config's output key); falls back to stdout.
class Output {
 public:
  explicit Output(const std::string& path) : path_(path) {
    if (!path_.empty()) {
      file_ = std::make_unique<std::ofstream>(path_);
      if (!*file_) throw aod::ConfigError("cannot open output file '" + path_ + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
};

aod::ExperimentConfig load(const Options& opt) {
  auto cfg = aod::parse_config(opt.config);
  if (opt.seed) cfg.sim.seed = *opt.seed;
  if (opt.map_i) cfg.map_i = *opt.map_i;
  if (opt.map_j) cfg.map_j = *opt.map_j;
  if (!opt.out.empty()) cfg.output = opt.out;
  return cfg;
}

int cmd_solve(const Options& opt) {
  const auto cfg = load(opt);
  const auto sol = aod::run_solve(cfg);
  aod::write_solve_report(std::cout, cfg, sol);
  if (cfg.output.empty()) {
    std::cout << '\n';
    aod::write_solve_csv(std::cout, cfg, sol);
  } else {
    Output out(cfg.output);
    aod::write_solve_csv(out.stream(), cfg, sol);
  }
  return 0;
}

int cmd_policy_map(const Options& opt) {
  const auto cfg = load(opt);
  const auto model = cfg.make_model();
  if (cfg.map_i >= model.source_states() || cfg.map_j >= model.source_states()) {
    throw aod::ConfigError("policy map state indices outside [0, " +
                           std::to_string(model.source_states()) + ")");
  }
  const auto sol = aod::solve_cmdp(model, cfg.nu, cfg.dual);
  const auto map = aod::policy_map(model, sol.mixed, cfg.map_i, cfg.map_j);
  Output out(cfg.output);
  aod::write_policy_map_csv(out.stream(), map);
  if (!map.monotone) {
    std::cerr << "note: decision grid for (i, j) = (" << cfg.map_i << ", " << cfg.map_j
              << ") is not componentwise monotone\n";
  }
  return 0;
}

int cmd_sweep(const Options& opt) {
  const auto cfg = load(opt);
  if (cfg.axis == aod::SweepAxis::None) {
    throw aod::ConfigError("sweep needs exactly one axis (sweep_p01|sweep_p10|sweep_q|sweep_nu)");
  }
  Output out(cfg.output);
  const auto rows = aod::run_sweep(cfg, &out.stream());
  int failed = 0;
  for (const auto& r : rows) failed += r.error.empty() ? 0 : 1;
  if (failed > 0) std::cerr << failed << " of " << rows.size() << " grid points failed\n";
  return 0;
}

int cmd_simulate(const Options& opt) {
  const auto cfg = load(opt);
  std::vector<aod::TraceRecord> trace;
  const auto res = aod::run_simulate(cfg, opt.trace ? &trace : nullptr);
  if (res.j_dependent) {
    std::cerr << "warning: the solved tables depend on the unobservable sample state j; "
                 "simulated values use the MAP resolution and need not match the exact ones\n";
  }
  Output out(cfg.output);
  aod::write_simulate_csv(out.stream(), cfg, res);
  if (opt.trace) {
    const std::string path = cfg.output.empty() ? "trace.csv" : cfg.output + ".trace.csv";
    std::ofstream tf(path);
    if (!tf) throw aod::ConfigError("cannot open trace file '" + path + "'");
    aod::write_trace_csv(tf, trace);
    std::cerr << "trace of replication 0 written to " << path << '\n';
  }
  return 0;
}

int cmd_compare(const Options& opt) {
  const auto cfg = load(opt);
  Output out(cfg.output);
  aod::run_compare(cfg, &out.stream());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age-of-Detection sampling: CMDP solver and system simulator"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "experiment config file")->required();
    sub->add_option("--out", opt.out, "CSV output path (default: config 'output' or stdout)");
    sub->add_option("--seed", opt.seed, "base random seed (overrides config)");
    return sub;
  };
  auto* solve = add_common(app.add_subcommand("solve", "solve the constrained problem"));
  auto* map = add_common(app.add_subcommand("policy-map", "optimal action grid over (tau1, tau2)"));
  map->add_option("--i", opt.map_i, "freshest received state");
  map->add_option("--j", opt.map_j, "latest sampled state");
  auto* sweep = add_common(app.add_subcommand("sweep", "re-solve over one parameter axis"));
  auto* simulate = add_common(app.add_subcommand("simulate", "Monte Carlo of one policy"));
  simulate->add_flag("--trace", opt.trace, "dump the per-slot trace of replication 0");
  auto* compare = add_common(app.add_subcommand("compare", "CMDP policies vs baselines"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*solve) return cmd_solve(opt);
    if (*map) return cmd_policy_map(opt);
    if (*sweep) return cmd_sweep(opt);
    if (*simulate) return cmd_simulate(opt);
    if (*compare) return cmd_compare(opt);
  } catch (const aod::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitConfig;
}
