#include "aod/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace aod {

namespace csv {
const char* const kSolveHeader =
    "variant,p01,p10,q,nu,tau1_max,tau2_max,states,constraint_active,lambda_star,"
    "lambda_minus,lambda_plus,mu,avg_aod,frequency,aod_minus,freq_minus,aod_plus,freq_plus,"
    "probes";
const char* const kPolicyMapHeader = "i,j,tau1,tau2,action,action_minus,action_plus,monotone";
const char* const kSweepHeader =
    "axis,value,variant,p01,p10,q,nu,tau1_max,tau2_max,states,constraint_active,lambda_star,"
    "lambda_minus,lambda_plus,mu,avg_aod,frequency,aod_minus,freq_minus,aod_plus,freq_plus,"
    "probes,sim_aod,sim_aod_se,sim_freq,sim_freq_se,sim_fresh_error,sim_fresh_error_se,"
    "sim_map_error,sim_map_error_se,error";
const char* const kSimulateHeader =
    "policy,nu,variant,p01,p10,q,replications,horizon,warmup,seed,sim_aod,sim_aod_se,sim_freq,"
    "sim_freq_se,sim_fresh_error,sim_fresh_error_se,sim_map_error,sim_map_error_se,exact_aod,"
    "exact_freq,j_dependent";
const char* const kCompareHeader =
    "policy,nu,p01,p10,q,sim_freq,sim_freq_se,sim_aod,sim_aod_se,sim_fresh_error,"
    "sim_fresh_error_se,sim_map_error,sim_map_error_se,exact_aod,exact_freq,j_dependent";
}  // namespace csv

std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::None: return "none";
    case SweepAxis::P01: return "p01";
    case SweepAxis::P10: return "p10";
    case SweepAxis::Q: return "q";
    case SweepAxis::Nu: return "nu";
  }
  return "?";
}

std::string_view to_string(SimPolicyKind k) {
  switch (k) {
    case SimPolicyKind::Cmdp: return "cmdp";
    case SimPolicyKind::ZeroWait: return "zero-wait";
    case SimPolicyKind::Clairvoyant: return "clairvoyant";
    case SimPolicyKind::Periodic: return "periodic";
    case SimPolicyKind::Never: return "never";
    case SimPolicyKind::Always: return "always";
  }
  return "?";
}

Dtmc ExperimentConfig::make_dtmc() const {
  try {
    return two_state() ? Dtmc::two_state(p01, p10) : Dtmc(matrix);
  } catch (const ModelError& e) {
    throw ConfigError(std::string("invalid transition matrix: ") + e.what());
  }
}

MdpModel ExperimentConfig::make_model() const {
  try {
    return MdpModel(make_dtmc(), q, trunc, variant);
  } catch (const ModelError& e) {
    throw ConfigError(e.what());
  }
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

class LineParser {
 public:
  LineParser(int line, std::string key, std::string value)
      : line_(line), key_(std::move(key)), value_(std::move(value)) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("line " + std::to_string(line_) + ": " + key_ + ": " + what);
  }

  double number(std::string_view text) const {
    const std::string s = trim(text);
    if (s.empty()) fail("empty number");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) fail("'" + s + "' is not a number");
    return v;
  }
  double number() const { return number(value_); }

  long integer() const {
    const double v = number();
    if (v != static_cast<double>(static_cast<long>(v))) fail("'" + value_ + "' is not an integer");
    return static_cast<long>(v);
  }

  bool boolean() const {
    if (value_ == "true" || value_ == "1") return true;
    if (value_ == "false" || value_ == "0") return false;
    fail("'" + value_ + "' is not a boolean (true|false)");
  }

  std::vector<double> list() const {
    std::string s = trim(value_);
    if (!s.empty() && s.front() == '[') {
      if (s.back() != ']') fail("unterminated list");
      s = s.substr(1, s.size() - 2);
    }
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(number(item));
    if (out.empty()) fail("empty list");
    return out;
  }

  std::vector<std::vector<double>> matrix() const {
    std::string s;
    for (char c : value_) {
      if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    }
    if (s.size() < 4 || s.substr(0, 2) != "[[" || s.substr(s.size() - 2) != "]]") {
      fail("expected nested rows like [[a, b], [c, d]]");
    }
    std::vector<std::vector<double>> rows;
    std::size_t pos = 1;
    while (pos < s.size() - 1) {
      if (s[pos] == ',') {
        ++pos;
        continue;
      }
      if (s[pos] != '[') fail("malformed matrix near column " + std::to_string(pos));
      const auto close = s.find(']', pos);
      if (close == std::string::npos) fail("unterminated matrix row");
      const std::string body = s.substr(pos + 1, close - pos - 1);
      std::vector<double> row;
      std::stringstream ss(body);
      std::string item;
      while (std::getline(ss, item, ',')) row.push_back(number(item));
      if (row.empty()) fail("empty matrix row");
      rows.push_back(std::move(row));
      pos = close + 1;
    }
    return rows;
  }

  void require(bool ok, const std::string& domain) const {
    if (!ok) fail("value " + value_ + " outside " + domain);
  }

  const std::string& value() const { return value_; }

 private:
  int line_;
  std::string key_;
  std::string value_;
};

}  // namespace

ExperimentConfig parse_config_text(std::string_view text) {
  ExperimentConfig cfg;
  std::map<std::string, int> seen;
  std::map<SweepAxis, int> axes;
  bool has_p = false;

  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": missing key");
    if (auto [it, fresh] = seen.emplace(key, line_no); !fresh) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key +
                        "' (first set on line " + std::to_string(it->second) + ")");
    }
    const LineParser p(line_no, key, value);
    if (value.empty()) p.fail("missing value");

    auto probability = [&](double v) { p.require(v >= 0.0 && v <= 1.0, "[0, 1]"); return v; };
    auto open_unit = [&](double v) { p.require(v > 0.0 && v <= 1.0, "(0, 1]"); return v; };
    auto sweep = [&](SweepAxis axis, auto check) {
      cfg.sweep_values = p.list();
      for (double v : cfg.sweep_values) check(v);
      axes[axis] = line_no;
      cfg.axis = axis;
    };

    if (key == "matrix") {
      cfg.matrix = p.matrix();
    } else if (key == "p01") {
      cfg.p01 = probability(p.number());
      has_p = true;
    } else if (key == "p10") {
      cfg.p10 = probability(p.number());
      has_p = true;
    } else if (key == "q") {
      cfg.q = open_unit(p.number());
    } else if (key == "nu") {
      cfg.nu = open_unit(p.number());
    } else if (key == "tau1_max") {
      cfg.trunc.tau1_max = static_cast<int>(p.integer());
      p.require(cfg.trunc.tau1_max >= 1 && cfg.trunc.tau1_max <= 1000, "[1, 1000]");
    } else if (key == "tau2_max") {
      cfg.trunc.tau2_max = static_cast<int>(p.integer());
      p.require(cfg.trunc.tau2_max >= 1 && cfg.trunc.tau2_max <= 1000, "[1, 1000]");
    } else if (key == "cost_variant") {
      try {
        cfg.variant = parse_cost_variant(value);
      } catch (const std::invalid_argument& e) {
        p.fail(e.what());
      }
    } else if (key == "rvi_tolerance") {
      cfg.dual.rvi.span_tolerance = p.number();
      p.require(cfg.dual.rvi.span_tolerance > 0.0, "(0, inf)");
    } else if (key == "rvi_max_iterations") {
      cfg.dual.rvi.max_iterations = p.integer();
      p.require(cfg.dual.rvi.max_iterations >= 1, "[1, inf)");
    } else if (key == "rvi_aperiodicity") {
      cfg.dual.rvi.aperiodicity = p.number();
      p.require(cfg.dual.rvi.aperiodicity >= 0.0 && cfg.dual.rvi.aperiodicity < 1.0, "[0, 1)");
    } else if (key == "lambda_lo") {
      cfg.dual.lambda_lo = p.number();
      p.require(cfg.dual.lambda_lo >= 0.0, "[0, inf)");
    } else if (key == "lambda_hi") {
      cfg.dual.lambda_hi = p.number();
      p.require(cfg.dual.lambda_hi > 0.0, "(0, inf)");
    } else if (key == "lambda_tolerance") {
      cfg.dual.lambda_tolerance = p.number();
      p.require(cfg.dual.lambda_tolerance > 0.0, "(0, inf)");
    } else if (key == "lambda_epsilon") {
      cfg.dual.epsilon = p.number();
      p.require(cfg.dual.epsilon > 0.0, "(0, inf)");
    } else if (key == "horizon") {
      cfg.sim.horizon = p.integer();
      p.require(cfg.sim.horizon >= 1, "[1, inf)");
    } else if (key == "replications") {
      cfg.sim.replications = static_cast<int>(p.integer());
      p.require(cfg.sim.replications >= 1, "[1, inf)");
    } else if (key == "warmup") {
      cfg.sim.warmup = p.integer();
      p.require(cfg.sim.warmup >= 0, "[0, inf)");
    } else if (key == "seed") {
      const long s = p.integer();
      p.require(s >= 0, "[0, inf)");
      cfg.sim.seed = static_cast<std::uint64_t>(s);
    } else if (key == "mixing") {
      if (value == "episode") {
        cfg.mixing = MixingMode::Episode;
      } else if (value == "step") {
        cfg.mixing = MixingMode::PerStep;
      } else {
        p.fail("expected episode|step");
      }
    } else if (key == "sweep_p01") {
      sweep(SweepAxis::P01, probability);
    } else if (key == "sweep_p10") {
      sweep(SweepAxis::P10, probability);
    } else if (key == "sweep_q") {
      sweep(SweepAxis::Q, open_unit);
    } else if (key == "sweep_nu") {
      sweep(SweepAxis::Nu, open_unit);
    } else if (key == "sweep_simulate") {
      cfg.sweep_simulate = p.boolean();
    } else if (key == "compare_nu") {
      cfg.compare_nu = p.list();
      for (double v : cfg.compare_nu) open_unit(v);
    } else if (key == "compare_p10") {
      cfg.compare_p10 = p.list();
      for (double v : cfg.compare_p10) open_unit(v);
    } else if (key == "periodic_k") {
      cfg.periodic_k = static_cast<int>(p.integer());
      p.require(cfg.periodic_k >= 1, "[1, inf)");
    } else if (key == "policy") {
      bool found = false;
      for (auto k : {SimPolicyKind::Cmdp, SimPolicyKind::ZeroWait, SimPolicyKind::Clairvoyant,
                     SimPolicyKind::Periodic, SimPolicyKind::Never, SimPolicyKind::Always}) {
        if (value == to_string(k)) {
          cfg.policy = k;
          found = true;
        }
      }
      if (!found) p.fail("expected cmdp|zero-wait|clairvoyant|periodic|never|always");
    } else if (key == "map_i") {
      cfg.map_i = static_cast<int>(p.integer());
      p.require(cfg.map_i >= 0, "[0, n)");
    } else if (key == "map_j") {
      cfg.map_j = static_cast<int>(p.integer());
      p.require(cfg.map_j >= 0, "[0, n)");
    } else if (key == "output") {
      cfg.output = value;
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }

  auto line_of = [&](const std::string& key) { return "line " + std::to_string(seen.at(key)); };
  if (axes.size() > 1) {
    std::string names;
    for (const auto& [axis, line] : axes) {
      names += (names.empty() ? "" : ", ") + std::string(to_string(axis)) + " (line " +
               std::to_string(line) + ")";
    }
    throw ConfigError("sweep needs exactly one axis, got " + names);
  }
  if (!cfg.matrix.empty() && has_p) {
    throw ConfigError("set either 'matrix' or 'p01'/'p10', not both");
  }
  if (!cfg.matrix.empty() && (cfg.axis == SweepAxis::P01 || cfg.axis == SweepAxis::P10)) {
    throw ConfigError("p01/p10 sweeps need the two-state source, not 'matrix'");
  }
  if (cfg.dual.lambda_lo >= cfg.dual.lambda_hi) {
    throw ConfigError("lambda_lo must be below lambda_hi");
  }
  if (cfg.sim.warmup >= cfg.sim.horizon) {
    throw ConfigError("warmup must be below horizon");
  }
  try {
    (void)cfg.make_dtmc();
  } catch (const ConfigError& e) {
    throw ConfigError((seen.count("matrix") ? line_of("matrix") + ": "
                       : seen.count("p01")  ? line_of("p01") + ": "
                                            : std::string()) +
                      e.what());
  }
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

// ---------------------------------------------------------------------------
// Commands

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string opt(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

void write_source(std::ostream& os, const ExperimentConfig& cfg) {
  if (cfg.two_state()) {
    os << num(cfg.p01) << ',' << num(cfg.p10);
  } else {
    os << ',';
  }
}

void write_solution_fields(std::ostream& os, const ExperimentConfig& cfg, const MdpModel* model,
                           const CmdpSolution* sol) {
  os << to_string(cfg.variant) << ',';
  write_source(os, cfg);
  os << ',' << num(cfg.q) << ',' << num(cfg.nu) << ',' << cfg.trunc.tau1_max << ','
     << cfg.trunc.tau2_max << ',' << (model ? std::to_string(model->size()) : "") << ',';
  if (!sol) {
    os << ",,,,,,,,,,,";
    return;
  }
  os << (sol->constraint_active ? 1 : 0) << ',' << num(sol->lambda_star) << ','
     << num(sol->lambda_minus) << ',' << num(sol->lambda_plus) << ',' << num(sol->mixed.mu)
     << ',' << num(sol->avg_cost) << ',' << num(sol->frequency) << ',' << num(sol->cost_minus)
     << ',' << num(sol->freq_minus) << ',' << num(sol->cost_plus) << ','
     << num(sol->freq_plus) << ',' << sol->trace.size();
}

void write_metrics(std::ostream& os, const SimMetrics& m, bool freq_first) {
  if (freq_first) {
    os << num(m.freq.mean) << ',' << num(m.freq.se) << ',' << num(m.avg_aod.mean) << ','
       << num(m.avg_aod.se);
  } else {
    os << num(m.avg_aod.mean) << ',' << num(m.avg_aod.se) << ',' << num(m.freq.mean) << ','
       << num(m.freq.se);
  }
  os << ',' << num(m.fresh_error.mean) << ',' << num(m.fresh_error.se) << ','
     << num(m.map_error.mean) << ',' << num(m.map_error.se);
}

bool j_dependent(const MdpModel& model, const MixedPolicy& mixed) {
  return is_j_dependent(model, mixed.pi_minus) || is_j_dependent(model, mixed.pi_plus);
}

}  // namespace

CmdpSolution run_solve(const ExperimentConfig& cfg) {
  const MdpModel model = cfg.make_model();
  return solve_cmdp(model, cfg.nu, cfg.dual);
}

void write_solve_report(std::ostream& os, const ExperimentConfig& cfg, const CmdpSolution& sol) {
  os << "AoD-optimal sampling under a frequency budget\n";
  if (cfg.two_state()) {
    os << "  source       two-state, p01=" << num(cfg.p01) << " p10=" << num(cfg.p10) << '\n';
  } else {
    os << "  source       " << cfg.matrix.size() << "-state matrix\n";
  }
  os << "  channel      q=" << num(cfg.q) << '\n'
     << "  budget       nu=" << num(cfg.nu) << '\n'
     << "  truncation   tau1_max=" << cfg.trunc.tau1_max << " tau2_max=" << cfg.trunc.tau2_max
     << '\n'
     << "  cost         " << to_string(cfg.variant) << '\n';
  if (!sol.constraint_active) {
    os << "  constraint   inactive: f(lambda_lo) = " << num(sol.frequency) << " <= nu\n"
       << "  lambda*      " << num(sol.lambda_star) << " (pure policy)\n";
  } else {
    os << "  constraint   active\n"
       << "  lambda*      " << num(sol.lambda_star) << "  (lambda- = " << num(sol.lambda_minus)
       << ", lambda+ = " << num(sol.lambda_plus) << ")\n"
       << "  mu           " << num(sol.mixed.mu) << '\n'
       << "  pi-          J=" << num(sol.cost_minus) << " f=" << num(sol.freq_minus) << '\n'
       << "  pi+          J=" << num(sol.cost_plus) << " f=" << num(sol.freq_plus) << '\n';
  }
  os << "  average AoD  " << num(sol.avg_cost) << '\n'
     << "  frequency    " << num(sol.frequency) << '\n'
     << "  probes       " << sol.trace.size() << '\n';
}

void write_solve_csv(std::ostream& os, const ExperimentConfig& cfg, const CmdpSolution& sol,
                     bool header) {
  if (header) os << csv::kSolveHeader << '\n';
  const MdpModel model = cfg.make_model();
  write_solution_fields(os, cfg, &model, &sol);
  os << '\n';
}

PolicyMap policy_map(const MdpModel& model, const MixedPolicy& mixed, int i, int j) {
  const int n = model.source_states();
  if (i < 0 || i >= n || j < 0 || j >= n) {
    throw ConfigError("policy map state indices (" + std::to_string(i) + ", " +
                      std::to_string(j) + ") outside [0, " + std::to_string(n) + ")");
  }
  PolicyMap map;
  map.i = i;
  map.j = j;
  const auto& dominant = mixed.dominant();
  for (int t1 = (i == j ? 0 : 1); t1 <= model.truncation().tau1_max; ++t1) {
    for (int t2 = 1; t2 <= model.truncation().tau2_max; ++t2) {
      const int s = model.index_of({t1, t2, i, j});
      map.rows.push_back({t1, t2, dominant[s], mixed.pi_minus[s], mixed.pi_plus[s]});
    }
  }
  map.monotone = is_componentwise_monotone(map);
  return map;
}

bool is_componentwise_monotone(const PolicyMap& map) {
  std::map<std::pair<int, int>, Action> grid;
  for (const auto& r : map.rows) grid[{r.tau1, r.tau2}] = r.action;
  for (const auto& [cell, a] : grid) {
    for (auto next : {std::pair{cell.first + 1, cell.second}, std::pair{cell.first, cell.second + 1}}) {
      auto it = grid.find(next);
      if (it != grid.end() && a > it->second) return false;
    }
  }
  return true;
}

bool sampling_region_subset(const PolicyMap& a, const PolicyMap& b) {
  std::map<std::pair<int, int>, Action> grid;
  for (const auto& r : b.rows) grid[{r.tau1, r.tau2}] = r.action;
  for (const auto& r : a.rows) {
    if (r.action == 0) continue;
    auto it = grid.find({r.tau1, r.tau2});
    if (it == grid.end() || it->second == 0) return false;
  }
  return true;
}

void write_policy_map_csv(std::ostream& os, const PolicyMap& map) {
  os << csv::kPolicyMapHeader << '\n';
  for (const auto& r : map.rows) {
    os << map.i << ',' << map.j << ',' << r.tau1 << ',' << r.tau2 << ','
       << static_cast<int>(r.action) << ',' << static_cast<int>(r.action_minus) << ','
       << static_cast<int>(r.action_plus) << ',' << (map.monotone ? "pass" : "fail") << '\n';
  }
}

ExperimentConfig with_axis_value(const ExperimentConfig& cfg, SweepAxis axis, double value) {
  ExperimentConfig point = cfg;
  switch (axis) {
    case SweepAxis::P01: point.p01 = value; break;
    case SweepAxis::P10: point.p10 = value; break;
    case SweepAxis::Q: point.q = value; break;
    case SweepAxis::Nu: point.nu = value; break;
    case SweepAxis::None: break;
  }
  return point;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, std::ostream* out) {
  if (cfg.axis == SweepAxis::None || cfg.sweep_values.empty()) {
    throw ConfigError("sweep needs exactly one axis (sweep_p01|sweep_p10|sweep_q|sweep_nu)");
  }
  if (out) *out << csv::kSweepHeader << '\n' << std::flush;
  std::vector<SweepRow> rows;
  for (double v : cfg.sweep_values) {
    SweepRow row{cfg.axis, v, with_axis_value(cfg, cfg.axis, v), {}, {}, {}};
    std::optional<MdpModel> model;
    try {
      model.emplace(row.point.make_model());
      row.solution = solve_cmdp(*model, row.point.nu, row.point.dual);
      if (cfg.sweep_simulate) {
        const Simulator sim(*model);
        row.sim = sim.simulate(policy::CmdpMixed{row.solution->mixed, cfg.mixing}, cfg.sim);
      }
    } catch (const std::exception& e) {
      row.error = e.what();
      std::replace(row.error.begin(), row.error.end(), ',', ';');
    }
    if (out) {
      *out << to_string(row.axis) << ',' << num(row.value) << ',';
      write_solution_fields(*out, row.point, model ? &*model : nullptr,
                            row.solution ? &*row.solution : nullptr);
      *out << ',';
      if (row.sim) {
        write_metrics(*out, *row.sim, false);
      } else {
        *out << ",,,,,,,";
      }
      *out << ',' << row.error << '\n' << std::flush;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

SimulateResult run_simulate(const ExperimentConfig& cfg, std::vector<TraceRecord>* trace) {
  const MdpModel model = cfg.make_model();
  const Simulator sim(model);
  SimulateResult res;
  res.kind = cfg.policy;

  MonitorPolicy policy = policy::ZeroWait{};
  switch (cfg.policy) {
    case SimPolicyKind::Cmdp: {
      const auto sol = solve_cmdp(model, cfg.nu, cfg.dual);
      res.nu = cfg.nu;
      res.exact_aod = sol.avg_cost;
      res.exact_freq = sol.frequency;
      res.j_dependent = j_dependent(model, sol.mixed);
      policy = policy::CmdpMixed{sol.mixed, cfg.mixing};
      break;
    }
    case SimPolicyKind::Never:
    case SimPolicyKind::Always: {
      const auto table =
          PurePolicy::constant(model.size(), cfg.policy == SimPolicyKind::Always ? 1 : 0);
      const auto eval = evaluate_policy(model, table, cfg.dual.eval);
      res.exact_aod = eval.avg_cost;
      res.exact_freq = eval.avg_frequency;
      policy = policy::PureTable{table};
      break;
    }
    case SimPolicyKind::ZeroWait: policy = policy::ZeroWait{}; break;
    case SimPolicyKind::Clairvoyant: policy = policy::Clairvoyant{}; break;
    case SimPolicyKind::Periodic: policy = policy::Periodic{cfg.periodic_k}; break;
  }
  res.metrics = sim.simulate(policy, cfg.sim);
  if (trace) {
    auto streams = make_streams(cfg.sim.seed, 0);
    *trace = sim.run_episode(policy, cfg.sim, streams, true).trace;
  }
  return res;
}

void write_simulate_csv(std::ostream& os, const ExperimentConfig& cfg, const SimulateResult& r) {
  os << csv::kSimulateHeader << '\n';
  os << to_string(r.kind) << ',' << opt(r.nu) << ',' << to_string(cfg.variant) << ',';
  write_source(os, cfg);
  os << ',' << num(cfg.q) << ',' << cfg.sim.replications << ',' << cfg.sim.horizon << ','
     << cfg.sim.warmup << ',' << cfg.sim.seed << ',';
  write_metrics(os, r.metrics, false);
  os << ',' << opt(r.exact_aod) << ',' << opt(r.exact_freq) << ',' << (r.j_dependent ? 1 : 0)
     << '\n';
}

std::vector<CompareRow> run_compare(const ExperimentConfig& cfg, std::ostream* out) {
  if (!cfg.two_state()) throw ConfigError("compare needs the two-state source (p01, p10)");
  if (out) *out << csv::kCompareHeader << '\n' << std::flush;
  std::vector<CompareRow> rows;
  auto emit = [&](CompareRow row) {
    if (out) {
      *out << to_string(row.kind) << ',' << opt(row.nu) << ',' << num(cfg.p01) << ','
           << num(row.p10) << ',' << num(cfg.q) << ',';
      write_metrics(*out, row.metrics, true);
      *out << ',' << opt(row.exact_aod) << ',' << opt(row.exact_freq) << ','
           << (row.j_dependent ? 1 : 0) << '\n' << std::flush;
    }
    rows.push_back(std::move(row));
  };

  for (double p10 : cfg.compare_p10) {
    const ExperimentConfig point = with_axis_value(cfg, SweepAxis::P10, p10);
    const MdpModel model = point.make_model();
    const Simulator sim(model);
    for (double nu : cfg.compare_nu) {
      const auto sol = solve_cmdp(model, nu, cfg.dual);
      CompareRow row{SimPolicyKind::Cmdp, nu, p10, {}, sol.avg_cost, sol.frequency,
                     j_dependent(model, sol.mixed)};
      row.metrics = sim.simulate(policy::CmdpMixed{sol.mixed, cfg.mixing}, cfg.sim);
      emit(std::move(row));
    }
    emit({SimPolicyKind::ZeroWait, {}, p10, sim.simulate(policy::ZeroWait{}, cfg.sim), {}, {}, false});
    emit({SimPolicyKind::Clairvoyant, {}, p10, sim.simulate(policy::Clairvoyant{}, cfg.sim), {}, {},
          false});
    emit({SimPolicyKind::Periodic, {}, p10,
          sim.simulate(policy::Periodic{cfg.periodic_k}, cfg.sim), {}, {}, false});
  }
  return rows;
}

}  // namespace aod
