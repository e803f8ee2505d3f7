/*
 * Copyright 2026 The codesched Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "codesched/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "codesched/delay.hpp"
#include "codesched/gp_solver.hpp"
#include "codesched/programs.hpp"
#include "codesched/simulator.hpp"

namespace codesched::cli {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void ensure_dir(const std::string& dir) {
  if (!dir.empty()) fs::create_directories(dir);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("cannot write " + path.string());
  }
  return os;
}

ObjectiveKind parse_objective(const std::string& name) {
  if (name == "minrate") return ObjectiveKind::MinRate;
  if (name == "product") return ObjectiveKind::RateProduct;
  throw UsageError("--objective must be minrate or product");
}

std::vector<double> parse_sweep(const std::string& spec) {
  double lo = 0, hi = 0, step = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 ||
      step <= 0 || hi < lo) {
    throw UsageError("sweep must be lo:hi:step with step > 0");
  }
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double v = lo + i * step;
    if (v > hi + 1e-12) break;
    out.push_back(std::min(v, hi));
  }
  return out;
}

int status_exit(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return kOk;
    case SolveStatus::Infeasible: return kInfeasible;
    default: return kInternal;
  }
}

// ---------------------------------------------------------------- single-opt

struct SingleOptArgs {
  double eps = 0.4;
  double feedback_delay = 5.0;
  double packet_size = 1.0;
  double p = 2.0;
  double k_max = 100.0;
  std::string out;
};

int run_single_opt(const SingleOptArgs& args) {
  if (!(args.eps >= 0.0 && args.eps < 1.0)) {
    throw UsageError("--eps must lie in [0, 1)");
  }
  if (!(args.feedback_delay >= 0.0)) throw UsageError("--d must be >= 0");
  if (!(args.packet_size > 0.0)) throw UsageError("--l must be positive");
  if (!(args.p >= 1.0)) throw UsageError("--p must be >= 1");
  if (!(args.k_max >= 1.0)) throw UsageError("--kmax must be >= 1");

  const double k_star = optimal_bucket_size(args.eps, args.feedback_delay,
                                            args.p, args.k_max);
  const double d_star =
      delay_metric(k_star, 1.0 - args.eps, args.feedback_delay,
                   args.packet_size, args.p);
  const DualInfo dual = dual_value(args.eps, args.feedback_delay,
                                   args.packet_size, args.p, args.k_max);

  std::printf("K*        %s\n", format9(k_star).c_str());
  std::printf("d(p)      %s\n", format9(d_star).c_str());
  std::printf("dual      %s\n", format9(dual.value).c_str());
  std::printf("beta      (%s, %s)\n", format9(dual.beta1).c_str(),
              format9(dual.beta2).c_str());
  std::printf("interior  %s\n", dual.interior ? "yes" : "no");

  if (!args.out.empty()) {
    auto os = open_out(args.out);
    os << "eps,D,L,p,k_max,k_star,dp,dual,beta1,beta2,interior\n";
    os << format9(args.eps) << "," << format9(args.feedback_delay) << ","
       << format9(args.packet_size) << "," << format9(args.p) << ","
       << format9(args.k_max) << "," << format9(k_star) << ","
       << format9(d_star) << "," << format9(dual.value) << ","
       << format9(dual.beta1) << "," << format9(dual.beta2) << ","
       << (dual.interior ? 1 : 0) << "\n";
  }
  return kOk;
}

// ------------------------------------------------------------------ tradeoff

struct TradeoffArgs {
  double eps = 0.4;
  double packet_size = 1.0;
  std::vector<double> feedback_delays = {2.0, 5.0, 10.0};
  double k_min = 1.0;
  double k_max = 200.0;
  int points = 300;
  std::string out_dir = "out";
};

int run_tradeoff(const TradeoffArgs& args) {
  if (!(args.eps >= 0.0 && args.eps < 1.0)) {
    throw UsageError("--eps must lie in [0, 1)");
  }
  if (!(args.k_min >= 1.0 && args.k_max >= args.k_min)) {
    throw UsageError("bucket grid must satisfy 1 <= k-min <= k-max");
  }
  if (args.points < 2) throw UsageError("--points must be >= 2");

  std::vector<double> grid;
  const double ratio = args.k_max / args.k_min;
  for (int i = 0; i < args.points; ++i) {
    grid.push_back(args.k_min *
                   std::pow(ratio, static_cast<double>(i) /
                                       (args.points - 1)));
  }
  ensure_dir(args.out_dir);
  for (double d : args.feedback_delays) {
    const auto curve =
        tradeoff_curve(args.eps, d, args.packet_size, grid);
    char name[64];
    std::snprintf(name, sizeof(name), "tradeoff_D%g.csv", d);
    auto os = open_out(fs::path(args.out_dir) / name);
    write_curve_csv(curve, os);
    std::printf("wrote %s (%zu points)\n",
                (fs::path(args.out_dir) / name).string().c_str(),
                curve.size());
  }
  return kOk;
}

// ------------------------------------------------------------------- solving

void print_solution(const NetworkInstance& instance, const Solution& sol,
                    const char* objective_name) {
  std::printf("objective (%s): %s\n", objective_name,
              format9(sol.objective).c_str());
  std::printf("%-10s %-12s %-12s %-12s %s\n", "receiver", "K", "r", "R",
              "a (per transmitter)");
  for (int j = 0; j < instance.num_receivers(); ++j) {
    std::string a_list;
    for (int i = 0; i < instance.transmitters; ++i) {
      if (i) a_list += " ";
      a_list += format9(sol.schedule[static_cast<size_t>(i)]
                                    [static_cast<size_t>(j)]);
    }
    std::printf("%-10s %-12s %-12s %-12s %s\n",
                instance.receivers[static_cast<size_t>(j)].label.c_str(),
                format9(sol.bucket_sizes[static_cast<size_t>(j)]).c_str(),
                format9(sol.rates[static_cast<size_t>(j)]).c_str(),
                format9(sol.avg_rates[static_cast<size_t>(j)]).c_str(),
                a_list.c_str());
  }
}

void write_solution_files(const std::string& out_dir, const Solution& sol,
                          const std::string& kind) {
  if (out_dir.empty()) return;
  ensure_dir(out_dir);
  auto os = open_out(fs::path(out_dir) / "solution.json");
  os << solution_to_json(sol, kind);
}

struct SolveArgs {
  std::string config;
  std::string objective = "minrate";
  std::string out_dir;
  std::string trace;
};

int run_gp_solve(const SolveArgs& args) {
  const NetworkInstance instance = load_instance_file(args.config);
  if (instance.transmitters != 1) {
    throw UsageError("gp-solve expects a single-transmitter config; "
                     "use sp-solve for multiple transmitters");
  }
  const ObjectiveKind kind = parse_objective(args.objective);

  if (kind == ObjectiveKind::MinRate) {
    const SingleApProgram program = build_single_ap(instance);
    const SolveOutcome outcome = solve(program.gp);
    if (!args.trace.empty()) {
      auto os = open_out(args.trace);
      write_trace_csv(outcome, os);
    }
    if (outcome.status != SolveStatus::Optimal) {
      std::printf("status: %s %s\n", to_string(outcome.status),
                  outcome.message.c_str());
      return status_exit(outcome.status);
    }
    const Solution sol = program.to_solution(instance, outcome.assignment);
    print_solution(instance, sol, "min rate");
    write_solution_files(args.out_dir, sol, "minrate");
    return kOk;
  }

  // Rate product with one transmitter is already a plain GP; the
  // condensation loop recognizes that and solves it in one pass.
  const auto [sol, state] = solve_multi_ap(instance, {}, {}, kind);
  if (state.status != SolveStatus::Optimal) {
    std::printf("status: %s %s\n", to_string(state.status),
                state.message.c_str());
    return status_exit(state.status);
  }
  print_solution(instance, sol, "rate product");
  write_solution_files(args.out_dir, sol, "product");
  return kOk;
}

int run_sp_solve(const SolveArgs& args) {
  const NetworkInstance instance = load_instance_file(args.config);
  const ObjectiveKind kind = parse_objective(args.objective);
  const auto [sol, state] = solve_multi_ap(instance, {}, {}, kind);
  if (state.status != SolveStatus::Optimal) {
    std::printf("status: %s %s\n", to_string(state.status),
                state.message.c_str());
    return status_exit(state.status);
  }
  std::printf("converged in %d outer iterations\n", state.iterations);
  print_solution(instance, sol,
                 kind == ObjectiveKind::MinRate ? "min rate" : "rate product");
  if (!args.trace.empty()) {
    auto os = open_out(args.trace);
    write_convergence_csv(state, os);
  }
  write_solution_files(args.out_dir, sol,
                       kind == ObjectiveKind::MinRate ? "minrate" : "product");
  return kOk;
}

// ---------------------------------------------------------------- simulation

struct SimulateArgs {
  std::string config;
  std::string solution;
  int reps = 50;
  int64_t packets = 0;  // 0: ten buckets of the largest rounded K
  uint64_t seed = 1;
  int symbols = 4;
  std::string out_dir;
};

int64_t default_packets(const NetworkInstance& instance,
                        const Solution& sol) {
  double k = 1.0;
  for (double v : sol.bucket_sizes) {
    k = std::max(k, clamp_interval(std::round(v), 1.0, instance.k_max));
  }
  return static_cast<int64_t>(10 * k);
}

int run_simulate(const SimulateArgs& args) {
  const NetworkInstance instance = load_instance_file(args.config);
  std::ifstream in(args.solution);
  if (!in) throw UsageError("cannot open solution file " + args.solution);
  std::ostringstream buf;
  buf << in.rdbuf();
  const Solution sol = solution_from_json(buf.str());

  SessionConfig session;
  session.instance = instance;
  session.solution = sol;
  session.packets_per_flow =
      args.packets > 0 ? args.packets : default_packets(instance, sol);
  session.replications = args.reps;
  session.collect_bucket_log = true;
  CodingConfig coding;
  coding.seed = args.seed;
  coding.packet_symbols = args.symbols;

  const SimulationTrace trace = run_session(session, coding);
  const ComparisonReport report = compare_analytic(trace, instance, sol);

  std::printf("%-6s %-8s %-14s %-14s %-10s\n", "flow", "p", "empirical",
              "analytic", "rel_gap");
  for (const auto& row : report.rows) {
    std::printf("%-6d %-8s %-14s %-14s %-10s\n", row.flow,
                format9(row.sensitivity).c_str(),
                format9(row.empirical).c_str(),
                format9(row.analytic_rounded).c_str(),
                format9(row.rel_gap).c_str());
  }
  if (!args.out_dir.empty()) {
    ensure_dir(args.out_dir);
    {
      auto os = open_out(fs::path(args.out_dir) / "bucket_log.csv");
      write_bucket_log_csv(trace, os);
    }
    {
      auto os = open_out(fs::path(args.out_dir) / "summary.csv");
      write_comparison_csv(report, os);
    }
  }
  return kOk;
}

// ------------------------------------------------------------------ validate

struct ValidateArgs {
  std::string config;
  std::string source = "gp";
  std::string objective;
  int reps = 50;
  int64_t packets = 0;
  uint64_t seed = 1;
  double tol = 0.02;
  std::string out_dir;
};

int run_validate(const ValidateArgs& args) {
  const NetworkInstance instance = load_instance_file(args.config);

  Solution sol;
  if (args.source == "gp") {
    if (instance.transmitters != 1) {
      throw UsageError("--source gp needs a single-transmitter config");
    }
    const SingleApProgram program = build_single_ap(instance);
    const SolveOutcome outcome = solve(program.gp);
    if (outcome.status != SolveStatus::Optimal) {
      std::printf("optimizer: %s %s\n", to_string(outcome.status),
                  outcome.message.c_str());
      return status_exit(outcome.status);
    }
    sol = program.to_solution(instance, outcome.assignment);
  } else if (args.source == "sp") {
    const ObjectiveKind kind = args.objective.empty()
                                   ? ObjectiveKind::RateProduct
                                   : parse_objective(args.objective);
    const auto [s, state] = solve_multi_ap(instance, {}, {}, kind);
    if (state.status != SolveStatus::Optimal) {
      std::printf("optimizer: %s %s\n", to_string(state.status),
                  state.message.c_str());
      return status_exit(state.status);
    }
    sol = s;
  } else {
    throw UsageError("--source must be gp or sp");
  }

  SessionConfig session;
  session.instance = instance;
  session.solution = sol;
  session.packets_per_flow =
      args.packets > 0 ? args.packets : default_packets(instance, sol);
  session.replications = args.reps;
  CodingConfig coding;
  coding.seed = args.seed;

  const SimulationTrace trace = run_session(session, coding);
  const ComparisonReport report = compare_analytic(trace, instance, sol);

  std::printf("%-6s %-8s %-14s %-14s %-10s\n", "flow", "p", "empirical",
              "analytic", "rel_gap");
  for (const auto& row : report.rows) {
    std::printf("%-6d %-8s %-14s %-14s %-10s\n", row.flow,
                format9(row.sensitivity).c_str(),
                format9(row.empirical).c_str(),
                format9(row.analytic_rounded).c_str(),
                format9(row.rel_gap).c_str());
  }
  // Delay bounds at each receiver's own sensitivity.
  for (int j = 0; j < instance.num_receivers(); ++j) {
    const auto& spec = instance.receivers[static_cast<size_t>(j)];
    const double d = empirical_delay(
        trace.flows[static_cast<size_t>(j)], instance.packet_size,
        spec.sensitivity);
    std::printf("flow %d: empirical d(p_j)=%s bound=%s %s\n", j,
                format9(d).c_str(), format9(spec.delay_bound).c_str(),
                d <= spec.delay_bound * (1.0 + args.tol) ? "ok" : "EXCEEDED");
  }
  if (!args.out_dir.empty()) {
    ensure_dir(args.out_dir);
    auto os = open_out(fs::path(args.out_dir) / "validate.csv");
    write_comparison_csv(report, os);
  }
  if (!report.telescoping_ok) {
    std::printf("telescoping identity violated\n");
    return kInternal;
  }
  if (report.max_rel_gap > args.tol) {
    std::printf("max gap %s exceeds tolerance %s\n",
                format9(report.max_rel_gap).c_str(),
                format9(args.tol).c_str());
    return kValidationGap;
  }
  std::printf("all gaps within %s\n", format9(args.tol).c_str());
  return kOk;
}

// ---------------------------------------------------------------- experiment

struct ExperimentArgs {
  std::string config;
  std::string sweep = "1.0:4.0:0.2";
  std::vector<double> fixed_k = {25.0, 100.0};
  std::string out = "experiment.csv";
};

int run_experiment(const ExperimentArgs& args) {
  NetworkInstance base = load_instance_file(args.config);
  if (base.transmitters != 1) {
    throw UsageError("experiment expects a single-transmitter config");
  }
  if (base.receivers.empty()) throw UsageError("config has no receivers");
  const std::vector<double> sweep = parse_sweep(args.sweep);

  struct Row {
    double p1;
    std::string scheme;
    bool feasible;
    double min_rate, k1, a1;
  };
  std::vector<Row> rows;

  const auto solve_scheme = [&](const NetworkInstance& instance,
                                const std::string& scheme, double p1) {
    const SingleApProgram program = build_single_ap(instance);
    const SolveOutcome outcome = solve(program.gp);
    if (outcome.status == SolveStatus::Optimal) {
      const Solution sol = program.to_solution(instance, outcome.assignment);
      rows.push_back({p1, scheme, true, sol.objective, sol.bucket_sizes[0],
                      sol.schedule[0][0]});
    } else {
      rows.push_back({p1, scheme, false, 0.0, 0.0, 0.0});
    }
  };

  for (double p1 : sweep) {
    NetworkInstance adaptive = base;
    adaptive.receivers[0].sensitivity = p1;
    solve_scheme(adaptive, "adaptive", p1);
    for (double k : args.fixed_k) {
      NetworkInstance fixed = adaptive;
      for (auto& r : fixed.receivers) r.fixed_k = k;
      char name[32];
      std::snprintf(name, sizeof(name), "K=%g", k);
      solve_scheme(fixed, name, p1);
    }
  }

  auto os = open_out(args.out);
  os << "p1,scheme,feasible,min_rate,K1,a1\n";
  for (const auto& r : rows) {
    os << format9(r.p1) << "," << r.scheme << "," << (r.feasible ? 1 : 0)
       << "," << format9(r.min_rate) << "," << format9(r.k1) << ","
       << format9(r.a1) << "\n";
  }
  std::printf("wrote %s (%zu rows)\n", args.out.c_str(), rows.size());
  return kOk;
}

}  // namespace

std::string solution_to_json(const Solution& solution,
                             const std::string& objective_kind) {
  nlohmann::json doc;
  doc["objective_kind"] = objective_kind;
  doc["objective"] = solution.objective;
  doc["k"] = solution.bucket_sizes;
  doc["r"] = solution.rates;
  doc["a"] = solution.schedule;
  doc["R"] = solution.avg_rates;
  return doc.dump(2) + "\n";
}

Solution solution_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("solution parse error: ") + e.what());
  }
  Solution sol;
  sol.objective = doc.value("objective", 0.0);
  sol.bucket_sizes = doc.at("k").get<std::vector<double>>();
  sol.rates = doc.at("r").get<std::vector<double>>();
  sol.schedule = doc.at("a").get<std::vector<std::vector<double>>>();
  if (doc.contains("R")) {
    sol.avg_rates = doc.at("R").get<std::vector<double>>();
  }
  return sol;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Joint coding-bucket and broadcast-schedule optimization "
               "with a Monte-Carlo validator"};
  app.require_subcommand(1);

  SingleOptArgs so;
  auto* single_opt = app.add_subcommand(
      "single-opt", "Closed-form single-receiver optimum and dual");
  single_opt->add_option("--eps", so.eps, "erasure probability");
  single_opt->add_option("--d", so.feedback_delay, "feedback delay (slots)");
  single_opt->add_option("--l", so.packet_size, "packet size");
  single_opt->add_option("--p", so.p, "delay sensitivity");
  single_opt->add_option("--kmax", so.k_max, "maximum bucket size");
  single_opt->add_option("--out", so.out, "CSV output file");

  TradeoffArgs to;
  auto* tradeoff = app.add_subcommand(
      "tradeoff", "d(1) vs d(inf) trade-off curves per feedback delay");
  tradeoff->add_option("--eps", to.eps, "erasure probability");
  tradeoff->add_option("--l", to.packet_size, "packet size");
  tradeoff->add_option("--d-list", to.feedback_delays, "feedback delays")
      ->delimiter(',');
  tradeoff->add_option("--k-min", to.k_min, "bucket grid start");
  tradeoff->add_option("--k-max", to.k_max, "bucket grid end");
  tradeoff->add_option("--points", to.points, "grid points");
  tradeoff->add_option("--out", to.out_dir, "output directory");

  SolveArgs gp;
  auto* gp_solve = app.add_subcommand(
      "gp-solve", "Single-transmitter joint bucket/scheduling optimum");
  gp_solve->add_option("--config", gp.config, "instance config (JSON)")
      ->required();
  gp_solve->add_option("--objective", gp.objective, "minrate or product");
  gp_solve->add_option("--out", gp.out_dir, "output directory");
  gp_solve->add_option("--trace", gp.trace, "solver trace CSV");

  SolveArgs sp;
  auto* sp_solve = app.add_subcommand(
      "sp-solve", "Multi-transmitter optimum via successive GPs");
  sp_solve->add_option("--config", sp.config, "instance config (JSON)")
      ->required();
  sp_solve->add_option("--objective", sp.objective, "product or minrate");
  sp_solve->add_option("--out", sp.out_dir, "output directory");
  sp_solve->add_option("--trace", sp.trace, "convergence trace CSV");
  sp.objective = "product";

  SimulateArgs sim;
  auto* simulate = app.add_subcommand(
      "simulate", "Monte-Carlo run of a solved schedule");
  simulate->add_option("--config", sim.config, "instance config (JSON)")
      ->required();
  simulate->add_option("--solution", sim.solution, "solution JSON file")
      ->required();
  simulate->add_option("--reps", sim.reps, "replications");
  simulate->add_option("--packets", sim.packets, "packets per flow");
  simulate->add_option("--seed", sim.seed, "master seed");
  simulate->add_option("--symbols", sim.symbols, "payload symbols");
  simulate->add_option("--out", sim.out_dir, "output directory");

  ValidateArgs val;
  auto* validate_cmd = app.add_subcommand(
      "validate", "Optimize, simulate, and cross-check the delay formulas");
  validate_cmd->add_option("--config", val.config, "instance config (JSON)")
      ->required();
  validate_cmd->add_option("--source", val.source, "gp or sp");
  validate_cmd->add_option("--objective", val.objective,
                           "sp objective override");
  validate_cmd->add_option("--reps", val.reps, "replications");
  validate_cmd->add_option("--packets", val.packets, "packets per flow");
  validate_cmd->add_option("--seed", val.seed, "master seed");
  validate_cmd->add_option("--tol", val.tol, "maximum relative gap");
  validate_cmd->add_option("--out", val.out_dir, "output directory");

  ExperimentArgs exp;
  auto* experiment = app.add_subcommand(
      "experiment", "Adaptive vs fixed bucket sizes over a p1 sweep");
  experiment->add_option("--config", exp.config, "instance config (JSON)")
      ->required();
  experiment->add_option("--p1", exp.sweep, "sweep lo:hi:step");
  experiment->add_option("--fixed-k", exp.fixed_k, "fixed bucket sizes")
      ->delimiter(',');
  experiment->add_option("--out", exp.out, "output CSV file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (single_opt->parsed()) return run_single_opt(so);
    if (tradeoff->parsed()) return run_tradeoff(to);
    if (gp_solve->parsed()) return run_gp_solve(gp);
    if (sp_solve->parsed()) return run_sp_solve(sp);
    if (simulate->parsed()) return run_simulate(sim);
    if (validate_cmd->parsed()) return run_validate(val);
    if (experiment->parsed()) return run_experiment(exp);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInternal;
  }
  return kUsage;
}

}  // namespace codesched::cli
