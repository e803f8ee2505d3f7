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

#include "codesched/programs.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "codesched/delay.hpp"

namespace codesched {

namespace {

std::string k_var(int j) { return "K" + std::to_string(j + 1); }
std::string r_var(int j) { return "r" + std::to_string(j + 1); }
std::string big_r_var(int j) { return "R" + std::to_string(j + 1); }
std::string a_var(int i, int j) {
  return "a" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
}
std::string a_var_single(int j) { return "a" + std::to_string(j + 1); }

void require_valid(const NetworkInstance& instance, const char* who) {
  const auto violations = validate(instance);
  if (!violations.empty()) {
    std::ostringstream os;
    os << who << ": instance fails validation:";
    for (const auto& v : violations) os << " " << v.field << ";";
    throw std::invalid_argument(os.str());
  }
}

// Normalized delay constraint for receiver j:
//   K^{1-1/p} r^{-1} / (L dhat) + D K^{-1/p} / (L dhat) <= 1
Posynomial delay_constraint(const ReceiverSpec& spec, double packet_size,
                            const std::string& k, const std::string& r) {
  const double inv_p =
      std::isinf(spec.sensitivity) ? 0.0 : 1.0 / spec.sensitivity;
  const double norm = packet_size * spec.delay_bound;
  std::vector<Monomial> terms;
  terms.push_back(
      Monomial(1.0 / norm, {{k, 1.0 - inv_p}, {r, -1.0}}));
  if (spec.feedback_delay > 0.0) {
    terms.push_back(
        Monomial(spec.feedback_delay / norm, {{k, -inv_p}}));
  }
  return Posynomial(std::move(terms));
}

// Links an auxiliary rate variable v to the realized data rate:
//   v (K/r + D) / (L K) <= 1, i.e. v r^{-1}/L + v D K^{-1}/L <= 1.
Posynomial rate_link_constraint(const ReceiverSpec& spec, double packet_size,
                                const std::string& v, const std::string& k,
                                const std::string& r) {
  std::vector<Monomial> terms;
  terms.push_back(Monomial(1.0 / packet_size, {{v, 1.0}, {r, -1.0}}));
  if (spec.feedback_delay > 0.0) {
    terms.push_back(Monomial(spec.feedback_delay / packet_size,
                             {{v, 1.0}, {k, -1.0}}));
  }
  return Posynomial(std::move(terms));
}

// Bucket bounds for receiver j; fixed_k replaces them with an equality
// (bounds at a pinned boundary value would leave no strict interior).
void append_bucket_bounds(const NetworkInstance& instance, int j,
                          std::vector<Posynomial>* inequalities,
                          std::vector<Monomial>* equalities) {
  const auto& spec = instance.receivers[static_cast<size_t>(j)];
  const std::string k = k_var(j);
  if (spec.fixed_k) {
    equalities->push_back(Monomial(1.0 / *spec.fixed_k, {{k, 1.0}}));
    return;
  }
  if (instance.k_max == 1.0) {
    equalities->push_back(Monomial(1.0, {{k, 1.0}}));
    return;
  }
  inequalities->push_back(Monomial(1.0 / instance.k_max, {{k, 1.0}}));
  inequalities->push_back(Monomial(1.0, {{k, -1.0}}));
}

double realized_rate(double bucket, double rate, double feedback_delay,
                     double packet_size) {
  return packet_size * bucket / (bucket / rate + feedback_delay);
}

}  // namespace

SingleApProgram build_single_ap(const NetworkInstance& instance) {
  if (instance.transmitters != 1) {
    throw std::invalid_argument("build_single_ap: exactly one transmitter");
  }
  require_valid(instance, "build_single_ap");

  const int m = instance.num_receivers();
  const double packet_size = instance.packet_size;
  SingleApProgram program;
  program.num_receivers = m;

  GpProblem& gp = program.gp;
  for (int j = 0; j < m; ++j) gp.variables.push_back(k_var(j));
  for (int j = 0; j < m; ++j) gp.variables.push_back(r_var(j));
  for (int j = 0; j < m; ++j) gp.variables.push_back(a_var_single(j));
  gp.variables.push_back("x");

  gp.objective = Posynomial(Monomial(1.0, {{"x", -1.0}}));

  for (int j = 0; j < m; ++j) {
    gp.inequalities.push_back(
        rate_link_constraint(instance.receivers[static_cast<size_t>(j)],
                             packet_size, "x", k_var(j), r_var(j)));
  }
  for (int j = 0; j < m; ++j) {
    gp.inequalities.push_back(
        delay_constraint(instance.receivers[static_cast<size_t>(j)],
                         packet_size, k_var(j), r_var(j)));
  }
  for (int j = 0; j < m; ++j) {
    const double eps = instance.erasure[0][static_cast<size_t>(j)];
    gp.inequalities.push_back(Monomial(
        1.0 / (1.0 - eps), {{r_var(j), 1.0}, {a_var_single(j), -1.0}}));
  }
  {
    std::vector<Monomial> budget;
    for (int j = 0; j < m; ++j) {
      budget.push_back(Monomial::variable(a_var_single(j)));
    }
    gp.inequalities.push_back(Posynomial(std::move(budget)));
  }
  for (int j = 0; j < m; ++j) {
    append_bucket_bounds(instance, j, &gp.inequalities, &gp.equalities);
  }
  gp.check_well_formed();
  return program;
}

Solution SingleApProgram::to_solution(const NetworkInstance& instance,
                                      const VarMap& assignment) const {
  const int m = num_receivers;
  Solution sol;
  sol.schedule.assign(1, std::vector<double>(static_cast<size_t>(m), 0.0));
  for (int j = 0; j < m; ++j) {
    sol.bucket_sizes.push_back(assignment.at(k_var(j)));
    sol.rates.push_back(assignment.at(r_var(j)));
    sol.schedule[0][static_cast<size_t>(j)] =
        assignment.at(a_var_single(j));
    sol.avg_rates.push_back(realized_rate(
        sol.bucket_sizes.back(), sol.rates.back(),
        instance.receivers[static_cast<size_t>(j)].feedback_delay,
        instance.packet_size));
  }
  sol.objective = assignment.at("x");
  return sol;
}

MultiApProgram build_multi_ap(const NetworkInstance& instance,
                              ObjectiveKind kind) {
  require_valid(instance, "build_multi_ap");
  const int w = instance.transmitters;
  const int m = instance.num_receivers();
  const double packet_size = instance.packet_size;

  MultiApProgram program;
  program.objective_kind = kind;
  program.num_transmitters = w;
  program.num_receivers = m;

  for (int j = 0; j < m; ++j) program.variables.push_back(k_var(j));
  for (int j = 0; j < m; ++j) program.variables.push_back(r_var(j));
  if (kind == ObjectiveKind::RateProduct) {
    for (int j = 0; j < m; ++j) program.variables.push_back(big_r_var(j));
  } else {
    program.variables.push_back("x");
  }
  for (int i = 0; i < w; ++i) {
    for (int j = 0; j < m; ++j) program.variables.push_back(a_var(i, j));
  }

  if (kind == ObjectiveKind::RateProduct) {
    std::map<std::string, double> exps;
    for (int j = 0; j < m; ++j) exps[big_r_var(j)] = -1.0;
    program.objective = Posynomial(Monomial(1.0, std::move(exps)));
  } else {
    program.objective = Posynomial(Monomial(1.0, {{"x", -1.0}}));
  }

  for (int j = 0; j < m; ++j) {
    const auto& spec = instance.receivers[static_cast<size_t>(j)];
    const std::string v =
        kind == ObjectiveKind::RateProduct ? big_r_var(j) : "x";
    program.posy_constraints.push_back(
        rate_link_constraint(spec, packet_size, v, k_var(j), r_var(j)));
  }
  for (int j = 0; j < m; ++j) {
    program.posy_constraints.push_back(
        delay_constraint(instance.receivers[static_cast<size_t>(j)],
                         packet_size, k_var(j), r_var(j)));
  }
  for (int j = 0; j < m; ++j) {
    append_bucket_bounds(instance, j, &program.posy_constraints,
                         &program.equality_constraints);
  }
  for (int i = 0; i < w; ++i) {
    std::vector<Monomial> budget;
    for (int j = 0; j < m; ++j) {
      budget.push_back(Monomial::variable(a_var(i, j)));
    }
    program.posy_constraints.push_back(Posynomial(std::move(budget)));
  }

  for (int j = 0; j < m; ++j) {
    std::vector<Monomial> reach;
    for (int i = 0; i < w; ++i) {
      const double eps =
          instance.erasure[static_cast<size_t>(i)][static_cast<size_t>(j)];
      reach.push_back(Monomial(1.0 - eps, {{a_var(i, j), 1.0}}));
    }
    program.rate_constraints.push_back(
        Signomial{Posynomial(Monomial::variable(r_var(j))),
                  Posynomial(std::move(reach))});
  }
  return program;
}

bool MultiApProgram::condensation_exact() const {
  for (const auto& s : rate_constraints) {
    if (s.minus && s.minus->terms().size() > 1) return false;
  }
  return true;
}

GpProblem MultiApProgram::condensed_at(
    const VarMap& point, std::vector<std::vector<double>>* betas) const {
  GpProblem gp;
  gp.objective = objective;
  gp.inequalities = posy_constraints;
  gp.equalities = equality_constraints;
  gp.variables = variables;
  if (betas) betas->clear();
  for (const auto& s : rate_constraints) {
    std::vector<double> b;
    gp.inequalities.push_back(condense(s, point, betas ? &b : nullptr));
    if (betas) betas->push_back(std::move(b));
  }
  gp.check_well_formed();
  return gp;
}

Solution MultiApProgram::to_solution(const NetworkInstance& instance,
                                     const VarMap& assignment) const {
  const int w = num_transmitters;
  const int m = num_receivers;
  Solution sol;
  sol.schedule.assign(static_cast<size_t>(w),
                      std::vector<double>(static_cast<size_t>(m), 0.0));
  double product = 1.0;
  for (int j = 0; j < m; ++j) {
    sol.bucket_sizes.push_back(assignment.at(k_var(j)));
    sol.rates.push_back(assignment.at(r_var(j)));
    for (int i = 0; i < w; ++i) {
      sol.schedule[static_cast<size_t>(i)][static_cast<size_t>(j)] =
          assignment.at(a_var(i, j));
    }
    if (objective_kind == ObjectiveKind::RateProduct) {
      sol.avg_rates.push_back(assignment.at(big_r_var(j)));
    } else {
      sol.avg_rates.push_back(realized_rate(
          sol.bucket_sizes.back(), sol.rates.back(),
          instance.receivers[static_cast<size_t>(j)].feedback_delay,
          instance.packet_size));
    }
    product *= sol.avg_rates.back();
  }
  sol.objective = objective_kind == ObjectiveKind::RateProduct
                      ? product
                      : assignment.at("x");
  return sol;
}

Monomial condense_posynomial(const Posynomial& f, const VarMap& x0,
                             std::vector<double>* betas) {
  const double total = f.eval(x0);
  if (!(total > 0.0)) {
    throw std::domain_error("condense_posynomial: f(x0) must be positive");
  }
  Monomial g(1.0);
  if (betas) betas->clear();
  for (const auto& term : f.terms()) {
    const double beta = term.eval(x0) / total;
    if (!(beta > 0.0)) {
      throw std::domain_error(
          "condense_posynomial: zero weight at the expansion point");
    }
    if (betas) betas->push_back(beta);
    g = g.times(term.power(beta).times(
        Monomial(std::pow(1.0 / beta, beta))));
  }
  return g;
}

Monomial condense(const Signomial& constraint, const VarMap& x0,
                  std::vector<double>* betas) {
  if (!constraint.minus) {
    throw std::invalid_argument("condense: constraint has no negative part");
  }
  if (!constraint.plus.is_monomial()) {
    throw std::invalid_argument("condense: positive part must be a monomial");
  }
  const Monomial g = condense_posynomial(*constraint.minus, x0, betas);
  return constraint.plus.as_monomial().times(g.inverse());
}

namespace {

// Strictly feasible start for the condensation loop; the delay check
// decides whether it can seed the GP solver directly.
struct InitialPoint {
  VarMap point;
  bool delay_ok = true;
};

InitialPoint initial_point(const NetworkInstance& instance,
                           const MultiApProgram& program) {
  const int w = instance.transmitters;
  const int m = instance.num_receivers();
  const double packet_size = instance.packet_size;
  const double slack = 0.01;
  InitialPoint init;

  double min_realized = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m; ++j) {
    const auto& spec = instance.receivers[static_cast<size_t>(j)];
    double reach = 0.0;
    for (int i = 0; i < w; ++i) {
      const double a = (1.0 - slack) / m;
      init.point[a_var(i, j)] = a;
      reach += a * (1.0 - instance.erasure[static_cast<size_t>(i)]
                                          [static_cast<size_t>(j)]);
    }
    const double rate = (1.0 - slack) * reach;
    init.point[r_var(j)] = rate;

    double bucket;
    if (spec.fixed_k) {
      bucket = *spec.fixed_k;
    } else if (spec.sensitivity == 1.0) {
      bucket = instance.k_max;
    } else if (std::isinf(spec.sensitivity)) {
      bucket = 1.0;
    } else {
      bucket = rate * spec.feedback_delay / (spec.sensitivity - 1.0);
    }
    if (!spec.fixed_k) {
      // Nudge off the bound constraints so the point is strictly interior.
      const double lo = std::min(1.0 + 1e-3, 0.5 * (1.0 + instance.k_max));
      const double hi = std::max(instance.k_max * (1.0 - 1e-5), lo);
      bucket = clamp_interval(bucket, lo, hi);
    }
    init.point[k_var(j)] = bucket;

    const double realized =
        realized_rate(bucket, rate, spec.feedback_delay, packet_size);
    if (program.objective_kind == ObjectiveKind::RateProduct) {
      init.point[big_r_var(j)] = (1.0 - slack) * realized;
    }
    min_realized = std::min(min_realized, realized);

    const double d = delay_metric(bucket, rate, spec.feedback_delay,
                                  packet_size, spec.sensitivity);
    if (!(d <= spec.delay_bound * (1.0 - 1e-9))) init.delay_ok = false;
  }
  if (program.objective_kind == ObjectiveKind::MinRate) {
    init.point["x"] = (1.0 - slack) * min_realized;
  }
  return init;
}

}  // namespace

std::pair<Solution, CondensationState> solve_multi_ap(
    const NetworkInstance& instance, const SolverConfig& config,
    const SpStopRule& stop, ObjectiveKind kind) {
  require_valid(instance, "solve_multi_ap");
  const MultiApProgram program = build_multi_ap(instance, kind);
  const int m = program.num_receivers;

  // The monotone-descent and fixed-point checks need the inner GP solved
  // well below their own slack.
  SolverConfig inner = config;
  inner.rel_gap_tol = std::min(config.rel_gap_tol, 1e-11);

  CondensationState state;
  InitialPoint init = initial_point(instance, program);
  VarMap point = init.point;
  bool have_start = init.delay_ok;
  const bool exact = program.condensation_exact();
  std::vector<Monomial> tangents;  // Lemma-1 monomials of the last round

  for (int t = 0; t < stop.max_outer; ++t) {
    tangents.clear();
    for (const auto& s : program.rate_constraints) {
      tangents.push_back(condense_posynomial(*s.minus, point));
    }
    std::vector<std::vector<double>> betas;
    const GpProblem gp = program.condensed_at(point, &betas);
    const SolveOutcome outcome =
        solve(gp, inner, have_start ? &point : nullptr);

    if (outcome.status != SolveStatus::Optimal) {
      state.status = outcome.status;
      state.message = outcome.message;
      if (t == 0 && outcome.status == SolveStatus::Infeasible) {
        return {Solution{}, state};
      }
      break;  // keep the last feasible iterate
    }

    point = outcome.assignment;
    have_start = true;
    state.betas = std::move(betas);
    state.objective_history.push_back(outcome.objective);
    std::vector<double> buckets;
    for (int j = 0; j < m; ++j) buckets.push_back(point.at(k_var(j)));
    state.bucket_history.push_back(std::move(buckets));
    state.iterations = t + 1;

    // Tangency of the last condensation at the new iterate.
    double value_gap = 0.0;
    double grad_gap = 0.0;
    for (int j = 0; j < m; ++j) {
      const auto& f = *program.rate_constraints[static_cast<size_t>(j)].minus;
      const Posynomial g = tangents[static_cast<size_t>(j)];
      value_gap = std::max(value_gap, std::abs(f.eval(point) - g.eval(point)));
      const VarMap gf = f.gradient(point);
      const VarMap gg = g.gradient(point);
      for (const auto& [var, dv] : gf) {
        const auto it = gg.find(var);
        const double d2 = it == gg.end() ? 0.0 : it->second;
        grad_gap = std::max(grad_gap, std::abs(dv - d2));
      }
    }
    state.kkt_value_gap = value_gap;
    state.kkt_grad_gap = grad_gap;

    if (exact) {
      // Single-term sums condense to themselves: the GP is the SP.
      state.status = SolveStatus::Optimal;
      break;
    }
    if (t >= 1) {
      const double prev =
          state.objective_history[static_cast<size_t>(t) - 1];
      const double change = std::abs(outcome.objective - prev);
      if (change <= stop.rel_obj_change * std::max(1.0, std::abs(prev)) &&
          value_gap <= stop.kkt_value_tol && grad_gap <= stop.kkt_grad_tol) {
        state.status = SolveStatus::Optimal;
        break;
      }
    }
  }

  if (state.objective_history.empty()) {
    if (state.status == SolveStatus::IterLimit && state.message.empty()) {
      state.message = "no iterate completed";
    }
    return {Solution{}, state};
  }
  Solution solution = program.to_solution(instance, point);

  // Every iterate must be feasible for the original signomial program.
  const CheckResult check = check_solution(instance, solution, 1e-6);
  if (!check.ok) {
    state.message = "final iterate failed the signomial feasibility check";
  }
  return {solution, state};
}

void write_convergence_csv(const CondensationState& state, std::ostream& os) {
  os << "t,objective";
  const size_t m =
      state.bucket_history.empty() ? 0 : state.bucket_history.front().size();
  for (size_t j = 0; j < m; ++j) os << ",K" << (j + 1);
  os << "\n";
  char buf[64];
  for (size_t t = 0; t < state.objective_history.size(); ++t) {
    std::snprintf(buf, sizeof(buf), "%zu,%.9g", t,
                  state.objective_history[t]);
    os << buf;
    for (size_t j = 0; j < m; ++j) {
      std::snprintf(buf, sizeof(buf), ",%.9g", state.bucket_history[t][j]);
      os << buf;
    }
    os << "\n";
  }
}

}  // namespace codesched
