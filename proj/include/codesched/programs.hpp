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

#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "codesched/gp_solver.hpp"
#include "codesched/model.hpp"
#include "codesched/posy.hpp"

namespace codesched {

enum class ObjectiveKind { MinRate, RateProduct };

// Max-min-rate program for one transmitter, lowered to GP standard form
// with the auxiliary objective variable. Constraints, in order: the
// objective-linking posynomials, the normalized delay posynomials, the
// rate monomials, the scheduling budget, and the bucket-size bounds.
// Receivers with fixed_k get monomial equalities pinning K_j.
struct SingleApProgram {
  GpProblem gp;
  int num_receivers = 0;

  Solution to_solution(const NetworkInstance& instance,
                       const VarMap& assignment) const;
};

// Requires W == 1 and a valid instance.
SingleApProgram build_single_ap(const NetworkInstance& instance);

// Multi-transmitter program: GP-compatible parts (objective, delay,
// average-rate links, bounds, per-transmitter scheduling) plus one
// signomial rate constraint r_j - sum_i a_ij (1 - eps_ij) <= 0 per
// receiver. Condensing the signomials at a point yields a standard GP.
struct MultiApProgram {
  ObjectiveKind objective_kind = ObjectiveKind::RateProduct;
  int num_transmitters = 0;
  int num_receivers = 0;
  Posynomial objective;
  std::vector<Posynomial> posy_constraints;
  std::vector<Monomial> equality_constraints;
  std::vector<Signomial> rate_constraints;  // one per receiver
  std::vector<std::string> variables;

  // True when every rate sum has a single term (one transmitter reaching
  // the receiver): the condensation is exact and the program is a GP.
  bool condensation_exact() const;

  // GP with each rate signomial replaced by its condensed monomial
  // constraint at `point`. Optionally reports the condensation weights.
  GpProblem condensed_at(const VarMap& point,
                         std::vector<std::vector<double>>* betas = nullptr)
      const;

  Solution to_solution(const NetworkInstance& instance,
                       const VarMap& assignment) const;
};

MultiApProgram build_multi_ap(
    const NetworkInstance& instance,
    ObjectiveKind kind = ObjectiveKind::RateProduct);

// Weighted AM-GM monomial bound of a posynomial, expanded at x0:
//   g(x) = prod_k (u_k(x) / beta_k)^{beta_k},  beta_k = u_k(x0) / f(x0).
// g <= f everywhere, g(x0) = f(x0), grad g(x0) = grad f(x0).
Monomial condense_posynomial(const Posynomial& f, const VarMap& x0,
                             std::vector<double>* betas = nullptr);

// Condenses a signomial constraint plus - minus <= 0 whose positive part
// is a monomial into the normalized monomial constraint plus / g <= 1.
Monomial condense(const Signomial& constraint, const VarMap& x0,
                  std::vector<double>* betas = nullptr);

struct SpStopRule {
  double rel_obj_change = 1e-6;
  int max_outer = 50;
  double kkt_value_tol = 1e-8;
  double kkt_grad_tol = 1e-5;
};

struct CondensationState {
  SolveStatus status = SolveStatus::IterLimit;
  int iterations = 0;
  std::vector<double> objective_history;                // Z^{*,t}
  std::vector<std::vector<double>> bucket_history;      // K_j per iterate
  std::vector<std::vector<double>> betas;               // final weights
  double kkt_value_gap = 0.0;  // max_j |f_j(a*) - g_j(a*)|
  double kkt_grad_gap = 0.0;   // max-norm of grad f_j - grad g_j at a*
  std::string message;
};

// Successive GP approximation of the signomial program: condense the rate
// constraints at the current iterate, solve the GP, repeat until the
// objective settles and the condensation is tangent at the iterate. Every
// iterate is feasible for the original signomial program.
std::pair<Solution, CondensationState> solve_multi_ap(
    const NetworkInstance& instance, const SolverConfig& config = {},
    const SpStopRule& stop = {},
    ObjectiveKind kind = ObjectiveKind::RateProduct);

// Columns: t, objective, K_1..K_M
void write_convergence_csv(const CondensationState& state, std::ostream& os);

}  // namespace codesched
