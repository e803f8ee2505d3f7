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
#include <string>
#include <vector>

#include "codesched/posy.hpp"

namespace codesched {

struct SolverConfig {
  double rel_gap_tol = 1e-8;
  int max_iter = 200;  // Newton iteration budget per phase
  double feasibility_margin = 1e-9;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterLimit };

const char* to_string(SolveStatus status);

struct IterationRecord {
  int iter = 0;
  double objective = 0.0;  // x-space objective at the iterate
  double residual = 0.0;   // suboptimality bound (log-space)
  double barrier = 0.0;    // barrier parameter t
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::IterLimit;
  VarMap assignment;
  double objective = 0.0;
  double kkt_residual = 0.0;
  std::vector<IterationRecord> trace;
  std::string message;
};

// Solves a standard-form GP by log-barrier Newton path-following on the
// convex (y = log x) form. Monomial equalities are eliminated affinely
// before the barrier method. A caller-supplied start is used when it is
// strictly feasible; otherwise a phase-I problem finds one.
SolveOutcome solve(const GpProblem& gp, const SolverConfig& config = {},
                   const VarMap* start = nullptr);

struct PhaseOneResult {
  SolveStatus status = SolveStatus::IterLimit;
  double optimum = 0.0;  // s*: minimized max of normalized constraints
  VarMap point;
};

// Minimizes s subject to f_i(x) <= s. s* <= 1 + feasibility_margin
// certifies feasibility; the returned point is then strictly feasible
// whenever s* < 1.
PhaseOneResult phase1(const GpProblem& gp, const SolverConfig& config = {});

// Columns: iter, objective, residual, barrier
void write_trace_csv(const SolveOutcome& outcome, std::ostream& os);

}  // namespace codesched
