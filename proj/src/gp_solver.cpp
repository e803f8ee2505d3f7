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

#include "codesched/gp_solver.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "codesched/convex.hpp"

namespace codesched {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kStrictFeasibility = -1e-10;

// Convex program restricted to the equality manifold y = y_base + basis * z.
struct ReducedProgram {
  VectorXd y_base;
  MatrixXd basis;  // n x k; k == 0 means the equalities pin y completely
  LogSumExp objective;
  std::vector<LogSumExp> inequalities;
};

LogSumExp restrict_lse(const LogSumExp& f, const VectorXd& y_base,
                       const MatrixXd& basis) {
  LogSumExp out;
  out.exponents = f.exponents * basis;
  out.log_coeffs = f.log_coeffs + f.exponents * y_base;
  return out;
}

double max_constraint(const std::vector<LogSumExp>& cons, const VectorXd& z) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& c : cons) worst = std::max(worst, c.value(z));
  return worst;
}

struct BarrierSettings {
  double rel_gap = 1e-8;
  int max_newton = 200;
  double unbounded_below = -1e8;
  // Optional early stop, checked after every accepted step (phase-I uses
  // it to bail out once a comfortably interior point is found).
  std::function<bool(const VectorXd&)> stop_early;
};

struct BarrierState {
  VectorXd z;
  SolveStatus status = SolveStatus::IterLimit;
  double gap_bound = std::numeric_limits<double>::infinity();
  int newton_iters = 0;
};

// Value of t*f0 - sum log(-F_i); +inf outside the domain.
double barrier_value(double t, const LogSumExp& objective,
                     const std::vector<LogSumExp>& cons, const VectorXd& z) {
  double phi = t * objective.value(z);
  for (const auto& c : cons) {
    const double v = c.value(z);
    if (!(v < 0.0)) return std::numeric_limits<double>::infinity();
    phi -= std::log(-v);
  }
  return std::isfinite(phi) ? phi
                            : std::numeric_limits<double>::infinity();
}

// Minimizes the log-barrier objective along the central path. `z` must be
// strictly feasible on entry. Appends one trace row per Newton iteration
// when `trace` is given.
BarrierState barrier_minimize(const LogSumExp& objective,
                              const std::vector<LogSumExp>& cons,
                              VectorXd z, const BarrierSettings& opts,
                              std::vector<IterationRecord>* trace,
                              const std::function<double(const VectorXd&)>&
                                  report_objective) {
  BarrierState state;
  state.z = std::move(z);
  const int n = static_cast<int>(state.z.size());
  const int m = static_cast<int>(cons.size());
  const double inner_tol = 1e-9;  // Newton decrement^2 / 2 per stage

  double t = 1.0;
  const bool pure = (m == 0);
  while (true) {
    // Inner Newton loop at fixed t.
    double decrement_sq = std::numeric_limits<double>::infinity();
    for (;;) {
      if (state.newton_iters >= opts.max_newton) {
        state.status = SolveStatus::IterLimit;
        return state;
      }

      double f0v;
      VectorXd g0(n);
      MatrixXd h0(n, n);
      objective.eval_all(state.z, &f0v, &g0, &h0);
      if (f0v < opts.unbounded_below) {
        state.status = SolveStatus::Unbounded;
        return state;
      }

      VectorXd grad = t * g0;
      MatrixXd hess = t * h0;
      bool domain_ok = true;
      for (const auto& c : cons) {
        double v;
        VectorXd gc(n);
        MatrixXd hc(n, n);
        c.eval_all(state.z, &v, &gc, &hc);
        if (!(v < 0.0)) {
          domain_ok = false;
          break;
        }
        const double inv = 1.0 / (-v);
        grad += inv * gc;
        hess += inv * hc + (inv * inv) * (gc * gc.transpose());
      }
      if (!domain_ok) {
        // Cannot happen when steps respect the domain; treat as a stall.
        state.status = SolveStatus::IterLimit;
        return state;
      }

      // Newton direction with escalating Tikhonov fallback.
      VectorXd dir(n);
      double reg = 0.0;
      const double scale = std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
      for (int attempt = 0; attempt < 24; ++attempt) {
        MatrixXd h = hess;
        if (reg > 0.0) h.diagonal().array() += reg;
        Eigen::LDLT<MatrixXd> ldlt(h);
        if (ldlt.info() == Eigen::Success) {
          dir = ldlt.solve(-grad);
          if (dir.allFinite() && grad.dot(dir) <= 0.0) break;
        }
        reg = (reg == 0.0) ? 1e-12 * scale : reg * 100.0;
      }
      if (!dir.allFinite()) {
        state.status = SolveStatus::IterLimit;
        return state;
      }

      decrement_sq = -grad.dot(dir);
      state.gap_bound = (m + 0.5 * std::max(decrement_sq, 0.0)) / t;
      if (trace) {
        trace->push_back({state.newton_iters,
                          report_objective(state.z),
                          pure ? 0.5 * decrement_sq : state.gap_bound, t});
      }
      if (0.5 * decrement_sq <= inner_tol) break;

      const double lambda = std::sqrt(std::max(decrement_sq, 0.0));
      double alpha = lambda <= 0.25 ? 1.0 : 1.0 / (1.0 + lambda);

      // Pull the step inside the domain.
      const double phi0 = barrier_value(t, objective, cons, state.z);
      VectorXd cand;
      int backtracks = 0;
      for (; backtracks < 80; ++backtracks) {
        cand = state.z + alpha * dir;
        const double phi = barrier_value(t, objective, cons, cand);
        if (std::isfinite(phi)) {
          // Armijo decrease; skipped at large t where the product t*F0
          // loses the digits the test would need.
          if (t > 1e8 || phi <= phi0 + 1e-4 * alpha * grad.dot(dir) ||
              lambda <= 0.25) {
            break;
          }
        }
        alpha *= 0.5;
      }
      if (backtracks == 80) {
        state.status = SolveStatus::IterLimit;
        return state;
      }
      state.z = cand;
      ++state.newton_iters;

      if (opts.stop_early && opts.stop_early(state.z)) {
        state.status = SolveStatus::Optimal;
        state.gap_bound = m / t;
        return state;
      }
    }

    if (pure) {
      state.status = SolveStatus::Optimal;
      state.gap_bound = 0.5 * decrement_sq;
      return state;
    }
    if (static_cast<double>(m) / t <= opts.rel_gap / 3.0) {
      state.status = SolveStatus::Optimal;
      state.gap_bound = (m + 0.5 * decrement_sq) / t;
      return state;
    }
    t *= 10.0;
  }
}

struct Eliminated {
  bool consistent = true;
  VectorXd y_base;
  MatrixXd basis;
};

// Particular solution + nullspace basis of the affine equality system.
Eliminated eliminate_equalities(const ConvexProgram& cp) {
  Eliminated out;
  const int n = static_cast<int>(cp.variables.size());
  const int rows = static_cast<int>(cp.equality_coeffs.rows());
  if (rows == 0) {
    out.y_base = VectorXd::Zero(n);
    out.basis = MatrixXd::Identity(n, n);
    return out;
  }
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(cp.equality_coeffs);
  out.y_base = cod.solve(cp.equality_rhs);
  const double residual =
      (cp.equality_coeffs * out.y_base - cp.equality_rhs).norm();
  if (residual > 1e-9 * (1.0 + cp.equality_rhs.norm())) {
    out.consistent = false;
    return out;
  }
  Eigen::FullPivLU<MatrixXd> lu(cp.equality_coeffs);
  out.basis = lu.kernel();  // n x k, k = 0 when equalities pin y
  if (lu.dimensionOfKernel() == 0) {
    out.basis = MatrixXd::Zero(n, 0);
  }
  return out;
}

ReducedProgram reduce(const ConvexProgram& cp, const Eliminated& elim) {
  ReducedProgram red;
  red.y_base = elim.y_base;
  red.basis = elim.basis;
  red.objective = restrict_lse(cp.objective, elim.y_base, elim.basis);
  red.inequalities.reserve(cp.inequalities.size());
  for (const auto& c : cp.inequalities) {
    red.inequalities.push_back(restrict_lse(c, elim.y_base, elim.basis));
  }
  return red;
}

VarMap assignment_from(const std::vector<std::string>& variables,
                       const VectorXd& y) {
  VarMap out;
  for (size_t i = 0; i < variables.size(); ++i) {
    out[variables[i]] = std::exp(y[static_cast<Eigen::Index>(i)]);
  }
  return out;
}

// Phase-I in the reduced space: minimize sigma s.t. F_i(z) - sigma <= 0.
// Augments every constraint with a -1 column for sigma.
struct PhaseOneOutcome {
  SolveStatus status = SolveStatus::IterLimit;
  double optimum = 0.0;  // s* in x-space units
  VectorXd z;
};

PhaseOneOutcome run_phase1(const ReducedProgram& red,
                           const SolverConfig& config, bool allow_early_stop) {
  const int k = static_cast<int>(red.basis.cols());
  const int m = static_cast<int>(red.inequalities.size());
  PhaseOneOutcome out;
  if (m == 0) {
    out.status = SolveStatus::Optimal;
    out.optimum = 0.0;
    out.z = VectorXd::Zero(k);
    return out;
  }

  std::vector<LogSumExp> cons;
  cons.reserve(red.inequalities.size());
  for (const auto& c : red.inequalities) {
    LogSumExp aug;
    aug.exponents.resize(c.num_terms(), k + 1);
    aug.exponents.leftCols(k) = c.exponents;
    aug.exponents.col(k).setConstant(-1.0);
    aug.log_coeffs = c.log_coeffs;
    cons.push_back(std::move(aug));
  }
  LogSumExp objective;
  objective.exponents = Eigen::RowVectorXd::Zero(k + 1);
  objective.exponents(0, k) = 1.0;
  objective.log_coeffs = VectorXd::Zero(1);

  VectorXd start = VectorXd::Zero(k + 1);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& c : red.inequalities) {
    worst = std::max(worst, c.value(VectorXd::Zero(k)));
  }
  start[k] = worst + 1.0;

  BarrierSettings opts;
  opts.rel_gap = std::min(config.rel_gap_tol, 1e-9);
  opts.max_newton = config.max_iter;
  opts.unbounded_below = -1e8;  // sigma this low certifies feasibility
  if (allow_early_stop) {
    std::vector<LogSumExp> plain = red.inequalities;
    opts.stop_early = [plain](const VectorXd& zs) {
      return max_constraint(plain, zs.head(zs.size() - 1)) <
             std::log(0.9);
    };
  }

  const auto report = [](const VectorXd& zs) {
    return std::exp(zs[zs.size() - 1]);
  };
  BarrierState state =
      barrier_minimize(objective, cons, start, opts, nullptr, report);

  out.z = state.z.head(k);
  if (state.status == SolveStatus::Unbounded) {
    // sigma ran off below any bound: wildly feasible.
    out.status = SolveStatus::Optimal;
    out.optimum = 0.0;
    return out;
  }
  out.status = state.status;
  // Achievable level at the final point; within the barrier gap of s*.
  out.optimum = std::exp(max_constraint(red.inequalities, out.z));
  return out;
}

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::IterLimit: return "iteration-limit";
  }
  return "unknown";
}

SolveOutcome solve(const GpProblem& gp, const SolverConfig& config,
                   const VarMap* start) {
  if (gp.variables.empty()) {
    throw std::invalid_argument("solve: problem has no variables");
  }
  const ConvexProgram cp = to_convex(gp);
  SolveOutcome outcome;

  const Eliminated elim = eliminate_equalities(cp);
  if (!elim.consistent) {
    outcome.status = SolveStatus::Infeasible;
    outcome.message = "monomial equalities are inconsistent";
    return outcome;
  }
  const ReducedProgram red = reduce(cp, elim);
  const int k = static_cast<int>(red.basis.cols());
  const int m = static_cast<int>(red.inequalities.size());

  const auto finish = [&](const VectorXd& z, SolveStatus status,
                          double gap) {
    const VectorXd y = red.y_base + red.basis * z;
    outcome.assignment = assignment_from(cp.variables, y);
    outcome.status = status;
    outcome.kkt_residual = gap;
    if (status == SolveStatus::Optimal || status == SolveStatus::IterLimit) {
      outcome.objective = gp.objective.eval(outcome.assignment);
    }
  };

  if (k == 0) {
    // Equalities pin the point; only feasibility is left to check.
    const VectorXd z0(0);
    const double worst = m == 0 ? -1.0 : max_constraint(red.inequalities, z0);
    if (worst <= std::log1p(config.feasibility_margin)) {
      finish(z0, SolveStatus::Optimal, 0.0);
    } else {
      outcome.status = SolveStatus::Infeasible;
      outcome.message = "equality-pinned point violates the inequalities";
    }
    return outcome;
  }

  // Pick a strictly feasible start: the caller's point when usable, else
  // all-ones x (z such that y is closest to 0), else phase-I.
  VectorXd z0 = VectorXd::Zero(k);
  bool have_start = false;
  if (start) {
    VectorXd y0(cp.variables.size());
    bool complete = true;
    for (size_t i = 0; i < cp.variables.size(); ++i) {
      const auto it = start->find(cp.variables[i]);
      if (it == start->end() || !(it->second > 0.0)) {
        complete = false;
        break;
      }
      y0[static_cast<Eigen::Index>(i)] = std::log(it->second);
    }
    if (complete) {
      // Least-squares projection onto the equality manifold.
      const VectorXd rhs = y0 - red.y_base;
      const VectorXd z = red.basis.colPivHouseholderQr().solve(rhs);
      if (max_constraint(red.inequalities, z) < kStrictFeasibility) {
        z0 = z;
        have_start = true;
      }
    }
  }
  if (!have_start && m > 0 &&
      max_constraint(red.inequalities, VectorXd::Zero(k)) <
          kStrictFeasibility) {
    z0 = VectorXd::Zero(k);
    have_start = true;
  }
  if (!have_start && m > 0) {
    const PhaseOneOutcome p1 = run_phase1(red, config, /*early_stop=*/true);
    if (p1.status == SolveStatus::IterLimit) {
      outcome.status = SolveStatus::IterLimit;
      outcome.message = "phase-I hit the iteration limit";
      return outcome;
    }
    if (p1.optimum > 1.0 + config.feasibility_margin) {
      outcome.status = SolveStatus::Infeasible;
      char buf[80];
      std::snprintf(buf, sizeof(buf), "phase-I optimum %.6g > 1", p1.optimum);
      outcome.message = buf;
      return outcome;
    }
    if (max_constraint(red.inequalities, p1.z) >= kStrictFeasibility) {
      outcome.status = SolveStatus::Infeasible;
      outcome.message = "no strictly feasible point found";
      return outcome;
    }
    z0 = p1.z;
  }

  BarrierSettings opts;
  opts.rel_gap = config.rel_gap_tol;
  opts.max_newton = config.max_iter;
  opts.unbounded_below = -1.0 / config.rel_gap_tol;
  const auto report = [&](const VectorXd& z) {
    return std::exp(red.objective.value(z));
  };
  BarrierState state = barrier_minimize(red.objective, red.inequalities, z0,
                                        opts, &outcome.trace, report);
  if (state.status == SolveStatus::Unbounded) {
    outcome.status = SolveStatus::Unbounded;
    outcome.message = "objective diverges below any bound";
    return outcome;
  }
  finish(state.z, state.status, state.gap_bound);
  if (state.status == SolveStatus::IterLimit) {
    outcome.message = "Newton iteration budget exhausted";
  }
  return outcome;
}

PhaseOneResult phase1(const GpProblem& gp, const SolverConfig& config) {
  const ConvexProgram cp = to_convex(gp);
  PhaseOneResult result;

  const Eliminated elim = eliminate_equalities(cp);
  if (!elim.consistent) {
    result.status = SolveStatus::Infeasible;
    result.optimum = std::numeric_limits<double>::infinity();
    return result;
  }
  const ReducedProgram red = reduce(cp, elim);
  if (red.basis.cols() == 0) {
    const VectorXd z0(0);
    result.status = SolveStatus::Optimal;
    result.optimum = red.inequalities.empty()
                         ? 0.0
                         : std::exp(max_constraint(red.inequalities, z0));
    result.point = assignment_from(cp.variables, red.y_base);
    return result;
  }

  const PhaseOneOutcome p1 = run_phase1(red, config, /*early_stop=*/false);
  result.status =
      p1.status == SolveStatus::IterLimit ? SolveStatus::IterLimit
                                          : SolveStatus::Optimal;
  result.optimum = p1.optimum;
  result.point =
      assignment_from(cp.variables, red.y_base + red.basis * p1.z);
  return result;
}

void write_trace_csv(const SolveOutcome& outcome, std::ostream& os) {
  os << "iter,objective,residual,barrier\n";
  char buf[160];
  for (const auto& row : outcome.trace) {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g\n", row.iter,
                  row.objective, row.residual, row.barrier);
    os << buf;
  }
}

}  // namespace codesched
