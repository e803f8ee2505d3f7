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

#include "codesched/convex.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace codesched {

void LogSumExp::eval_all(const Eigen::VectorXd& y, double* value,
                         Eigen::VectorXd* gradient,
                         Eigen::MatrixXd* hessian) const {
  const Eigen::VectorXd z = exponents * y + log_coeffs;
  const double zmax = z.maxCoeff();
  Eigen::VectorXd w = (z.array() - zmax).exp();
  const double total = w.sum();
  if (value) *value = zmax + std::log(total);
  if (!gradient && !hessian) return;
  w /= total;  // softmax weights
  const Eigen::VectorXd g = exponents.transpose() * w;
  if (gradient) *gradient = g;
  if (hessian) {
    *hessian = exponents.transpose() * w.asDiagonal() * exponents -
               g * g.transpose();
  }
}

double LogSumExp::value(const Eigen::VectorXd& y) const {
  double v = 0.0;
  eval_all(y, &v, nullptr, nullptr);
  return v;
}

Eigen::VectorXd LogSumExp::gradient(const Eigen::VectorXd& y) const {
  Eigen::VectorXd g;
  eval_all(y, nullptr, &g, nullptr);
  return g;
}

Eigen::MatrixXd LogSumExp::hessian(const Eigen::VectorXd& y) const {
  Eigen::MatrixXd h;
  eval_all(y, nullptr, nullptr, &h);
  return h;
}

LogSumExp to_log_sum_exp(const Posynomial& f,
                         const std::vector<std::string>& variable_order) {
  std::map<std::string, int> index;
  for (size_t i = 0; i < variable_order.size(); ++i) {
    index[variable_order[i]] = static_cast<int>(i);
  }

  LogSumExp out;
  const int terms = static_cast<int>(f.terms().size());
  const int vars = static_cast<int>(variable_order.size());
  out.exponents = Eigen::MatrixXd::Zero(terms, vars);
  out.log_coeffs.resize(terms);
  for (int t = 0; t < terms; ++t) {
    const auto& mono = f.terms()[static_cast<size_t>(t)];
    out.log_coeffs[t] = std::log(mono.coefficient());
    for (const auto& [var, e] : mono.exponents()) {
      const auto it = index.find(var);
      if (it == index.end()) {
        throw std::invalid_argument("to_log_sum_exp: unknown variable " + var);
      }
      out.exponents(t, it->second) = e;
    }
  }
  return out;
}

ConvexProgram to_convex(const GpProblem& gp) {
  gp.check_well_formed();
  ConvexProgram out;
  out.variables = gp.variables;
  out.objective = to_log_sum_exp(gp.objective, gp.variables);
  out.inequalities.reserve(gp.inequalities.size());
  for (const auto& f : gp.inequalities) {
    out.inequalities.push_back(to_log_sum_exp(f, gp.variables));
  }

  const int rows = static_cast<int>(gp.equalities.size());
  const int vars = static_cast<int>(gp.variables.size());
  out.equality_coeffs = Eigen::MatrixXd::Zero(rows, vars);
  out.equality_rhs.resize(rows);
  std::map<std::string, int> index;
  for (int i = 0; i < vars; ++i) index[gp.variables[static_cast<size_t>(i)]] = i;
  for (int r = 0; r < rows; ++r) {
    const auto& mono = gp.equalities[static_cast<size_t>(r)];
    // log c + a . y = 0
    out.equality_rhs[r] = -std::log(mono.coefficient());
    for (const auto& [var, e] : mono.exponents()) {
      out.equality_coeffs(r, index.at(var)) = e;
    }
  }
  return out;
}

}  // namespace codesched
