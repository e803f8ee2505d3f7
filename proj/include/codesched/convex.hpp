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

#include <vector>

#include <Eigen/Core>

#include "codesched/posy.hpp"

namespace codesched {

// log f(e^y) for a posynomial f: a log-sum-exp of affine forms in y,
// evaluated with a max shift.
struct LogSumExp {
  Eigen::MatrixXd exponents;   // terms x vars
  Eigen::VectorXd log_coeffs;  // per term

  int num_terms() const { return static_cast<int>(exponents.rows()); }
  int num_vars() const { return static_cast<int>(exponents.cols()); }

  double value(const Eigen::VectorXd& y) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& y) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& y) const;
  // Any output pointer may be null.
  void eval_all(const Eigen::VectorXd& y, double* value,
                Eigen::VectorXd* gradient, Eigen::MatrixXd* hessian) const;
};

// The y = log x image of a standard-form GP. Posynomial constraints become
// F_i(y) <= 0, monomial equalities become affine rows a . y = rhs.
struct ConvexProgram {
  std::vector<std::string> variables;
  LogSumExp objective;
  std::vector<LogSumExp> inequalities;
  Eigen::MatrixXd equality_coeffs;  // rows x vars
  Eigen::VectorXd equality_rhs;
};

LogSumExp to_log_sum_exp(const Posynomial& f,
                         const std::vector<std::string>& variable_order);

ConvexProgram to_convex(const GpProblem& gp);

}  // namespace codesched
