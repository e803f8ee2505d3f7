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

#include "codesched/posy.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

namespace codesched {

namespace {

double lookup(const VarMap& assignment, const std::string& var) {
  const auto it = assignment.find(var);
  if (it == assignment.end()) {
    throw std::invalid_argument("eval: missing variable " + var);
  }
  if (!(it->second > 0.0)) {
    throw std::invalid_argument("eval: variable " + var +
                                " must be positive");
  }
  return it->second;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

Monomial::Monomial(double coefficient, std::map<std::string, double> exponents)
    : coefficient_(coefficient), exponents_(std::move(exponents)) {
  if (!(coefficient_ > 0.0) || !std::isfinite(coefficient_)) {
    throw std::invalid_argument("monomial coefficient must be positive");
  }
  for (auto it = exponents_.begin(); it != exponents_.end();) {
    if (it->second == 0.0) {
      it = exponents_.erase(it);
    } else {
      ++it;
    }
  }
}

Monomial Monomial::variable(const std::string& name, double exponent) {
  return Monomial(1.0, {{name, exponent}});
}

double Monomial::exponent(const std::string& var) const {
  const auto it = exponents_.find(var);
  return it == exponents_.end() ? 0.0 : it->second;
}

Monomial Monomial::times(const Monomial& other) const {
  std::map<std::string, double> exps = exponents_;
  for (const auto& [var, e] : other.exponents_) {
    exps[var] += e;
  }
  return Monomial(coefficient_ * other.coefficient_, std::move(exps));
}

Monomial Monomial::power(double k) const {
  std::map<std::string, double> exps;
  for (const auto& [var, e] : exponents_) {
    exps[var] = e * k;
  }
  return Monomial(std::pow(coefficient_, k), std::move(exps));
}

double Monomial::eval(const VarMap& assignment) const {
  double value = coefficient_;
  for (const auto& [var, e] : exponents_) {
    value *= std::pow(lookup(assignment, var), e);
  }
  return value;
}

std::string Monomial::str() const {
  std::ostringstream os;
  os << format_number(coefficient_);
  for (const auto& [var, e] : exponents_) {
    os << " " << var;
    if (e != 1.0) os << "^" << format_number(e);
  }
  return os.str();
}

Posynomial::Posynomial(const Monomial& m) : terms_{m} {}

Posynomial::Posynomial(std::vector<Monomial> terms) {
  if (terms.empty()) {
    throw std::invalid_argument("posynomial needs at least one term");
  }
  // Merge identical exponent maps; the map ordering is the canonical term
  // order.
  std::map<std::map<std::string, double>, double> merged;
  for (const auto& t : terms) {
    merged[t.exponents()] += t.coefficient();
  }
  terms_.reserve(merged.size());
  for (const auto& [exps, coeff] : merged) {
    terms_.emplace_back(coeff, exps);
  }
}

const Monomial& Posynomial::as_monomial() const {
  if (!is_monomial()) {
    throw std::logic_error("posynomial has more than one term");
  }
  return terms_.front();
}

double Posynomial::eval(const VarMap& assignment) const {
  double value = 0.0;
  for (const auto& t : terms_) value += t.eval(assignment);
  return value;
}

VarMap Posynomial::gradient(const VarMap& assignment) const {
  VarMap grad;
  for (const auto& t : terms_) {
    const double tv = t.eval(assignment);
    for (const auto& [var, e] : t.exponents()) {
      grad[var] += tv * e / assignment.at(var);
    }
  }
  return grad;
}

std::vector<std::string> Posynomial::variables() const {
  std::set<std::string> seen;
  for (const auto& t : terms_) {
    for (const auto& [var, e] : t.exponents()) {
      (void)e;
      seen.insert(var);
    }
  }
  return {seen.begin(), seen.end()};
}

std::string Posynomial::str() const {
  std::ostringstream os;
  for (size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0) os << " + ";
    os << terms_[i].str();
  }
  return os.str();
}

Posynomial add(const Posynomial& a, const Posynomial& b) {
  std::vector<Monomial> terms = a.terms();
  terms.insert(terms.end(), b.terms().begin(), b.terms().end());
  return Posynomial(std::move(terms));
}

Posynomial mul(const Posynomial& a, const Posynomial& b) {
  std::vector<Monomial> terms;
  terms.reserve(a.terms().size() * b.terms().size());
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      terms.push_back(ta.times(tb));
    }
  }
  return Posynomial(std::move(terms));
}

Posynomial power(const Posynomial& a, double k) {
  if (!(k > 0.0)) {
    throw std::domain_error("power: exponent must be positive");
  }
  if (a.is_monomial()) {
    return a.as_monomial().power(k);
  }
  const double rounded = std::round(k);
  if (rounded != k) {
    throw std::domain_error(
        "power: non-monomial raised to a non-integer power");
  }
  const int n = static_cast<int>(rounded);
  Posynomial result = a;
  for (int i = 1; i < n; ++i) result = mul(result, a);
  return result;
}

Posynomial div_by_monomial(const Posynomial& a, const Monomial& m) {
  const Monomial inv = m.inverse();
  std::vector<Monomial> terms;
  terms.reserve(a.terms().size());
  for (const auto& t : a.terms()) terms.push_back(t.times(inv));
  return Posynomial(std::move(terms));
}

Posynomial scale(const Posynomial& a, double c) {
  return mul(a, Posynomial(Monomial(c)));
}

double Signomial::eval(const VarMap& assignment) const {
  double value = plus.eval(assignment);
  if (minus) value -= minus->eval(assignment);
  return value;
}

void GpProblem::check_well_formed() const {
  std::set<std::string> names(variables.begin(), variables.end());
  if (names.size() != variables.size()) {
    throw std::invalid_argument("gp: duplicate variable names");
  }
  const auto require = [&names](const std::string& var) {
    if (!names.count(var)) {
      throw std::invalid_argument("gp: unknown variable " + var);
    }
  };
  for (const auto& v : objective.variables()) require(v);
  for (const auto& f : inequalities) {
    for (const auto& v : f.variables()) require(v);
  }
  for (const auto& g : equalities) {
    for (const auto& [var, e] : g.exponents()) {
      (void)e;
      require(var);
    }
  }
}

}  // namespace codesched
