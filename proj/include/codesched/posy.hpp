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

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace codesched {

using VarMap = std::map<std::string, double>;

// c * prod x_i^{a_i} with c > 0 and arbitrary real exponents. Zero exponents
// are dropped so structurally equal monomials compare equal.
class Monomial {
 public:
  Monomial() = default;  // the constant 1
  explicit Monomial(double coefficient,
                    std::map<std::string, double> exponents = {});
  static Monomial variable(const std::string& name, double exponent = 1.0);

  double coefficient() const { return coefficient_; }
  const std::map<std::string, double>& exponents() const { return exponents_; }
  double exponent(const std::string& var) const;

  Monomial times(const Monomial& other) const;
  Monomial power(double k) const;  // any real exponent
  Monomial inverse() const { return power(-1.0); }

  double eval(const VarMap& assignment) const;
  std::string str() const;

  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  double coefficient_ = 1.0;
  std::map<std::string, double> exponents_;
};

// Nonempty sum of monomials; terms with identical exponent maps are merged
// and kept in a canonical order.
class Posynomial {
 public:
  Posynomial() : terms_{Monomial()} {}  // the constant 1
  Posynomial(const Monomial& m);  // NOLINT: implicit lift is intended
  explicit Posynomial(std::vector<Monomial> terms);

  const std::vector<Monomial>& terms() const { return terms_; }
  bool is_monomial() const { return terms_.size() == 1; }
  const Monomial& as_monomial() const;

  double eval(const VarMap& assignment) const;
  VarMap gradient(const VarMap& assignment) const;
  std::vector<std::string> variables() const;
  std::string str() const;

 private:
  std::vector<Monomial> terms_;
};

Posynomial add(const Posynomial& a, const Posynomial& b);
Posynomial mul(const Posynomial& a, const Posynomial& b);
// k must be positive; a non-integer k requires a monomial argument.
Posynomial power(const Posynomial& a, double k);
Posynomial div_by_monomial(const Posynomial& a, const Monomial& m);
Posynomial scale(const Posynomial& a, double c);  // c > 0

inline Posynomial operator+(const Posynomial& a, const Posynomial& b) {
  return add(a, b);
}
inline Posynomial operator*(const Posynomial& a, const Posynomial& b) {
  return mul(a, b);
}

// f+ - f-; an absent f- means the signomial is a posynomial.
struct Signomial {
  Posynomial plus;
  std::optional<Posynomial> minus;

  double eval(const VarMap& assignment) const;
  bool is_posynomial() const { return !minus.has_value(); }
};

// Standard-form geometric program: minimize a posynomial subject to
// posynomial inequalities f_i <= 1 and monomial equalities g_j = 1, over
// implicitly positive named variables.
struct GpProblem {
  Posynomial objective;
  std::vector<Posynomial> inequalities;
  std::vector<Monomial> equalities;
  std::vector<std::string> variables;  // ordered

  // Throws std::invalid_argument when a referenced variable is missing
  // from `variables` or the list has duplicates.
  void check_well_formed() const;
};

}  // namespace codesched
