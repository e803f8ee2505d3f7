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

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace codesched {

// p = infinity selects the max-norm delay metric.
inline constexpr double kMaxSensitivity =
    std::numeric_limits<double>::infinity();

struct ReceiverSpec {
  std::string label;
  double feedback_delay = 0.0;  // D, in slots
  double sensitivity = 1.0;     // p, in [1, inf]
  double delay_bound = 1.0;     // d_hat, slots per data unit
  std::optional<double> fixed_k;  // freezes the bucket size when set
};

struct NetworkInstance {
  int transmitters = 1;      // W
  double packet_size = 1.0;  // L
  double k_max = 1.0;
  std::vector<ReceiverSpec> receivers;       // length M
  std::vector<std::vector<double>> erasure;  // W rows, M columns

  int num_receivers() const { return static_cast<int>(receivers.size()); }
};

struct Violation {
  std::string field;
  std::string message;
};

// Empty result iff every type invariant holds. Violations are data, not
// failures.
std::vector<Violation> validate(const NetworkInstance& instance);

// Parses a JSON config document (see README for the schema). Throws
// std::runtime_error with location/field context on malformed input, and
// when validation fails.
NetworkInstance load_instance(const std::string& text);
NetworkInstance load_instance_file(const std::string& path);
std::string serialize(const NetworkInstance& instance);

struct Solution {
  std::vector<double> bucket_sizes;           // K_j, continuous
  std::vector<std::vector<double>> schedule;  // a_ij, W rows x M columns
  std::vector<double> rates;                  // r_j
  std::vector<double> avg_rates;              // R_j; may be empty
  double objective = 0.0;
};

struct CheckResult {
  bool ok = true;
  std::vector<Violation> violations;
};

// Verifies scheduling, rate, delay and bound constraints at relative
// tolerance tol. Throws std::invalid_argument on dimension mismatch.
CheckResult check_solution(const NetworkInstance& instance,
                           const Solution& solution, double tol = 1e-6);

}  // namespace codesched
