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
#include <limits>
#include <span>
#include <vector>

namespace codesched {

// min(max(lo, x), hi)
double clamp_interval(double x, double lo, double hi);

// The lp delay metric of the bucketed coding scheme:
//   d(p) = (K/r + D) / (L * K^{1/p}),   with K^{1/p} = 1 at p = inf.
// Throws std::domain_error outside K >= 1, r > 0, D >= 0, L > 0, p >= 1.
// r may exceed 1 when several transmitters serve the same receiver.
double delay_metric(double bucket_size, double rate, double feedback_delay,
                    double packet_size, double sensitivity);

// Delay-minimizing bucket size clamped to [1, k_max]:
//   K* = clamp((1 - eps) * D / (p - 1)).
// p = 1 projects to k_max, p = inf projects to 1.
double optimal_bucket_size(double erasure, double feedback_delay,
                           double sensitivity, double k_max);

struct DelayPoint {
  double bucket_size;  // K
  double d1;           // average delay per packet (inverse rate)
  double dinf;         // worst expected inter-arrival delay
  double dp;           // d(p) at the sensitivity this K is optimal for
  double sensitivity;  // that p: 1 + (1 - eps) * D / K
};

std::vector<DelayPoint> tradeoff_curve(double erasure, double feedback_delay,
                                       double packet_size,
                                       std::span<const double> bucket_grid);

// d(inf) implied by d(1) along the fixed-erasure trade-off curve:
//   d(inf) = D / (L - 1 / (d1 * (1 - eps))).
double tradeoff_dinf_from_d1(double d1, double erasure, double feedback_delay,
                             double packet_size);

struct DualInfo {
  double value;   // optimal d(p) from the dual function
  double beta1;   // weight of the K/r term
  double beta2;   // weight of the D term
  bool interior;  // unclamped K* strictly inside (1, k_max)
};

// Dual of the single-receiver delay minimization. The duality identity
// value == primal optimum is only asserted when `interior` is true.
// p = 1 returns the documented limit 1 / ((1 - eps) * L) with interior
// false instead of evaluating the zero-exponent formula.
DualInfo dual_value(double erasure, double feedback_delay, double packet_size,
                    double sensitivity,
                    double k_max = std::numeric_limits<double>::infinity());

// Columns: K, d1, dinf, dp, p
void write_curve_csv(std::span<const DelayPoint> curve, std::ostream& os);

}  // namespace codesched
