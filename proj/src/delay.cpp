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

#include "codesched/delay.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace codesched {

double clamp_interval(double x, double lo, double hi) {
  return std::min(std::max(lo, x), hi);
}

double delay_metric(double bucket_size, double rate, double feedback_delay,
                    double packet_size, double sensitivity) {
  if (!(bucket_size >= 1.0)) {
    throw std::domain_error("delay_metric: bucket size must be >= 1");
  }
  if (!(rate > 0.0)) {
    throw std::domain_error("delay_metric: rate must be positive");
  }
  if (!(feedback_delay >= 0.0)) {
    throw std::domain_error("delay_metric: feedback delay must be >= 0");
  }
  if (!(packet_size > 0.0)) {
    throw std::domain_error("delay_metric: packet size must be positive");
  }
  if (!(sensitivity >= 1.0)) {
    throw std::domain_error("delay_metric: sensitivity must be >= 1");
  }
  const double norm = std::isinf(sensitivity)
                          ? 1.0
                          : std::pow(bucket_size, 1.0 / sensitivity);
  return (bucket_size / rate + feedback_delay) / (packet_size * norm);
}

double optimal_bucket_size(double erasure, double feedback_delay,
                           double sensitivity, double k_max) {
  if (!(erasure >= 0.0 && erasure < 1.0)) {
    throw std::domain_error("optimal_bucket_size: erasure must be in [0, 1)");
  }
  if (!(feedback_delay >= 0.0)) {
    throw std::domain_error("optimal_bucket_size: feedback delay must be >= 0");
  }
  if (!(sensitivity >= 1.0)) {
    throw std::domain_error("optimal_bucket_size: sensitivity must be >= 1");
  }
  if (!(k_max >= 1.0)) {
    throw std::domain_error("optimal_bucket_size: k_max must be >= 1");
  }
  if (sensitivity == 1.0) {
    // The unclamped stationary point runs off to +inf.
    return k_max;
  }
  const double unclamped =
      std::isinf(sensitivity)
          ? 0.0
          : (1.0 - erasure) * feedback_delay / (sensitivity - 1.0);
  return clamp_interval(unclamped, 1.0, k_max);
}

std::vector<DelayPoint> tradeoff_curve(double erasure, double feedback_delay,
                                       double packet_size,
                                       std::span<const double> bucket_grid) {
  if (bucket_grid.empty()) {
    throw std::invalid_argument("tradeoff_curve: empty bucket grid");
  }
  const double rate = 1.0 - erasure;
  std::vector<DelayPoint> curve;
  curve.reserve(bucket_grid.size());
  for (double k : bucket_grid) {
    DelayPoint pt;
    pt.bucket_size = k;
    pt.d1 = delay_metric(k, rate, feedback_delay, packet_size, 1.0);
    pt.dinf = delay_metric(k, rate, feedback_delay, packet_size,
                           std::numeric_limits<double>::infinity());
    // The p this K is optimal for, by inverting the stationary-point formula.
    pt.sensitivity = 1.0 + rate * feedback_delay / k;
    pt.dp = delay_metric(k, rate, feedback_delay, packet_size, pt.sensitivity);
    curve.push_back(pt);
  }
  return curve;
}

double tradeoff_dinf_from_d1(double d1, double erasure, double feedback_delay,
                             double packet_size) {
  const double denom = packet_size - 1.0 / (d1 * (1.0 - erasure));
  return feedback_delay / denom;
}

DualInfo dual_value(double erasure, double feedback_delay, double packet_size,
                    double sensitivity, double k_max) {
  if (!(erasure >= 0.0 && erasure < 1.0)) {
    throw std::domain_error("dual_value: erasure must be in [0, 1)");
  }
  if (!(sensitivity >= 1.0)) {
    throw std::domain_error("dual_value: sensitivity must be >= 1");
  }
  const double rate = 1.0 - erasure;
  if (sensitivity == 1.0) {
    // beta2 = 0 turns the formula into a 0-exponent limit; report the
    // limiting value instead of evaluating it.
    return DualInfo{1.0 / (rate * packet_size), 1.0, 0.0, false};
  }

  // Normality and orthogonality conditions:
  //   (1 - 1/p) b1 - (1/p) b2 = 0
  //            b1 +       b2 = 1
  const double inv_p = std::isinf(sensitivity) ? 0.0 : 1.0 / sensitivity;
  const double a11 = 1.0 - inv_p, a12 = -inv_p;
  const double a21 = 1.0, a22 = 1.0;
  const double det = a11 * a22 - a12 * a21;
  const double beta1 = (0.0 * a22 - a12 * 1.0) / det;
  const double beta2 = (a11 * 1.0 - 0.0 * a21) / det;

  const double term1 =
      beta1 > 0.0 ? std::pow(1.0 / (rate * packet_size * beta1), beta1) : 1.0;
  const double term2 =
      beta2 > 0.0
          ? std::pow(feedback_delay / (packet_size * beta2), beta2)
          : 1.0;

  double unclamped = std::isinf(sensitivity)
                         ? 0.0
                         : rate * feedback_delay / (sensitivity - 1.0);
  const bool interior = unclamped > 1.0 && unclamped < k_max;
  return DualInfo{term1 * term2, beta1, beta2, interior};
}

void write_curve_csv(std::span<const DelayPoint> curve, std::ostream& os) {
  os << "K,d1,dinf,dp,p\n";
  char buf[160];
  for (const auto& pt : curve) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%.9g\n",
                  pt.bucket_size, pt.d1, pt.dinf, pt.dp, pt.sensitivity);
    os << buf;
  }
}

}  // namespace codesched
