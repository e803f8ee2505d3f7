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

#include "codesched/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <ostream>
#include <stdexcept>

#include "codesched/delay.hpp"
#include "codesched/rng.hpp"

namespace codesched {

namespace {

constexpr uint64_t kRoleScheduling = 0;
constexpr uint64_t kRoleErasure = 1;
constexpr uint64_t kRoleCoefficients = 2;

constexpr int64_t kNever = -1;

uint8_t payload_byte(int flow, int64_t packet, int symbol) {
  const uint64_t h = splitmix64(
      0xA076u + 1315423911ull * static_cast<uint64_t>(flow) +
      2654435761ull * static_cast<uint64_t>(packet) +
      97531ull * static_cast<uint64_t>(symbol));
  return static_cast<uint8_t>(h & 0xff);
}

// Sender+receiver state of one flow within one replication.
struct FlowRun {
  int flow = 0;
  int rounded_bucket = 0;
  int symbols = 0;
  double feedback_delay = 0;
  int64_t total_packets = 0;

  int64_t enqueued = 0;   // packets moved into buckets so far
  int64_t delivered = 0;  // packets delivered in order so far
  int64_t bucket_index = -1;
  int64_t refill_slot = 1;  // slot at which the next bucket goes live
  int64_t active_since = 0;
  std::vector<std::vector<uint8_t>> bucket;
  std::unique_ptr<GaussianDecoder> decoder;
  bool decoded_current = false;

  std::vector<int64_t> delivery;  // T_i

  bool complete() const { return delivered >= total_packets; }

  void load_next_bucket(int64_t slot) {
    const int size = static_cast<int>(
        std::min<int64_t>(rounded_bucket, total_packets - enqueued));
    bucket.clear();
    for (int k = 0; k < size; ++k) {
      std::vector<uint8_t> packet(static_cast<size_t>(symbols));
      for (int s = 0; s < symbols; ++s) {
        packet[static_cast<size_t>(s)] =
            payload_byte(flow, enqueued + k, s);
      }
      bucket.push_back(std::move(packet));
    }
    enqueued += size;
    ++bucket_index;
    decoder = std::make_unique<GaussianDecoder>(size, symbols);
    decoded_current = false;
    active_since = slot;
    refill_slot = kNever;
  }
};

struct FlowAccumulator {
  std::vector<double> delta_sum;          // over replications
  std::vector<std::vector<double>> batch_delta_sum;
  std::vector<int64_t> batch_reps;
  double bucket_slots_sum = 0;
  int64_t bucket_count = 0;
  std::vector<double> batch_bucket_sum;
  std::vector<int64_t> batch_bucket_count;
  bool telescoping_ok = true;
  std::vector<int64_t> first_rep_delivery;
};

double lp_delay_from_means(const std::vector<double>& mean_delta,
                           double packet_size, double p) {
  const size_t n = mean_delta.size();
  if (std::isinf(p)) {
    double worst = 0.0;
    for (double v : mean_delta) worst = std::max(worst, v);
    return worst / packet_size;
  }
  double acc = 0.0;
  for (double v : mean_delta) acc += std::pow(v, p);
  return std::pow(acc / static_cast<double>(n), 1.0 / p) / packet_size;
}

int round_bucket(double k, double k_max) {
  const double clamped = clamp_interval(std::round(k), 1.0, k_max);
  return static_cast<int>(clamped);
}

}  // namespace

SimulationTrace run_session(const SessionConfig& session,
                            const CodingConfig& coding) {
  const NetworkInstance& instance = session.instance;
  const Solution& solution = session.solution;
  const int w = instance.transmitters;
  const int m = instance.num_receivers();

  if (coding.field_size != 256) {
    throw std::invalid_argument("run_session: only GF(256) is supported");
  }
  if (coding.packet_symbols < 1) {
    throw std::invalid_argument("run_session: packet_symbols must be >= 1");
  }
  if (static_cast<int>(solution.bucket_sizes.size()) != m ||
      static_cast<int>(solution.schedule.size()) != w) {
    throw std::invalid_argument("run_session: solution dimensions mismatch");
  }
  if (session.replications < 1) {
    throw std::invalid_argument("run_session: replications must be >= 1");
  }

  std::vector<int> rounded(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j) {
    rounded[static_cast<size_t>(j)] = round_bucket(
        solution.bucket_sizes[static_cast<size_t>(j)], instance.k_max);
    if (session.packets_per_flow < rounded[static_cast<size_t>(j)]) {
      throw std::invalid_argument(
          "run_session: packets_per_flow below the largest bucket");
    }
  }

  // Cumulative scheduling thresholds per transmitter; the tail probability
  // idles.
  std::vector<std::vector<double>> cumulative(static_cast<size_t>(w));
  for (int i = 0; i < w; ++i) {
    double acc = 0.0;
    for (int j = 0; j < m; ++j) {
      acc += solution.schedule[static_cast<size_t>(i)][static_cast<size_t>(j)];
      cumulative[static_cast<size_t>(i)].push_back(std::min(acc, 1.0));
    }
  }

  const int reps = session.replications;
  const int batches = std::min(10, reps);
  const int64_t n = session.packets_per_flow;

  SimulationTrace trace;
  trace.packets_per_flow = n;
  std::vector<FlowAccumulator> acc(static_cast<size_t>(m));
  for (auto& a : acc) {
    a.delta_sum.assign(static_cast<size_t>(n), 0.0);
    a.batch_delta_sum.assign(static_cast<size_t>(batches),
                             std::vector<double>(static_cast<size_t>(n), 0.0));
    a.batch_reps.assign(static_cast<size_t>(batches), 0);
    a.batch_bucket_sum.assign(static_cast<size_t>(batches), 0.0);
    a.batch_bucket_count.assign(static_cast<size_t>(batches), 0);
  }

  for (int rep = 0; rep < reps; ++rep) {
    const int batch = rep * batches / reps;
    trace.replication_seeds.push_back(
        derive_seed(coding.seed, static_cast<uint64_t>(rep), 0));
    RngStream sched(derive_seed(coding.seed, static_cast<uint64_t>(rep),
                                kRoleScheduling));
    RngStream erasure(derive_seed(coding.seed, static_cast<uint64_t>(rep),
                                  kRoleErasure));
    RngStream coeffs(derive_seed(coding.seed, static_cast<uint64_t>(rep),
                                 kRoleCoefficients));

    std::vector<FlowRun> flows(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) {
      auto& f = flows[static_cast<size_t>(j)];
      f.flow = j;
      f.rounded_bucket = rounded[static_cast<size_t>(j)];
      f.symbols = coding.packet_symbols;
      f.feedback_delay =
          instance.receivers[static_cast<size_t>(j)].feedback_delay;
      f.total_packets = n;
      f.delivery.assign(static_cast<size_t>(n), 0);
    }

    int64_t slot = 0;
    int remaining = m;
    while (remaining > 0) {
      ++slot;
      for (auto& f : flows) {
        if (!f.complete() && f.refill_slot != kNever &&
            slot >= f.refill_slot) {
          f.load_next_bucket(slot);
        }
      }

      for (int i = 0; i < w; ++i) {
        const double u = sched.uniform01();
        int target = -1;
        for (int j = 0; j < m; ++j) {
          if (u < cumulative[static_cast<size_t>(i)][static_cast<size_t>(j)]) {
            target = j;
            break;
          }
        }
        if (target < 0) continue;  // idle slot
        auto& f = flows[static_cast<size_t>(target)];
        if (f.complete() || f.bucket.empty()) {
          // Finished flows (or not-yet-live buckets) waste the slot.
          continue;
        }
        const CodedPacket packet = encode(f.bucket, coeffs);
        const double eps = instance.erasure[static_cast<size_t>(i)]
                                           [static_cast<size_t>(target)];
        const bool received = erasure.uniform01() < 1.0 - eps;
        if (received && !f.decoded_current) {
          f.decoder->absorb(packet);
        }
      }

      for (auto& f : flows) {
        if (f.complete() || f.decoded_current || !f.decoder ||
            !f.decoder->complete()) {
          continue;
        }
        // Whole bucket delivers in order at the decoding slot.
        const auto decoded = f.decoder->decode();
        const int size = static_cast<int>(decoded.size());
        for (int k = 0; k < size; ++k) {
          for (int s = 0; s < f.symbols; ++s) {
            if (decoded[static_cast<size_t>(k)][static_cast<size_t>(s)] !=
                payload_byte(f.flow, f.delivered + k, s)) {
              throw std::logic_error("run_session: decoded payload mismatch");
            }
          }
          f.delivery[static_cast<size_t>(f.delivered + k)] = slot;
        }
        f.decoded_current = true;

        auto& a = acc[static_cast<size_t>(f.flow)];
        if (size == f.rounded_bucket) {
          const double duration =
              static_cast<double>(slot - f.active_since + 1);
          a.bucket_slots_sum += duration;
          a.bucket_count += 1;
          a.batch_bucket_sum[static_cast<size_t>(batch)] += duration;
          a.batch_bucket_count[static_cast<size_t>(batch)] += 1;
        }
        if (session.collect_bucket_log) {
          const int64_t prev_decode =
              f.delivered == 0
                  ? 0
                  : f.delivery[static_cast<size_t>(f.delivered) - 1];
          const int64_t delta_first =
              f.delivered == 0
                  ? slot + static_cast<int64_t>(f.feedback_delay)
                  : slot - prev_decode;
          trace.bucket_log.push_back({f.flow, rep, f.bucket_index, slot,
                                      delta_first});
        }

        f.delivered += size;
        if (f.complete()) {
          --remaining;
        } else {
          f.refill_slot =
              slot + static_cast<int64_t>(f.feedback_delay) + 1;
        }
      }
    }

    // Fold this replication's inter-arrival vector into the accumulators.
    for (auto& f : flows) {
      auto& a = acc[static_cast<size_t>(f.flow)];
      int64_t delta_total = 0;
      for (int64_t i = 0; i < n; ++i) {
        const int64_t delta =
            i == 0 ? f.delivery[0] + static_cast<int64_t>(f.feedback_delay)
                   : f.delivery[static_cast<size_t>(i)] -
                         f.delivery[static_cast<size_t>(i) - 1];
        delta_total += delta;
        a.delta_sum[static_cast<size_t>(i)] += static_cast<double>(delta);
        a.batch_delta_sum[static_cast<size_t>(batch)]
                         [static_cast<size_t>(i)] +=
            static_cast<double>(delta);
      }
      a.batch_reps[static_cast<size_t>(batch)] += 1;
      if (delta_total != f.delivery[static_cast<size_t>(n) - 1] +
                             static_cast<int64_t>(f.feedback_delay)) {
        a.telescoping_ok = false;
      }
      if (rep == 0) a.first_rep_delivery = f.delivery;
    }
  }

  const std::vector<double> p_values = {
      1.0, 2.0, 4.0, std::numeric_limits<double>::infinity()};
  for (int j = 0; j < m; ++j) {
    auto& a = acc[static_cast<size_t>(j)];
    FlowStats stats;
    stats.rounded_bucket = rounded[static_cast<size_t>(j)];
    double reach = 0.0;
    for (int i = 0; i < w; ++i) {
      reach += solution.schedule[static_cast<size_t>(i)][static_cast<size_t>(
                   j)] *
               (1.0 - instance.erasure[static_cast<size_t>(i)]
                                      [static_cast<size_t>(j)]);
    }
    stats.achieved_rate = reach;
    stats.mean_delta.resize(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
      stats.mean_delta[static_cast<size_t>(i)] =
          a.delta_sum[static_cast<size_t>(i)] / reps;
    }
    stats.first_rep_delivery = a.first_rep_delivery;
    stats.buckets_observed = a.bucket_count;
    stats.telescoping_ok = a.telescoping_ok;
    if (a.bucket_count > 0) {
      stats.mean_bucket_slots = a.bucket_slots_sum /
                                static_cast<double>(a.bucket_count);
    }

    // Confidence half-widths from batch means.
    std::vector<double> batch_bucket_means;
    for (int b = 0; b < batches; ++b) {
      if (a.batch_bucket_count[static_cast<size_t>(b)] > 0) {
        batch_bucket_means.push_back(
            a.batch_bucket_sum[static_cast<size_t>(b)] /
            static_cast<double>(a.batch_bucket_count[static_cast<size_t>(b)]));
      }
    }
    const auto half_width = [](const std::vector<double>& xs) {
      if (xs.size() < 2) return 0.0;
      double mean = 0.0;
      for (double v : xs) mean += v;
      mean /= static_cast<double>(xs.size());
      double var = 0.0;
      for (double v : xs) var += (v - mean) * (v - mean);
      var /= static_cast<double>(xs.size() - 1);
      return 1.96 * std::sqrt(var / static_cast<double>(xs.size()));
    };
    stats.mean_bucket_ci = half_width(batch_bucket_means);

    for (double p : p_values) {
      std::vector<double> batch_values;
      for (int b = 0; b < batches; ++b) {
        if (a.batch_reps[static_cast<size_t>(b)] == 0) continue;
        std::vector<double> means(static_cast<size_t>(n));
        for (int64_t i = 0; i < n; ++i) {
          means[static_cast<size_t>(i)] =
              a.batch_delta_sum[static_cast<size_t>(b)]
                               [static_cast<size_t>(i)] /
              static_cast<double>(a.batch_reps[static_cast<size_t>(b)]);
        }
        batch_values.push_back(
            lp_delay_from_means(means, instance.packet_size, p));
      }
      const double value =
          lp_delay_from_means(stats.mean_delta, instance.packet_size, p);
      stats.empirical_delay[p] = {value, half_width(batch_values)};
    }
    trace.flows.push_back(std::move(stats));
  }
  return trace;
}

double empirical_delay(const FlowStats& flow, double packet_size, double p) {
  return lp_delay_from_means(flow.mean_delta, packet_size, p);
}

ComparisonReport compare_analytic(const SimulationTrace& trace,
                                  const NetworkInstance& instance,
                                  const Solution& solution) {
  ComparisonReport report;
  const int m = instance.num_receivers();
  if (static_cast<int>(trace.flows.size()) != m) {
    throw std::invalid_argument("compare_analytic: trace/instance mismatch");
  }
  for (int j = 0; j < m; ++j) {
    const auto& flow = trace.flows[static_cast<size_t>(j)];
    const auto& spec = instance.receivers[static_cast<size_t>(j)];
    if (!flow.telescoping_ok) report.telescoping_ok = false;
    for (const auto& [p, emp] : flow.empirical_delay) {
      ComparisonRow row;
      row.flow = j;
      row.sensitivity = p;
      row.empirical = emp.first;
      row.ci_half = emp.second;
      row.analytic_rounded =
          delay_metric(flow.rounded_bucket, flow.achieved_rate,
                       spec.feedback_delay, instance.packet_size, p);
      row.analytic_continuous = delay_metric(
          clamp_interval(solution.bucket_sizes[static_cast<size_t>(j)], 1.0,
                         instance.k_max),
          flow.achieved_rate, spec.feedback_delay, instance.packet_size, p);
      row.rel_gap =
          std::abs(row.empirical - row.analytic_rounded) /
          row.analytic_rounded;
      report.max_rel_gap = std::max(report.max_rel_gap, row.rel_gap);
      report.rows.push_back(row);
    }
  }
  return report;
}

void write_bucket_log_csv(const SimulationTrace& trace, std::ostream& os) {
  os << "flow,replication,bucket_index,completion_slot,delta_t_first\n";
  char buf[128];
  for (const auto& row : trace.bucket_log) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%lld,%lld,%lld\n", row.flow,
                  row.replication, static_cast<long long>(row.bucket_index),
                  static_cast<long long>(row.completion_slot),
                  static_cast<long long>(row.delta_t_first));
    os << buf;
  }
}

void write_comparison_csv(const ComparisonReport& report, std::ostream& os) {
  os << "flow,p,empirical,analytic_rounded,analytic_continuous,rel_gap,"
        "ci_half\n";
  char buf[200];
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                  row.flow, row.sensitivity, row.empirical,
                  row.analytic_rounded, row.analytic_continuous, row.rel_gap,
                  row.ci_half);
    os << buf;
  }
}

}  // namespace codesched
