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

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "codesched/model.hpp"
#include "codesched/rlnc.hpp"

namespace codesched {

struct CodingConfig {
  int field_size = 256;    // only GF(256) is implemented
  int packet_symbols = 4;  // payload symbols per packet
  uint64_t seed = 1;       // master seed; streams are derived per replication
};

struct SessionConfig {
  NetworkInstance instance;
  Solution solution;  // uses schedule a_ij and bucket sizes K_j (rounded)
  int64_t packets_per_flow = 0;  // N; must cover the largest rounded bucket
  int replications = 1;
  bool collect_bucket_log = false;
};

struct FlowStats {
  int rounded_bucket = 0;    // K used by the simulator
  double achieved_rate = 0;  // sum_i a_ij (1 - eps_ij)
  std::vector<double> mean_delta;   // E[delta T_i] across replications
  std::vector<int64_t> first_rep_delivery;  // T_i of replication 0
  double mean_bucket_slots = 0;     // full-bucket completion time
  double mean_bucket_ci = 0;        // half-width (batch means)
  int64_t buckets_observed = 0;
  bool telescoping_ok = true;       // sum dT_i == T_N + D, per replication
  // p -> (empirical d(p), CI half-width); p keys: 1, 2, 4, inf
  std::map<double, std::pair<double, double>> empirical_delay;
};

struct BucketLogRow {
  int flow = 0;
  int replication = 0;
  int64_t bucket_index = 0;
  int64_t completion_slot = 0;
  int64_t delta_t_first = 0;
};

struct SimulationTrace {
  std::vector<FlowStats> flows;
  std::vector<uint64_t> replication_seeds;
  std::vector<BucketLogRow> bucket_log;  // when collect_bucket_log
  int64_t packets_per_flow = 0;
};

// Slotted Monte-Carlo run of the adaptive coding scheme under the given
// schedule: every slot each transmitter independently picks a flow (or
// idles), coded packets cross the erasure channel, receivers decode full
// buckets by Gaussian elimination and ACK after the feedback delay.
// Deterministic for a fixed seed.
SimulationTrace run_session(const SessionConfig& session,
                            const CodingConfig& coding);

struct ComparisonRow {
  int flow = 0;
  double sensitivity = 0;      // p
  double empirical = 0;
  double analytic_rounded = 0;     // integer-K baseline
  double analytic_continuous = 0;  // optimizer's continuous K baseline
  double rel_gap = 0;              // empirical vs analytic_rounded
  double ci_half = 0;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  double max_rel_gap = 0;
  bool telescoping_ok = true;
};

ComparisonReport compare_analytic(const SimulationTrace& trace,
                                  const NetworkInstance& instance,
                                  const Solution& solution);

// d(p) recomputed from a flow's mean inter-arrival vector, for p values
// beyond the trace's standard set.
double empirical_delay(const FlowStats& flow, double packet_size, double p);

// flow, replication, bucket_index, completion_slot, delta_t_first
void write_bucket_log_csv(const SimulationTrace& trace, std::ostream& os);
// flow, p, empirical, analytic_rounded, analytic_continuous, rel_gap, ci
void write_comparison_csv(const ComparisonReport& report, std::ostream& os);

}  // namespace codesched
