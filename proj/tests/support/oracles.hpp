// Independent reference computations for the test suites. Everything here
// works from first principles (brute force, grids, finite differences) and
// must stay clear of the library's solver paths.
#pragma once

#include <cstdint>
#include <vector>

#include "codesched/model.hpp"
#include "codesched/posy.hpp"

namespace oracles {

// Normalized lp norm of an expected inter-arrival vector.
double lp_norm_delay(const std::vector<double>& expected_delta,
                     double packet_size, double p);

// One bucket's expectation vector: K/r + D for the first packet, zeros for
// the rest.
std::vector<double> bucket_delta_vector(int bucket, double rate,
                                        double feedback_delay);

// Shared dense grid over bucket sizes (log table amortized across cases).
struct DelayGrid {
  std::vector<double> k;
  std::vector<double> log_k;
};
DelayGrid make_delay_grid(double k_max, double step);

struct GridMin {
  double k = 0;
  double value = 0;
};
GridMin delay_grid_min(const DelayGrid& grid, double eps,
                       double feedback_delay, double packet_size, double p);

// Random GP with box-shaped posynomial bounds per variable plus one scaled
// constraint; strictly feasible by construction.
struct RandomGp {
  codesched::GpProblem gp;
  std::vector<double> lo, hi;  // feasible interval of the box constraint
};
RandomGp make_random_gp(uint64_t seed);

// Two-stage dense grid minimization over the boxes.
double grid_search_gp(const RandomGp& rgp, int coarse_points);

// Minimal total scheduling share needed by a fixed-K single-transmitter
// instance; feasible iff the result is <= 1. +inf when some receiver's
// bound is unreachable at any rate.
double fixed_k_min_budget(const codesched::NetworkInstance& instance,
                          double fixed_k);

// Largest bucket meeting the delay bound at rate r, or -1 when none does.
double best_feasible_bucket(double rate, double feedback_delay,
                            double packet_size, double sensitivity,
                            double delay_bound, double k_max);

// Best rate product over bucket choices at fixed per-receiver rates;
// 0 when some receiver cannot meet its bound.
double best_product_at_rates(const codesched::NetworkInstance& instance,
                             const std::vector<double>& rates);

// Scheduling-grid maximization of the rate product for W = 2 instances
// (compositions with the given step, per-point optimal buckets).
double sp_grid_best_product(const codesched::NetworkInstance& instance,
                            double step);

// Same idea for the single-transmitter max-min rate.
double single_ap_grid_best_minrate(const codesched::NetworkInstance& instance,
                                   double step);

}  // namespace oracles
