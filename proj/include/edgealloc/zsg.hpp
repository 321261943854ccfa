#pragma once

// Zero-slack greedy heuristic.
//
// Each (task, AP, server) option splits the time left after the backhaul round
// trip between offloading and processing, sizes bandwidth and compute so the
// task finishes exactly at its deadline, and is ranked by profit per product
// of fractional resource usage. Options are committed greedily in rank order.

#include <optional>
#include <vector>

#include "edgealloc/model.hpp"

namespace edgealloc::zsg {

struct OptionCandidate {
  std::size_t task = 0;    // indices into the instance
  std::size_t ap = 0;
  std::size_t server = 0;
  double gamma = 0;        // share of the non-backhaul time spent offloading
  double bandwidth = 0;    // required bandwidth for zero slack
  double compute = 0;      // required compute for zero slack
  double priority = 0;
};

/// gamma / (1 - gamma) = (s / b_j) / (q / c_k); the deadline cancels.
double gamma_split(const Task& task, const AccessPoint& ap, const Server& server);

/// s / (gamma * (deadline - 2 * delay)), or nullopt when the backhaul round
/// trip alone uses the whole deadline.
std::optional<double> required_bandwidth(const Task& task, double gamma, double delay);

/// q / ((1 - gamma) * (deadline - 2 * delay)), nullopt as above.
std::optional<double> required_compute(const Task& task, double gamma, double delay);

/// p / ((b / b_j) * (c / c_k)).
double priority(const Task& task, const AccessPoint& ap, const Server& server, double bandwidth,
                double compute);

/// Every feasible option, sorted by priority non-increasing with ties broken
/// by (task id, AP id, server id) ascending.
std::vector<OptionCandidate> build_candidates(const Instance& instance);

Solution solve(const Instance& instance);

}  // namespace edgealloc::zsg
