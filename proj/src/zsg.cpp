#include "edgealloc/zsg.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace edgealloc::zsg {

namespace {

// An option demanding exactly the remaining capacity must commit.
constexpr double kCapacityTolerance = 1e-9;

}  // namespace

double gamma_split(const Task& task, const AccessPoint& ap, const Server& server) {
  const double offload = task.data_size * server.compute_capacity;
  const double process = task.cycles * ap.bandwidth_capacity;
  return offload / (offload + process);
}

std::optional<double> required_bandwidth(const Task& task, double gamma, double delay) {
  const double window = task.deadline - 2.0 * delay;
  if (!(window > 0)) return std::nullopt;
  return task.data_size / (gamma * window);
}

std::optional<double> required_compute(const Task& task, double gamma, double delay) {
  const double window = task.deadline - 2.0 * delay;
  if (!(window > 0)) return std::nullopt;
  return task.cycles / ((1.0 - gamma) * window);
}

double priority(const Task& task, const AccessPoint& ap, const Server& server, double bandwidth,
                double compute) {
  return task.profit /
         ((bandwidth / ap.bandwidth_capacity) * (compute / server.compute_capacity));
}

std::vector<OptionCandidate> build_candidates(const Instance& instance) {
  const auto tasks = instance.tasks();
  const auto aps = instance.aps();
  const auto servers = instance.servers();
  const auto& topo = instance.topology();

  std::vector<OptionCandidate> options;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    for (std::size_t j : instance.reachable_ap_indices(i)) {
      for (std::size_t k = 0; k < servers.size(); ++k) {
        const double delay = topo.delay(j, k);
        const double gamma = gamma_split(tasks[i], aps[j], servers[k]);
        const auto b = required_bandwidth(tasks[i], gamma, delay);
        const auto c = required_compute(tasks[i], gamma, delay);
        if (!b || !c) continue;
        options.push_back(
            {i, j, k, gamma, *b, *c, priority(tasks[i], aps[j], servers[k], *b, *c)});
      }
    }
  }

  auto key = [&](const OptionCandidate& o) {
    return std::tuple(to_int(tasks[o.task].id), to_int(aps[o.ap].id), to_int(servers[o.server].id));
  };
  std::sort(options.begin(), options.end(), [&](const OptionCandidate& a, const OptionCandidate& b) {
    if (a.priority != b.priority) return a.priority > b.priority;
    return key(a) < key(b);
  });
  return options;
}

Solution solve(const Instance& instance) {
  const auto tasks = instance.tasks();
  const auto aps = instance.aps();
  const auto servers = instance.servers();

  std::vector<double> bandwidth_left(aps.size());
  std::vector<double> compute_left(servers.size());
  for (std::size_t j = 0; j < aps.size(); ++j) bandwidth_left[j] = aps[j].bandwidth_capacity;
  for (std::size_t k = 0; k < servers.size(); ++k) compute_left[k] = servers[k].compute_capacity;
  std::vector<bool> provisioned(tasks.size(), false);

  std::vector<Assignment> chosen;
  // Walking the sorted list and skipping provisioned tasks is the same as
  // popping the maximum and discarding the task's remaining options.
  for (const auto& o : build_candidates(instance)) {
    if (provisioned[o.task]) continue;
    const double b_slack = kCapacityTolerance * aps[o.ap].bandwidth_capacity;
    const double c_slack = kCapacityTolerance * servers[o.server].compute_capacity;
    if (o.bandwidth <= bandwidth_left[o.ap] + b_slack &&
        o.compute <= compute_left[o.server] + c_slack) {
      bandwidth_left[o.ap] -= o.bandwidth;
      compute_left[o.server] -= o.compute;
      provisioned[o.task] = true;
      chosen.push_back({tasks[o.task].id, aps[o.ap].id, servers[o.server].id, o.bandwidth, o.compute});
    }
  }
  return make_solution(instance, std::move(chosen));
}

}  // namespace edgealloc::zsg
