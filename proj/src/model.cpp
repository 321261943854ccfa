#include "edgealloc/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace edgealloc {

namespace {

std::string join_violations(const std::vector<std::string>& violations) {
  std::ostringstream out;
  out << violations.size() << " violation(s)";
  for (const auto& v : violations) out << "\n  - " << v;
  return out.str();
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0; }

}  // namespace

ParseError::ParseError(std::vector<std::string> violations)
    : std::runtime_error(join_violations(violations)), violations_(std::move(violations)) {}

Topology::Topology(std::size_t n_aps, std::size_t n_servers, std::vector<double> delays)
    : n_aps_(n_aps), n_servers_(n_servers), delays_(std::move(delays)) {
  if (delays_.size() != n_aps_ * n_servers_) {
    throw ParseError({"delay matrix has " + std::to_string(delays_.size()) +
                      " entries, expected " + std::to_string(n_aps_ * n_servers_)});
  }
}

double Topology::mean_delay() const {
  if (delays_.empty()) return 0.0;
  return std::accumulate(delays_.begin(), delays_.end(), 0.0) /
         static_cast<double>(delays_.size());
}

double Topology::max_delay() const {
  if (delays_.empty()) return 0.0;
  return *std::max_element(delays_.begin(), delays_.end());
}

Instance::Instance(std::vector<Task> tasks, std::vector<AccessPoint> aps,
                   std::vector<Server> servers, Topology topology)
    : tasks_(std::move(tasks)),
      aps_(std::move(aps)),
      servers_(std::move(servers)),
      topology_(std::move(topology)) {
  std::vector<std::string> bad;

  for (std::size_t j = 0; j < aps_.size(); ++j) {
    const auto& ap = aps_[j];
    if (!ap_by_id_.emplace(to_int(ap.id), j).second)
      bad.push_back("duplicate access point id " + std::to_string(to_int(ap.id)));
    if (to_int(ap.id) < 0)
      bad.push_back("access point id " + std::to_string(to_int(ap.id)) + " is negative");
    if (!positive_finite(ap.bandwidth_capacity))
      bad.push_back("access point " + std::to_string(to_int(ap.id)) +
                    ": bandwidth capacity must be > 0");
  }
  for (std::size_t k = 0; k < servers_.size(); ++k) {
    const auto& sv = servers_[k];
    if (!server_by_id_.emplace(to_int(sv.id), k).second)
      bad.push_back("duplicate server id " + std::to_string(to_int(sv.id)));
    if (to_int(sv.id) < 0)
      bad.push_back("server id " + std::to_string(to_int(sv.id)) + " is negative");
    if (!positive_finite(sv.compute_capacity))
      bad.push_back("server " + std::to_string(to_int(sv.id)) + ": compute capacity must be > 0");
    if (sv.colocated_ap && !ap_by_id_.contains(to_int(*sv.colocated_ap)))
      bad.push_back("server " + std::to_string(to_int(sv.id)) + ": colocated access point " +
                    std::to_string(to_int(*sv.colocated_ap)) + " does not exist");
  }

  if (topology_.num_aps() != aps_.size() || topology_.num_servers() != servers_.size()) {
    bad.push_back("delay matrix is " + std::to_string(topology_.num_aps()) + "x" +
                  std::to_string(topology_.num_servers()) + ", expected " +
                  std::to_string(aps_.size()) + "x" + std::to_string(servers_.size()));
  } else {
    for (std::size_t j = 0; j < aps_.size(); ++j) {
      for (std::size_t k = 0; k < servers_.size(); ++k) {
        const double d = topology_.delay(j, k);
        if (!std::isfinite(d) || d < 0)
          bad.push_back("delay[" + std::to_string(j) + "][" + std::to_string(k) +
                        "] must be finite and >= 0");
        const auto& colo = servers_[k].colocated_ap;
        if (colo && *colo == aps_[j].id && d != 0.0)
          bad.push_back("server " + std::to_string(to_int(servers_[k].id)) +
                        " is colocated with access point " + std::to_string(to_int(aps_[j].id)) +
                        " but their delay is nonzero");
      }
    }
  }

  reachable_indices_.resize(tasks_.size());
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    const auto& t = tasks_[i];
    const std::string who = "task " + std::to_string(to_int(t.id));
    if (!task_by_id_.emplace(to_int(t.id), i).second) bad.push_back("duplicate task id " + who);
    if (to_int(t.id) < 0) bad.push_back(who + ": id is negative");
    if (!positive_finite(t.data_size)) bad.push_back(who + ": data size must be > 0");
    if (!positive_finite(t.cycles)) bad.push_back(who + ": cycles must be > 0");
    if (!positive_finite(t.deadline)) bad.push_back(who + ": deadline must be > 0");
    if (!std::isfinite(t.profit) || t.profit < 0) bad.push_back(who + ": profit must be >= 0");
    if (t.reachable_aps.empty()) bad.push_back(who + ": reachable access point set is empty");
    std::unordered_set<std::int64_t> seen;
    for (ApId a : t.reachable_aps) {
      if (!seen.insert(to_int(a)).second) {
        bad.push_back(who + ": access point " + std::to_string(to_int(a)) + " listed twice");
        continue;
      }
      auto it = ap_by_id_.find(to_int(a));
      if (it == ap_by_id_.end())
        bad.push_back(who + ": reachable access point " + std::to_string(to_int(a)) +
                      " does not exist");
      else
        reachable_indices_[i].push_back(it->second);
    }
  }

  if (!bad.empty()) throw ParseError(std::move(bad));
}

std::optional<std::size_t> Instance::find_task(TaskId id) const {
  auto it = task_by_id_.find(to_int(id));
  if (it == task_by_id_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Instance::find_ap(ApId id) const {
  auto it = ap_by_id_.find(to_int(id));
  if (it == ap_by_id_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Instance::find_server(ServerId id) const {
  auto it = server_by_id_.find(to_int(id));
  if (it == server_by_id_.end()) return std::nullopt;
  return it->second;
}

std::size_t Instance::task_index(TaskId id) const {
  if (auto i = find_task(id)) return *i;
  throw ReferenceError("unknown task id " + std::to_string(to_int(id)));
}

std::size_t Instance::ap_index(ApId id) const {
  if (auto j = find_ap(id)) return *j;
  throw ReferenceError("unknown access point id " + std::to_string(to_int(id)));
}

std::size_t Instance::server_index(ServerId id) const {
  if (auto k = find_server(id)) return *k;
  throw ReferenceError("unknown server id " + std::to_string(to_int(id)));
}

double Instance::total_profit() const {
  double sum = 0;
  for (const auto& t : tasks_) sum += t.profit;
  return sum;
}

double Instance::min_compute_capacity() const {
  if (servers_.empty()) return 0.0;
  return std::min_element(servers_.begin(), servers_.end(),
                          [](const Server& a, const Server& b) {
                            return a.compute_capacity < b.compute_capacity;
                          })
      ->compute_capacity;
}

double completion_time(const Task& task, double delay, double bandwidth, double compute) {
  if (!(bandwidth > 0) || !(compute > 0))
    throw DomainError("completion_time: grants must be strictly positive");
  return task.data_size / bandwidth + 2.0 * delay + task.cycles / compute;
}

double completion_time(const Task& task, std::size_t ap, std::size_t server, double bandwidth,
                       double compute, const Topology& topology) {
  return completion_time(task, topology.delay(ap, server), bandwidth, compute);
}

double objective_value(const Instance& instance, const Solution& solution) {
  double sum = 0;
  for (const auto& a : solution.assignments)
    sum += instance.tasks()[instance.task_index(a.task)].profit;
  return sum;
}

Solution make_solution(const Instance& instance, std::vector<Assignment> assignments) {
  Solution s{std::move(assignments), 0.0};
  s.profit = objective_value(instance, s);
  return s;
}

std::string to_string(ServerKind kind) { return kind == ServerKind::edge ? "edge" : "cloud"; }

}  // namespace edgealloc
