#include "edgealloc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "json.hpp"

namespace edgealloc {

std::string to_string(ConstraintTag tag) {
  switch (tag) {
    case ConstraintTag::deadline: return "deadline";
    case ConstraintTag::ap_uniqueness: return "ap_uniqueness";
    case ConstraintTag::ap_reachability: return "ap_reachability";
    case ConstraintTag::server_uniqueness: return "server_uniqueness";
    case ConstraintTag::ap_capacity: return "ap_capacity";
    case ConstraintTag::server_capacity: return "server_capacity";
  }
  return "unknown";
}

bool VerificationReport::has(ConstraintTag tag) const {
  return std::any_of(violations.begin(), violations.end(),
                     [tag](const Violation& v) { return v.constraint == tag; });
}

VerificationReport verify(const Instance& instance, const Solution& solution, double tol) {
  // Resolve all ids first so a dangling reference never yields a partial report.
  struct Resolved {
    std::size_t task, ap, server;
  };
  std::vector<Resolved> resolved;
  resolved.reserve(solution.assignments.size());
  for (const auto& a : solution.assignments)
    resolved.push_back(
        {instance.task_index(a.task), instance.ap_index(a.ap), instance.server_index(a.server)});

  VerificationReport report;
  const auto tasks = instance.tasks();
  std::vector<double> ap_load(instance.aps().size(), 0.0);
  std::vector<double> server_load(instance.servers().size(), 0.0);
  std::map<std::size_t, std::vector<std::size_t>> by_task;

  for (std::size_t n = 0; n < resolved.size(); ++n) {
    const auto& a = solution.assignments[n];
    const auto [i, j, k] = resolved[n];
    const Task& task = tasks[i];
    by_task[i].push_back(n);

    const auto reach = instance.reachable_ap_indices(i);
    if (std::find(reach.begin(), reach.end(), j) == reach.end())
      report.violations.push_back({ConstraintTag::ap_reachability, {to_int(a.task), to_int(a.ap)}, 1.0});

    double t = std::numeric_limits<double>::infinity();
    if (a.bandwidth > 0 && a.compute > 0)
      t = completion_time(task, j, k, a.bandwidth, a.compute, instance.topology());
    report.slack.push_back({a.task, task.deadline - t});
    if (!(t <= task.deadline * (1.0 + tol)))
      report.violations.push_back({ConstraintTag::deadline, {to_int(a.task)}, t - task.deadline});

    ap_load[j] += std::max(a.bandwidth, 0.0);
    server_load[k] += std::max(a.compute, 0.0);
  }

  for (const auto& [i, rows] : by_task) {
    if (rows.size() < 2) continue;
    std::set<std::size_t> aps, servers;
    for (std::size_t n : rows) {
      aps.insert(resolved[n].ap);
      servers.insert(resolved[n].server);
    }
    const std::int64_t id = to_int(tasks[i].id);
    // x and y are binary, so a repeated identical (AP, server) pair is a
    // multiplicity violation on both sides.
    const bool exact_duplicate = aps.size() == 1 && servers.size() == 1;
    if (aps.size() > 1 || exact_duplicate) {
      const double extra = exact_duplicate ? double(rows.size() - 1) : double(aps.size() - 1);
      report.violations.push_back({ConstraintTag::ap_uniqueness, {id}, extra});
    }
    if (servers.size() > 1 || exact_duplicate) {
      const double extra =
          exact_duplicate ? double(rows.size() - 1) : double(servers.size() - 1);
      report.violations.push_back({ConstraintTag::server_uniqueness, {id}, extra});
    }
  }

  for (std::size_t j = 0; j < ap_load.size(); ++j) {
    const double cap = instance.aps()[j].bandwidth_capacity;
    if (ap_load[j] > cap * (1.0 + tol))
      report.violations.push_back(
          {ConstraintTag::ap_capacity, {to_int(instance.aps()[j].id)}, ap_load[j] - cap});
  }
  for (std::size_t k = 0; k < server_load.size(); ++k) {
    const double cap = instance.servers()[k].compute_capacity;
    if (server_load[k] > cap * (1.0 + tol))
      report.violations.push_back(
          {ConstraintTag::server_capacity, {to_int(instance.servers()[k].id)}, server_load[k] - cap});
  }

  report.feasible = report.violations.empty();
  return report;
}

std::string report_to_json(const VerificationReport& report) {
  nlohmann::ordered_json doc;
  doc["schema"] = 1;
  doc["feasible"] = report.feasible;
  auto violations = nlohmann::ordered_json::array();
  for (const auto& v : report.violations)
    violations.push_back({{"constraint", to_string(v.constraint)}, {"ids", v.ids}, {"magnitude", v.magnitude}});
  doc["violations"] = std::move(violations);
  auto slack = nlohmann::ordered_json::array();
  for (const auto& s : report.slack) {
    nlohmann::ordered_json entry = {{"task", to_int(s.task)}};
    if (std::isfinite(s.slack))
      entry["slack"] = s.slack;
    else
      entry["slack"] = nullptr;
    slack.push_back(std::move(entry));
  }
  doc["slack"] = std::move(slack);
  return doc.dump(2) + "\n";
}

}  // namespace edgealloc
