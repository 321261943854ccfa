#pragma once

#include <string>
#include <vector>

#include "edgealloc/model.hpp"

namespace edgealloc {

enum class ConstraintTag {
  deadline,
  ap_uniqueness,
  ap_reachability,
  server_uniqueness,
  ap_capacity,
  server_capacity,
};

std::string to_string(ConstraintTag tag);

struct Violation {
  ConstraintTag constraint;
  std::vector<std::int64_t> ids;  // task id, or AP / server id for capacity rows
  double magnitude = 0;           // amount by which the constraint is exceeded
};

struct TaskSlack {
  TaskId task;
  double slack;  // deadline - completion time
};

struct VerificationReport {
  bool feasible = true;
  std::vector<Violation> violations;
  std::vector<TaskSlack> slack;

  bool has(ConstraintTag tag) const;
};

/// Checks a solution against every constraint of the problem:
///   - completion time within deadline * (1 + tol) for each assigned task,
///   - per-AP bandwidth sum within capacity * (1 + tol),
///   - per-server compute sum within capacity * (1 + tol),
///   - at most one AP and one server per task, AP reachable (exact).
/// Throws ReferenceError when the solution names unknown ids; that is a
/// malformed input, not an infeasible one.
VerificationReport verify(const Instance& instance, const Solution& solution,
                          double tol = kDefaultTolerance);

std::string report_to_json(const VerificationReport& report);

}  // namespace edgealloc
