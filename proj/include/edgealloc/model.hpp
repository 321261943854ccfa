#pragma once

// Problem data model for deadline-constrained task mapping and bandwidth /
// compute allocation in a multi-layer edge-cloud system.
//
// A task is offloaded over the wireless link of one access point (AP),
// forwarded over the backhaul to one server, processed there, and its result
// returned over the same backhaul hop. With bandwidth grant b and compute
// grant c the end-to-end completion time is
//
//     T = s / b + 2 * delay(ap, server) + q / c
//
// All quantities are dimensionless non-negative reals.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace edgealloc {

enum class TaskId : std::int64_t {};
enum class ApId : std::int64_t {};
enum class ServerId : std::int64_t {};

constexpr std::int64_t to_int(TaskId id) { return static_cast<std::int64_t>(id); }
constexpr std::int64_t to_int(ApId id) { return static_cast<std::int64_t>(id); }
constexpr std::int64_t to_int(ServerId id) { return static_cast<std::int64_t>(id); }

/// Default relative tolerance for feasibility comparisons.
inline constexpr double kDefaultTolerance = 1e-9;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A solution or query names a task / AP / server the instance does not have.
class ReferenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by instance construction and document loading; carries every
/// violation found, not just the first.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct Task {
  TaskId id{};
  double data_size = 0;  // s
  double cycles = 0;     // q
  double deadline = 0;   // end-to-end, result download already deducted
  double profit = 0;
  std::vector<ApId> reachable_aps;

  bool operator==(const Task&) const = default;
};

struct AccessPoint {
  ApId id{};
  double bandwidth_capacity = 0;

  bool operator==(const AccessPoint&) const = default;
};

enum class ServerKind { edge, cloud };

struct Server {
  ServerId id{};
  double compute_capacity = 0;
  ServerKind kind = ServerKind::edge;
  std::optional<ApId> colocated_ap;

  bool operator==(const Server&) const = default;
};

/// Dense AP x server backhaul delay matrix, row-major in declaration order.
class Topology {
 public:
  Topology() = default;
  Topology(std::size_t n_aps, std::size_t n_servers, std::vector<double> delays);

  double delay(std::size_t ap, std::size_t server) const {
    return delays_[ap * n_servers_ + server];
  }
  std::size_t num_aps() const { return n_aps_; }
  std::size_t num_servers() const { return n_servers_; }
  std::span<const double> row_major() const { return delays_; }

  double mean_delay() const;
  double max_delay() const;

  bool operator==(const Topology&) const = default;

 private:
  std::size_t n_aps_ = 0;
  std::size_t n_servers_ = 0;
  std::vector<double> delays_;
};

/// Immutable problem input. Construction validates every invariant and
/// throws ParseError listing all violations.
class Instance {
 public:
  Instance(std::vector<Task> tasks, std::vector<AccessPoint> aps,
           std::vector<Server> servers, Topology topology);

  std::span<const Task> tasks() const { return tasks_; }
  std::span<const AccessPoint> aps() const { return aps_; }
  std::span<const Server> servers() const { return servers_; }
  const Topology& topology() const { return topology_; }

  std::size_t task_index(TaskId id) const;
  std::size_t ap_index(ApId id) const;
  std::size_t server_index(ServerId id) const;
  std::optional<std::size_t> find_task(TaskId id) const;
  std::optional<std::size_t> find_ap(ApId id) const;
  std::optional<std::size_t> find_server(ServerId id) const;

  /// Indices into aps() of task i's reachable access points, in declaration
  /// order of the task's list.
  std::span<const std::size_t> reachable_ap_indices(std::size_t task) const {
    return reachable_indices_[task];
  }

  double total_profit() const;
  double min_compute_capacity() const;

  bool operator==(const Instance& other) const {
    return tasks_ == other.tasks_ && aps_ == other.aps_ && servers_ == other.servers_ &&
           topology_ == other.topology_;
  }

 private:
  std::vector<Task> tasks_;
  std::vector<AccessPoint> aps_;
  std::vector<Server> servers_;
  Topology topology_;
  std::unordered_map<std::int64_t, std::size_t> task_by_id_;
  std::unordered_map<std::int64_t, std::size_t> ap_by_id_;
  std::unordered_map<std::int64_t, std::size_t> server_by_id_;
  std::vector<std::vector<std::size_t>> reachable_indices_;
};

struct Assignment {
  TaskId task{};
  ApId ap{};
  ServerId server{};
  double bandwidth = 0;  // b_ij granted by the AP
  double compute = 0;    // c_ik granted by the server

  bool operator==(const Assignment&) const = default;
};

struct Solution {
  std::vector<Assignment> assignments;
  double profit = 0;

  bool operator==(const Solution&) const = default;
};

/// s / bandwidth + 2 * delay + q / compute. Throws DomainError on a
/// non-positive grant.
double completion_time(const Task& task, double delay, double bandwidth, double compute);

double completion_time(const Task& task, std::size_t ap, std::size_t server,
                       double bandwidth, double compute, const Topology& topology);

/// Sum of profits of the assigned tasks. Unknown task ids raise ReferenceError.
double objective_value(const Instance& instance, const Solution& solution);

/// Builds a Solution whose profit field is the objective value of the
/// assignments.
Solution make_solution(const Instance& instance, std::vector<Assignment> assignments);

// Instance and solution documents (JSON, "schema": 1).
Instance load_instance(const std::string& text);
std::string save_instance(const Instance& instance);
Instance load_instance_file(const std::string& path);
void save_instance_file(const Instance& instance, const std::string& path);

Solution load_solution(const std::string& text);
std::string save_solution(const Solution& solution);

std::string to_string(ServerKind kind);

}  // namespace edgealloc
