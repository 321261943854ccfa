#pragma once

// Synthetic edge-cloud architectures and tasksets.
//
// Per-AP bandwidth utilizations come from Uunifast over the tasks each AP
// covers; per-task compute utilizations come from Stafford's Randfixedsum
// over the whole taskset, capped at 1 per task. Utilizations are relative to
// the window tau_i = deadline_i - 2 * mean_delay:
//
//   s_i = max_{j in A_i} ub_ji * b_j * tau_i
//   q_i = uc_i * min_k c_k * tau_i

#include <cstdint>
#include <random>
#include <vector>

#include "edgealloc/model.hpp"

namespace edgealloc::taskgen {

/// 64-bit Mersenne Twister (std::mt19937_64, fully specified by the
/// standard) with hand-written conversions, so a seed produces the same
/// stream on every platform. Standard distributions are implementation
/// defined and are not used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  explicit Rng(std::seed_seq& seq) : engine_(seq) {}

  /// Uniform on [0, 1) with 53 bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform_open01() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }
  /// Uniform integer on [lo, hi] by rejection.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

struct ArchitectureConfig {
  std::size_t n_aps = 20;
  std::size_t n_edge_servers = 20;  // edge server e is colocated with AP e
  std::size_t n_cloud_servers = 5;
  IntRange cloud_compute{80, 100};
  IntRange edge_compute{40, 60};
  IntRange ap_bandwidth{40, 100};
  IntRange delay{0, 10};

  /// 20 APs, 20 colocated edge servers, 5 cloud servers.
  static ArchitectureConfig full() { return {}; }
  /// 4 APs, 4 colocated edge servers, 1 cloud server; same parameter ranges.
  static ArchitectureConfig small() {
    ArchitectureConfig c;
    c.n_aps = 4;
    c.n_edge_servers = 4;
    c.n_cloud_servers = 1;
    return c;
  }
};

struct Architecture {
  std::vector<AccessPoint> aps;
  std::vector<Server> servers;
  Topology topology;
};

/// Integer capacities and delays uniform in range; delay 0 exactly for each
/// edge server and its colocated AP, other pairs drawn from
/// [max(1, delay.lo), delay.hi].
Architecture sample_architecture(const ArchitectureConfig& cfg, Rng& rng);

/// n positive values summing to total, uniform over the simplex.
std::vector<double> uunifast(std::size_t n, double total, Rng& rng);

/// n values in [0, max_per] summing to total, uniform over that slice of the
/// cube (Stafford's algorithm). Throws DomainError unless
/// 0 < total <= n * max_per.
std::vector<double> randfixedsum(std::size_t n, double total, double max_per, Rng& rng);

struct TasksetGenConfig {
  std::size_t n_tasks = 40;
  double ub = 0.5;  // total bandwidth utilization per AP, in (0, 1]
  double uc = 1.0;  // total compute utilization, normalized by min_k c_k
  IntRange reachable_aps{1, 2};
  IntRange profit{10, 100};
  IntRange deadline_offset{15, 45};
};

struct UtilizationProfile {
  /// Per AP: (task index, ub_ji) for each task the AP covers.
  std::vector<std::vector<std::pair<std::size_t, double>>> bandwidth;
  std::vector<double> compute;  // uc_i
  std::vector<double> window;   // tau_i
  double mean_delay = 0;
  double max_delay = 0;
};

struct GeneratedTaskset {
  Instance instance;
  UtilizationProfile profile;
};

GeneratedTaskset generate_taskset_with_profile(const Architecture& arch,
                                               const TasksetGenConfig& cfg, Rng& rng);

Instance generate_taskset(const Architecture& arch, const TasksetGenConfig& cfg, Rng& rng);

}  // namespace edgealloc::taskgen
