#include "edgealloc/taskgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace edgealloc::taskgen {

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw DomainError("uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());  // full 64-bit range
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

namespace {

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i - 1)));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

Architecture sample_architecture(const ArchitectureConfig& cfg, Rng& rng) {
  if (cfg.n_edge_servers > cfg.n_aps)
    throw DomainError("more edge servers than access points to colocate with");
  for (const IntRange& r : {cfg.cloud_compute, cfg.edge_compute, cfg.ap_bandwidth, cfg.delay})
    if (r.hi < r.lo) throw DomainError("empty architecture parameter range");
  if (cfg.cloud_compute.lo <= 0 || cfg.edge_compute.lo <= 0 || cfg.ap_bandwidth.lo <= 0 ||
      cfg.delay.lo < 0)
    throw DomainError("capacities must be positive and delays non-negative");

  Architecture arch;
  for (std::size_t j = 0; j < cfg.n_aps; ++j)
    arch.aps.push_back({ApId{static_cast<std::int64_t>(j)},
                        double(rng.uniform_int(cfg.ap_bandwidth.lo, cfg.ap_bandwidth.hi))});
  for (std::size_t e = 0; e < cfg.n_edge_servers; ++e)
    arch.servers.push_back({ServerId{static_cast<std::int64_t>(e)},
                            double(rng.uniform_int(cfg.edge_compute.lo, cfg.edge_compute.hi)),
                            ServerKind::edge, ApId{static_cast<std::int64_t>(e)}});
  for (std::size_t c = 0; c < cfg.n_cloud_servers; ++c)
    arch.servers.push_back({ServerId{static_cast<std::int64_t>(cfg.n_edge_servers + c)},
                            double(rng.uniform_int(cfg.cloud_compute.lo, cfg.cloud_compute.hi)),
                            ServerKind::cloud, std::nullopt});

  const std::int64_t remote_lo = std::max<std::int64_t>(1, cfg.delay.lo);
  if (remote_lo > cfg.delay.hi && arch.servers.size() > 1)
    throw DomainError("delay range leaves no positive delay for remote pairs");
  std::vector<double> delays;
  delays.reserve(cfg.n_aps * arch.servers.size());
  for (std::size_t j = 0; j < cfg.n_aps; ++j) {
    for (std::size_t k = 0; k < arch.servers.size(); ++k) {
      const bool colocated = k < cfg.n_edge_servers && k == j;
      delays.push_back(colocated ? 0.0 : double(rng.uniform_int(remote_lo, cfg.delay.hi)));
    }
  }
  arch.topology = Topology(cfg.n_aps, arch.servers.size(), std::move(delays));
  return arch;
}

std::vector<double> uunifast(std::size_t n, double total, Rng& rng) {
  if (n == 0) throw DomainError("uunifast: n must be >= 1");
  if (!(total > 0)) throw DomainError("uunifast: total must be > 0");
  std::vector<double> out;
  out.reserve(n);
  double remaining = total;
  for (std::size_t i = 1; i < n; ++i) {
    const double next = remaining * std::pow(rng.uniform_open01(), 1.0 / double(n - i));
    out.push_back(remaining - next);
    remaining = next;
  }
  out.push_back(remaining);
  return out;
}

// Stafford's Randfixedsum for a single vector with bounds [0, max_per]. The
// cube slice is cut into simplices; w holds scaled simplex volumes and t the
// transition probabilities used to pick one simplex at random, then a point
// uniform inside it.
std::vector<double> randfixedsum(std::size_t n, double total, double max_per, Rng& rng) {
  if (n == 0) throw DomainError("randfixedsum: n must be >= 1");
  if (!(max_per > 0)) throw DomainError("randfixedsum: max_per must be > 0");
  if (!(total > 0) || total > double(n) * max_per)
    throw DomainError("randfixedsum: need 0 < total <= n * max_per");
  if (total == double(n) * max_per) return std::vector<double>(n, max_per);

  const int N = static_cast<int>(n);
  double s = total / max_per;
  const int k = std::max(std::min(static_cast<int>(std::floor(s)), N - 1), 0);
  s = std::max(std::min(s, double(k + 1)), double(k));

  std::vector<double> s1(n), s2(n);
  for (int c = 0; c < N; ++c) {
    s1[c] = s - double(k - c);
    s2[c] = double(k + N - c) - s;
  }

  constexpr double huge = std::numeric_limits<double>::max();
  constexpr double tiny = std::numeric_limits<double>::denorm_min();
  std::vector<std::vector<double>> w(n, std::vector<double>(n + 1, 0.0));
  std::vector<std::vector<double>> t(n > 1 ? n - 1 : 0, std::vector<double>(n, 0.0));
  w[0][1] = huge;
  for (int i = 2; i <= N; ++i) {
    const int r = i - 1;
    for (int e = 0; e < i; ++e) {
      const double a = w[r - 1][e + 1] * s1[e] / i;
      const double b = w[r - 1][e] * s2[N - i + e] / i;
      w[r][e + 1] = a + b;
      const double denom = w[r][e + 1] + tiny;
      t[r - 1][e] = s2[N - i + e] > s1[e] ? b / denom : 1.0 - a / denom;
    }
  }

  std::vector<double> x(n, 0.0);
  int col = k;
  double sum = 0, prod = 1;
  for (int i = N - 1; i >= 1; --i) {
    const double rt = rng.uniform01();
    const double rs = rng.uniform01();
    const int e = rt <= t[i - 1][std::clamp(col, 0, N - 1)] ? 1 : 0;
    const double sx = std::pow(rs, 1.0 / i);
    sum += (1.0 - sx) * prod * s / (i + 1);
    prod *= sx;
    x[N - i - 1] = sum + prod * e;
    s -= e;
    col -= e;
  }
  x[N - 1] = sum + prod * s;

  shuffle(x, rng);
  for (double& v : x) v = std::clamp(v * max_per, 0.0, max_per);
  return x;
}

GeneratedTaskset generate_taskset_with_profile(const Architecture& arch,
                                               const TasksetGenConfig& cfg, Rng& rng) {
  const std::size_t n = cfg.n_tasks;
  const std::size_t n_aps = arch.aps.size();
  if (n == 0) throw DomainError("taskset must have at least one task");
  if (n_aps == 0 || arch.servers.empty()) throw DomainError("architecture is empty");
  if (!(cfg.ub > 0) || cfg.ub > 1) throw DomainError("ub must lie in (0, 1]");
  if (!(cfg.uc > 0) || cfg.uc > double(n)) throw DomainError("uc must lie in (0, n_tasks]");
  if (cfg.reachable_aps.lo < 1 || cfg.reachable_aps.hi < cfg.reachable_aps.lo)
    throw DomainError("reachable AP count range must be within [1, n_aps]");
  if (cfg.deadline_offset.lo <= 0) throw DomainError("deadline offsets must be positive");

  UtilizationProfile prof;
  prof.mean_delay = arch.topology.mean_delay();
  prof.max_delay = arch.topology.max_delay();

  std::vector<Task> tasks(n);
  std::vector<std::vector<std::size_t>> reach(n);
  for (std::size_t i = 0; i < n; ++i) {
    Task& t = tasks[i];
    t.id = TaskId{static_cast<std::int64_t>(i)};
    t.profit = double(rng.uniform_int(cfg.profit.lo, cfg.profit.hi));
    const auto count = static_cast<std::size_t>(rng.uniform_int(
        cfg.reachable_aps.lo, std::min<std::int64_t>(cfg.reachable_aps.hi, std::int64_t(n_aps))));
    std::vector<std::size_t> pool(n_aps);
    for (std::size_t j = 0; j < n_aps; ++j) pool[j] = j;
    for (std::size_t c = 0; c < count; ++c) {
      const auto pick = static_cast<std::size_t>(
          rng.uniform_int(static_cast<std::int64_t>(c), static_cast<std::int64_t>(n_aps - 1)));
      std::swap(pool[c], pool[pick]);
    }
    reach[i].assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count));
    std::sort(reach[i].begin(), reach[i].end());
    for (std::size_t j : reach[i]) t.reachable_aps.push_back(arch.aps[j].id);

    const double base = rng.coin() ? prof.max_delay : prof.mean_delay;
    t.deadline =
        2.0 * base + double(rng.uniform_int(cfg.deadline_offset.lo, cfg.deadline_offset.hi));
    prof.window.push_back(t.deadline - 2.0 * prof.mean_delay);
  }

  prof.bandwidth.resize(n_aps);
  std::vector<double> data_size(n, 0.0);
  for (std::size_t j = 0; j < n_aps; ++j) {
    std::vector<std::size_t> covered;
    for (std::size_t i = 0; i < n; ++i)
      if (std::find(reach[i].begin(), reach[i].end(), j) != reach[i].end()) covered.push_back(i);
    if (covered.empty()) continue;  // an AP covering no task gets no utilization
    const auto ub = uunifast(covered.size(), cfg.ub, rng);
    for (std::size_t c = 0; c < covered.size(); ++c) {
      const std::size_t i = covered[c];
      prof.bandwidth[j].emplace_back(i, ub[c]);
      data_size[i] =
          std::max(data_size[i], ub[c] * arch.aps[j].bandwidth_capacity * prof.window[i]);
    }
  }

  double min_compute = arch.servers.front().compute_capacity;
  for (const auto& s : arch.servers) min_compute = std::min(min_compute, s.compute_capacity);
  prof.compute = randfixedsum(n, cfg.uc, 1.0, rng);
  for (std::size_t i = 0; i < n; ++i) {
    tasks[i].data_size = data_size[i];
    tasks[i].cycles = prof.compute[i] * min_compute * prof.window[i];
  }

  Instance inst(std::move(tasks), arch.aps, arch.servers, arch.topology);
  return {std::move(inst), std::move(prof)};
}

Instance generate_taskset(const Architecture& arch, const TasksetGenConfig& cfg, Rng& rng) {
  return generate_taskset_with_profile(arch, cfg, rng).instance;
}

}  // namespace edgealloc::taskgen
