#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "edgealloc/taskgen.hpp"
#include "test_util.hpp"

namespace edgealloc::taskgen {
namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int n = 0; n < 100; ++n) {
    const double x = a.uniform01();
    EXPECT_EQ(x, b.uniform01());
    differs = differs || x != c.uniform01();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, MatchesReferenceEngine) {
  // The 10000th output of a default-seeded mt19937_64 is fixed by the standard.
  std::mt19937_64 ref;
  ref.discard(9999);
  EXPECT_EQ(ref(), 9981545732273789042ull);
  Rng rng(5489);
  for (int n = 0; n < 9999; ++n) rng.uniform01();
  EXPECT_EQ(rng.uniform01(), double(9981545732273789042ull >> 11) * 0x1.0p-53);
}

TEST(Rng, UniformIntStaysInRange) {
  Rng rng(1);
  std::vector<int> hits(7, 0);
  for (int n = 0; n < 7000; ++n) {
    const auto v = rng.uniform_int(3, 9);
    ASSERT_GE(v, 3);
    ASSERT_LE(v, 9);
    ++hits[v - 3];
  }
  for (int h : hits) EXPECT_GT(h, 800);
  EXPECT_THROW(rng.uniform_int(2, 1), DomainError);
  for (int n = 0; n < 1000; ++n) {
    const double u = rng.uniform_open01();
    EXPECT_GT(u, 0);
    EXPECT_LE(u, 1);
  }
}

TEST(SampleArchitecture, TableRangesHold) {
  Rng rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    const auto arch = sample_architecture(ArchitectureConfig::full(), rng);
    ASSERT_EQ(arch.aps.size(), 20u);
    ASSERT_EQ(arch.servers.size(), 25u);
    for (const auto& ap : arch.aps) {
      EXPECT_GE(ap.bandwidth_capacity, 40);
      EXPECT_LE(ap.bandwidth_capacity, 100);
      EXPECT_EQ(ap.bandwidth_capacity, std::floor(ap.bandwidth_capacity));
    }
    for (std::size_t k = 0; k < arch.servers.size(); ++k) {
      const auto& s = arch.servers[k];
      if (k < 20) {
        EXPECT_EQ(s.kind, ServerKind::edge);
        EXPECT_EQ(s.colocated_ap, ApId{std::int64_t(k)});
        EXPECT_GE(s.compute_capacity, 40);
        EXPECT_LE(s.compute_capacity, 60);
      } else {
        EXPECT_EQ(s.kind, ServerKind::cloud);
        EXPECT_FALSE(s.colocated_ap);
        EXPECT_GE(s.compute_capacity, 80);
        EXPECT_LE(s.compute_capacity, 100);
      }
    }
    for (std::size_t j = 0; j < 20; ++j) {
      for (std::size_t k = 0; k < 25; ++k) {
        const double d = arch.topology.delay(j, k);
        if (k == j) {
          EXPECT_EQ(d, 0.0);
        } else {
          EXPECT_GE(d, 1);
          EXPECT_LE(d, 10);
          EXPECT_EQ(d, std::floor(d));
        }
      }
    }
  }
}

TEST(SampleArchitecture, SeedDeterminism) {
  Rng a(9), b(9);
  const auto x = sample_architecture(ArchitectureConfig::small(), a);
  const auto y = sample_architecture(ArchitectureConfig::small(), b);
  EXPECT_EQ(x.aps, y.aps);
  EXPECT_EQ(x.servers, y.servers);
  EXPECT_EQ(x.topology, y.topology);
}

TEST(SampleArchitecture, RejectsBadConfig) {
  Rng rng(1);
  ArchitectureConfig cfg = ArchitectureConfig::small();
  cfg.n_edge_servers = 5;
  EXPECT_THROW(sample_architecture(cfg, rng), DomainError);
  cfg = ArchitectureConfig::small();
  cfg.ap_bandwidth = {50, 40};
  EXPECT_THROW(sample_architecture(cfg, rng), DomainError);
}

TEST(Uunifast, SingleValueIsTotal) {
  Rng rng(1);
  EXPECT_EQ(uunifast(1, 0.7, rng), std::vector<double>{0.7});
}

TEST(Uunifast, SumsToTotal) {
  Rng rng(2);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto v = uunifast(10, 0.7, rng);
    ASSERT_EQ(v.size(), 10u);
    EXPECT_NEAR(sum(v), 0.7, 1e-9);
    for (double x : v) EXPECT_GT(x, 0);
  }
}

TEST(Uunifast, MeanPerValue) {
  Rng rng(3);
  std::vector<double> mean(6, 0.0);
  constexpr int kDraws = 10000;
  for (int rep = 0; rep < kDraws; ++rep) {
    const auto v = uunifast(6, 0.9, rng);
    for (std::size_t i = 0; i < 6; ++i) mean[i] += v[i] / kDraws;
  }
  for (double m : mean) EXPECT_NEAR(m, 0.15, 0.05 * 0.15);
}

TEST(Uunifast, RejectsBadArguments) {
  Rng rng(1);
  EXPECT_THROW(uunifast(0, 1, rng), DomainError);
  EXPECT_THROW(uunifast(3, 0, rng), DomainError);
}

TEST(Randfixedsum, FullCubeCorner) {
  Rng rng(1);
  EXPECT_EQ(randfixedsum(5, 5, 1, rng), std::vector<double>(5, 1.0));
}

TEST(Randfixedsum, TwoValuesSplitTheTotal) {
  Rng rng(4);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto v = randfixedsum(2, 1, 1, rng);
    EXPECT_GT(v[0], 0);
    EXPECT_LT(v[0], 1);
    EXPECT_NEAR(v[0] + v[1], 1, 1e-12);
  }
}

TEST(Randfixedsum, SumAndBound) {
  Rng rng(5);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto v = randfixedsum(25, 13, 1, rng);
    EXPECT_NEAR(sum(v), 13, 1e-9);
    for (double x : v) {
      EXPECT_GE(x, 0);
      EXPECT_LE(x, 1);
    }
  }
}

TEST(Randfixedsum, RejectsInfeasibleTotals) {
  Rng rng(1);
  EXPECT_THROW(randfixedsum(3, 3.5, 1, rng), DomainError);
  EXPECT_THROW(randfixedsum(3, 0, 1, rng), DomainError);
  EXPECT_THROW(randfixedsum(0, 1, 1, rng), DomainError);
}

// For n = 3 the slice {x in [0,1]^3 : sum = t} projects with constant Jacobian
// onto (x1, x2), so rejection sampling (x1, x2) uniform with t - x1 - x2 in
// [0, 1] is uniform on the slice. The marginals must agree.
TEST(Randfixedsum, MatchesRejectionSampler) {
  for (double total : {0.6, 1.5, 2.3}) {
    Rng rng(6), ref(7);
    std::vector<double> got, want, got_max, want_max;
    constexpr int kDraws = 20000;
    while (want.size() < kDraws) {
      const double a = ref.uniform01(), b = ref.uniform01();
      const double c = total - a - b;
      if (c < 0 || c > 1) continue;
      want.push_back(a);
      want_max.push_back(std::max({a, b, c}));
    }
    for (int n = 0; n < kDraws; ++n) {
      const auto v = randfixedsum(3, total, 1, rng);
      got.push_back(v[0]);
      got_max.push_back(*std::max_element(v.begin(), v.end()));
    }
    // Critical value at the 0.1% level is 1.95 * sqrt(2 / 20000).
    EXPECT_LT(ks_statistic(got, want), 0.0195) << "total " << total;
    EXPECT_LT(ks_statistic(got_max, want_max), 0.0195) << "total " << total;
  }
}

TEST(Randfixedsum, ScalesWithMaxPer) {
  Rng rng(8);
  const auto v = randfixedsum(10, 12, 2, rng);
  EXPECT_NEAR(sum(v), 12, 1e-9);
  for (double x : v) EXPECT_LE(x, 2);
}

Architecture small_arch() {
  Rng rng(1);
  return sample_architecture(ArchitectureConfig::small(), rng);
}

TEST(GenerateTaskset, ProfileMatchesTargets) {
  const auto arch = small_arch();
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    Rng rng(seed);
    TasksetGenConfig cfg;
    cfg.n_tasks = 10 + seed % 21;
    cfg.ub = 0.3 + 0.1 * double(seed % 7);
    cfg.uc = 1 + double(seed % 5);
    const auto gen = generate_taskset_with_profile(arch, cfg, rng);
    const auto& prof = gen.profile;
    const auto tasks = gen.instance.tasks();
    ASSERT_EQ(tasks.size(), cfg.n_tasks);

    EXPECT_NEAR(sum(prof.compute), cfg.uc, 1e-9);
    for (double uc : prof.compute) EXPECT_LE(uc, 1.0);
    for (const auto& per_ap : prof.bandwidth) {
      if (per_ap.empty()) continue;
      double total = 0;
      for (const auto& entry : per_ap) total += entry.second;
      EXPECT_NEAR(total, cfg.ub, 1e-9);
    }

    const double min_c = gen.instance.min_compute_capacity();
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const Task& t = tasks[i];
      EXPECT_GT(t.data_size, 0);
      EXPECT_GT(t.cycles, 0);
      EXPECT_GT(prof.window[i], 0);
      EXPECT_GE(t.deadline, 2 * prof.mean_delay + 15 - 1e-12);
      const bool low = std::abs(t.deadline - 2 * prof.mean_delay - std::round(t.deadline - 2 * prof.mean_delay)) < 1e-9;
      const bool high = std::abs(t.deadline - 2 * prof.max_delay - std::round(t.deadline - 2 * prof.max_delay)) < 1e-9;
      EXPECT_TRUE(low || high);
      EXPECT_NEAR(t.cycles, prof.compute[i] * min_c * prof.window[i], 1e-9 * t.cycles);
      EXPECT_GE(t.profit, 10);
      EXPECT_LE(t.profit, 100);
      EXPECT_GE(t.reachable_aps.size(), 1u);
      EXPECT_LE(t.reachable_aps.size(), 2u);

      // s_i is the largest ub_ji * b_j * tau_i over the task's APs.
      double s = 0;
      for (std::size_t j = 0; j < prof.bandwidth.size(); ++j)
        for (const auto& [task, ub] : prof.bandwidth[j])
          if (task == i) s = std::max(s, ub * arch.aps[j].bandwidth_capacity * prof.window[i]);
      EXPECT_DOUBLE_EQ(t.data_size, s);
    }
  }
}

TEST(GenerateTaskset, FullComputeUtilization) {
  const auto arch = small_arch();
  double total_c = 0, min_c = arch.servers.front().compute_capacity;
  for (const auto& s : arch.servers) {
    total_c += s.compute_capacity;
    min_c = std::min(min_c, s.compute_capacity);
  }
  Rng rng(3);
  TasksetGenConfig cfg;
  cfg.n_tasks = 40;
  cfg.uc = total_c / min_c;
  const auto gen = generate_taskset_with_profile(arch, cfg, rng);
  double demand = 0;
  for (std::size_t i = 0; i < cfg.n_tasks; ++i)
    demand += gen.instance.tasks()[i].cycles / gen.profile.window[i];
  EXPECT_NEAR(demand, total_c, 1e-9 * total_c);
}

TEST(GenerateTaskset, ByteIdenticalUnderSeed) {
  const auto arch = small_arch();
  TasksetGenConfig cfg;
  cfg.n_tasks = 25;
  Rng a(77), b(77), c(78);
  const std::string x = save_instance(generate_taskset(arch, cfg, a));
  EXPECT_EQ(x, save_instance(generate_taskset(arch, cfg, b)));
  EXPECT_NE(x, save_instance(generate_taskset(arch, cfg, c)));
}

TEST(GenerateTaskset, RejectsBadConfig) {
  const auto arch = small_arch();
  Rng rng(1);
  TasksetGenConfig cfg;
  cfg.ub = 1.5;
  EXPECT_THROW(generate_taskset(arch, cfg, rng), DomainError);
  cfg = {};
  cfg.n_tasks = 0;
  EXPECT_THROW(generate_taskset(arch, cfg, rng), DomainError);
  cfg = {};
  cfg.uc = 0;
  EXPECT_THROW(generate_taskset(arch, cfg, rng), DomainError);
}

}  // namespace
}  // namespace edgealloc::taskgen
