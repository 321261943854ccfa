#include <gtest/gtest.h>

#include <cmath>

#include "edgealloc/verify.hpp"
#include "edgealloc/zsg.hpp"
#include "test_util.hpp"

namespace edgealloc {
namespace {

using testing::make_task;
using testing::single_pair;

const AccessPoint kAp40{ApId{0}, 40};
const Server kServer40{ServerId{0}, 40, ServerKind::edge, ApId{0}};

TEST(GammaSplit, ClosedForm) {
  EXPECT_DOUBLE_EQ(zsg::gamma_split(make_task(0, 10, 20, 20, 1), kAp40, kServer40), 1.0 / 3);
  EXPECT_DOUBLE_EQ(zsg::gamma_split(make_task(0, 1, 1, 20, 1), {ApId{0}, 1},
                                    {ServerId{0}, 3, ServerKind::edge, std::nullopt}),
                   0.75);
  // Equal offload and processing pressure.
  EXPECT_DOUBLE_EQ(zsg::gamma_split(make_task(0, 8, 4, 20, 1), {ApId{0}, 50},
                                    {ServerId{0}, 25, ServerKind::edge, std::nullopt}),
                   0.5);
}

TEST(GammaSplit, IndependentOfDeadline) {
  const double a = zsg::gamma_split(make_task(0, 3, 7, 11, 1), kAp40, kServer40);
  const double b = zsg::gamma_split(make_task(0, 3, 7, 97, 1), kAp40, kServer40);
  EXPECT_EQ(a, b);
}

TEST(RequiredGrants, Examples) {
  EXPECT_DOUBLE_EQ(*zsg::required_bandwidth(make_task(0, 10, 10, 20, 1), 0.5, 5), 2.0);
  EXPECT_DOUBLE_EQ(*zsg::required_bandwidth(make_task(0, 10, 20, 20, 1), 1.0 / 3, 0), 1.5);
  EXPECT_DOUBLE_EQ(*zsg::required_compute(make_task(0, 10, 20, 20, 1), 1.0 / 3, 0), 1.5);
  EXPECT_DOUBLE_EQ(*zsg::required_compute(make_task(0, 10, 10, 20, 1), 0.5, 5), 2.0);
}

TEST(RequiredGrants, NoWindowLeft) {
  const Task t = make_task(0, 10, 10, 20, 1);
  EXPECT_FALSE(zsg::required_bandwidth(t, 0.5, 10));
  EXPECT_FALSE(zsg::required_compute(t, 0.5, 10));
  EXPECT_FALSE(zsg::required_bandwidth(t, 0.5, 11));
}

TEST(RequiredGrants, ZeroSlackIdentity) {
  taskgen::Rng rng(7);
  for (int n = 0; n < 500; ++n) {
    const Task t = make_task(0, 0.1 + 50 * rng.uniform01(), 0.1 + 50 * rng.uniform01(),
                             1 + 60 * rng.uniform01(), 1);
    const AccessPoint ap{ApId{0}, 1 + 99 * rng.uniform01()};
    const Server sv{ServerId{0}, 1 + 99 * rng.uniform01(), ServerKind::cloud, std::nullopt};
    const double delay = t.deadline * 0.49 * rng.uniform01();
    const double g = zsg::gamma_split(t, ap, sv);
    ASSERT_GT(g, 0);
    ASSERT_LT(g, 1);
    const double b = *zsg::required_bandwidth(t, g, delay);
    const double c = *zsg::required_compute(t, g, delay);
    EXPECT_NEAR(completion_time(t, delay, b, c) / t.deadline, 1.0, 1e-12);
  }
}

TEST(Priority, ScalesWithProfitAndUsage) {
  const Task t = make_task(0, 10, 20, 20, 10);
  const double p = zsg::priority(t, kAp40, kServer40, 1.5, 1.5);
  EXPECT_NEAR(p, 10 / (0.0375 * 0.0375), 1e-9);
  EXPECT_NEAR(p, 7111.11, 0.01);
  EXPECT_DOUBLE_EQ(zsg::priority(make_task(0, 10, 20, 20, 20), kAp40, kServer40, 1.5, 1.5), 2 * p);
  EXPECT_DOUBLE_EQ(zsg::priority(t, kAp40, kServer40, 0.75, 1.5), 2 * p);
}

TEST(Solve, SingleTaskGetsZeroSlackGrants) {
  const Instance inst = single_pair({make_task(0, 10, 20, 20, 10)}, 40, 40);
  const Solution s = zsg::solve(inst);
  ASSERT_EQ(s.assignments.size(), 1u);
  EXPECT_DOUBLE_EQ(s.assignments[0].bandwidth, 1.5);
  EXPECT_DOUBLE_EQ(s.assignments[0].compute, 1.5);
  EXPECT_EQ(s.profit, 10);
}

TEST(Solve, CapacityAdmitsOneOfTwo) {
  // With b_j = c_k = 2 the split is still 1/3 and each task needs 1.5 of
  // both, so only one fits.
  const Instance inst =
      single_pair({make_task(0, 10, 20, 20, 10), make_task(1, 10, 20, 20, 10)}, 2, 2);
  const Solution s = zsg::solve(inst);
  EXPECT_EQ(s.assignments.size(), 1u);
  EXPECT_EQ(s.profit, 10);
  EXPECT_EQ(s.assignments[0].task, TaskId{0});  // tie broken by task id
  EXPECT_DOUBLE_EQ(s.assignments[0].bandwidth, 1.5);
  EXPECT_TRUE(verify(inst, s).feasible);
}

TEST(Solve, ExactFitCommits) {
  // Two tasks each needing exactly half the AP.
  const Instance inst =
      single_pair({make_task(0, 10, 10, 20, 5), make_task(1, 10, 10, 20, 5)}, 2, 2);
  const Solution s = zsg::solve(inst);
  EXPECT_EQ(s.assignments.size(), 2u);
  EXPECT_TRUE(verify(inst, s).feasible);
}

TEST(Solve, DeadlineInsideBackhaulNeverAssigned) {
  std::vector<AccessPoint> aps{{ApId{0}, 100}};
  std::vector<Server> servers{{ServerId{0}, 100, ServerKind::cloud, std::nullopt}};
  const Instance inst({make_task(0, 1, 1, 10, 50)}, aps, servers, Topology(1, 1, {5}));
  EXPECT_TRUE(zsg::build_candidates(inst).empty());
  EXPECT_TRUE(zsg::solve(inst).assignments.empty());
}

TEST(BuildCandidates, SortedWithDeterministicTies) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance inst = testing::small_instance(seed);
    const auto cands = zsg::build_candidates(inst);
    for (std::size_t n = 0; n + 1 < cands.size(); ++n) {
      ASSERT_GE(cands[n].priority, cands[n + 1].priority);
      if (cands[n].priority == cands[n + 1].priority)
        EXPECT_LE(to_int(inst.tasks()[cands[n].task].id), to_int(inst.tasks()[cands[n + 1].task].id));
    }
    for (const auto& c : cands) {
      EXPECT_GT(c.gamma, 0);
      EXPECT_LT(c.gamma, 1);
      EXPECT_TRUE(std::isfinite(c.bandwidth) && c.bandwidth > 0);
      EXPECT_TRUE(std::isfinite(c.compute) && c.compute > 0);
    }
  }
}

TEST(Solve, FeasibleDeterministicAndZeroSlack) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Instance inst = testing::generated_instance(seed, 30, 0.9, 5);
    const Solution s = zsg::solve(inst);
    EXPECT_EQ(zsg::solve(inst), s);
    const auto report = verify(inst, s);
    ASSERT_TRUE(report.feasible) << report_to_json(report);
    for (const auto& a : s.assignments) {
      const Task& t = inst.tasks()[inst.task_index(a.task)];
      const double T = completion_time(t, inst.ap_index(a.ap), inst.server_index(a.server),
                                       a.bandwidth, a.compute, inst.topology());
      EXPECT_LE(std::abs(T - t.deadline) / t.deadline, 1e-9);
    }
  }
}

TEST(Solve, ProfitScalingKeepsAssignment) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance inst = testing::generated_instance(seed, 20, 0.9, 3);
    std::vector<Task> scaled(inst.tasks().begin(), inst.tasks().end());
    for (auto& t : scaled) t.profit *= 3.5;
    const Instance big(scaled, {inst.aps().begin(), inst.aps().end()},
                       {inst.servers().begin(), inst.servers().end()}, inst.topology());
    EXPECT_EQ(zsg::solve(big).assignments, zsg::solve(inst).assignments) << "seed " << seed;
  }
}

// Best subset of zero-slack candidates under the continuous capacities, by
// enumeration. ZSG picks one such subset greedily, so it can never beat it.
double best_zero_slack_selection(const Instance& inst) {
  const auto cands = zsg::build_candidates(inst);
  std::vector<std::vector<zsg::OptionCandidate>> per_task(inst.tasks().size());
  for (const auto& c : cands) per_task[c.task].push_back(c);
  std::vector<double> bw(inst.aps().size()), cp(inst.servers().size());
  for (std::size_t j = 0; j < bw.size(); ++j) bw[j] = inst.aps()[j].bandwidth_capacity * (1 + 1e-9);
  for (std::size_t k = 0; k < cp.size(); ++k) cp[k] = inst.servers()[k].compute_capacity * (1 + 1e-9);
  double best = 0;
  auto visit = [&](auto&& self, std::size_t i, double profit) -> void {
    if (i == per_task.size()) {
      best = std::max(best, profit);
      return;
    }
    self(self, i + 1, profit);
    for (const auto& c : per_task[i]) {
      if (c.bandwidth > bw[c.ap] || c.compute > cp[c.server]) continue;
      bw[c.ap] -= c.bandwidth;
      cp[c.server] -= c.compute;
      self(self, i + 1, profit + inst.tasks()[i].profit);
      bw[c.ap] += c.bandwidth;
      cp[c.server] += c.compute;
    }
  };
  visit(visit, 0, 0.0);
  return best;
}

TEST(Solve, NeverBeatsExhaustiveZeroSlackChoice) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const Instance inst = testing::small_instance(seed);
    EXPECT_LE(zsg::solve(inst).profit, best_zero_slack_selection(inst)) << "seed " << seed;
  }
}

}  // namespace
}  // namespace edgealloc
