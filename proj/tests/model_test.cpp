#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "edgealloc/model.hpp"
#include "test_util.hpp"

namespace edgealloc {
namespace {

using testing::make_task;
using testing::single_pair;

TEST(CompletionTime, SubstitutesIntoFormula) {
  EXPECT_DOUBLE_EQ(completion_time(make_task(0, 10, 20, 100, 1), 3, 2, 4), 16.0);
  EXPECT_DOUBLE_EQ(completion_time(make_task(0, 10, 10, 100, 1), 0, 10, 10), 2.0);
  EXPECT_DOUBLE_EQ(completion_time(make_task(0, 1, 1, 100, 1), 5, 1, 1), 12.0);
}

TEST(CompletionTime, RejectsNonPositiveGrants) {
  const Task t = make_task(0, 1, 1, 10, 1);
  EXPECT_THROW(completion_time(t, 0, 0.0, 1.0), DomainError);
  EXPECT_THROW(completion_time(t, 0, 1.0, -1.0), DomainError);
  EXPECT_THROW(completion_time(t, 0, std::nan(""), 1.0), DomainError);
}

TEST(CompletionTime, StrictlyDecreasingInEachGrant) {
  const Task t = make_task(0, 7, 13, 100, 1);
  double prev_b = std::numeric_limits<double>::infinity();
  double prev_c = std::numeric_limits<double>::infinity();
  for (double g = 0.5; g < 100; g *= 1.7) {
    const double tb = completion_time(t, 2, g, 3.0);
    const double tc = completion_time(t, 2, 3.0, g);
    EXPECT_LT(tb, prev_b);
    EXPECT_LT(tc, prev_c);
    prev_b = tb;
    prev_c = tc;
  }
}

TEST(CompletionTime, ApproachesTwiceTheDelay) {
  const Task t = make_task(0, 7, 13, 100, 1);
  EXPECT_NEAR(completion_time(t, 4.5, 1e12, 1e12), 9.0, 1e-9);
  EXPECT_GT(completion_time(t, 4.5, 1e12, 1e12), 9.0);
}

TEST(CompletionTime, IndexOverloadReadsTopology) {
  const Topology topo(2, 2, {0, 1, 2, 3});
  const Task t = make_task(0, 4, 4, 100, 1);
  EXPECT_DOUBLE_EQ(completion_time(t, 1, 0, 2, 2, topo), 2 + 4 + 2);
}

TEST(ObjectiveValue, SumsAssignedProfits) {
  const Instance inst = single_pair(
      {make_task(1, 1, 1, 10, 10), make_task(2, 1, 1, 10, 40), make_task(3, 1, 1, 10, 5)}, 10, 10);
  EXPECT_EQ(objective_value(inst, {}), 0.0);
  Solution two{{{TaskId{1}, ApId{0}, ServerId{0}, 1, 1}, {TaskId{2}, ApId{0}, ServerId{0}, 1, 1}}};
  EXPECT_EQ(objective_value(inst, two), 50.0);
  two.assignments.push_back({TaskId{3}, ApId{0}, ServerId{0}, 1, 1});
  EXPECT_EQ(objective_value(inst, two), inst.total_profit());
}

TEST(ObjectiveValue, UnknownTaskIsReferenceError) {
  const Instance inst = single_pair({make_task(1, 1, 1, 10, 10)}, 10, 10);
  Solution s{{{TaskId{99}, ApId{0}, ServerId{0}, 1, 1}}};
  EXPECT_THROW(objective_value(inst, s), ReferenceError);
}

TEST(MakeSolution, FillsProfit) {
  const Instance inst = single_pair({make_task(1, 1, 1, 10, 10), make_task(2, 1, 1, 10, 40)}, 10, 10);
  const Solution s = make_solution(inst, {{TaskId{2}, ApId{0}, ServerId{0}, 1, 1}});
  EXPECT_EQ(s.profit, 40.0);
}

TEST(Instance, ReportsEveryViolation) {
  std::vector<Task> tasks{make_task(1, -1, 0, 5, -3, {7}), make_task(1, 1, 1, 5, 1, {})};
  std::vector<AccessPoint> aps{{ApId{0}, 0.0}};
  std::vector<Server> servers{{ServerId{0}, 10, ServerKind::edge, ApId{0}}};
  try {
    Instance(tasks, aps, servers, Topology(1, 1, {2.0}));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    // data size, cycles, profit, dangling AP, duplicate id, empty reach,
    // AP capacity, colocated nonzero delay.
    EXPECT_EQ(e.violations().size(), 8u) << e.what();
  }
}

TEST(Instance, RejectsMisshapenTopology) {
  std::vector<AccessPoint> aps{{ApId{0}, 10}};
  std::vector<Server> servers{{ServerId{0}, 10}, {ServerId{1}, 10}};
  EXPECT_THROW(Instance({}, aps, servers, Topology(1, 1, {0})), ParseError);
  EXPECT_THROW(Topology(1, 2, {0}), ParseError);
}

TEST(Instance, ResolvesIds) {
  std::vector<AccessPoint> aps{{ApId{5}, 10}, {ApId{3}, 20}};
  std::vector<Server> servers{{ServerId{9}, 10, ServerKind::cloud, std::nullopt}};
  const Instance inst({make_task(42, 1, 1, 10, 1, {3, 5})}, aps, servers, Topology(2, 1, {1, 2}));
  EXPECT_EQ(inst.ap_index(ApId{3}), 1u);
  EXPECT_EQ(inst.task_index(TaskId{42}), 0u);
  EXPECT_FALSE(inst.find_server(ServerId{1}));
  EXPECT_THROW(inst.server_index(ServerId{1}), ReferenceError);
  const auto reach = inst.reachable_ap_indices(0);
  ASSERT_EQ(reach.size(), 2u);
  EXPECT_EQ(reach[0], 1u);
  EXPECT_EQ(reach[1], 0u);
  EXPECT_DOUBLE_EQ(inst.topology().mean_delay(), 1.5);
  EXPECT_DOUBLE_EQ(inst.topology().max_delay(), 2.0);
  EXPECT_DOUBLE_EQ(inst.min_compute_capacity(), 10.0);
}

TEST(InstanceDocument, RoundTripsGeneratedInstances) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const Instance inst = testing::generated_instance(seed, 10 + seed % 7);
    const std::string text = save_instance(inst);
    const Instance back = load_instance(text);
    EXPECT_EQ(back, inst) << "seed " << seed;
    EXPECT_EQ(save_instance(back), text);
  }
}

TEST(InstanceDocument, RoundTripsSmallInstances) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Instance inst = testing::small_instance(seed);
    EXPECT_EQ(load_instance(save_instance(inst)), inst) << "seed " << seed;
  }
}

TEST(InstanceDocument, CollectsAllSchemaProblems) {
  const std::string text = R"({
    "schema": 2,
    "tasks": [{"id": 1, "data_size": "big", "cycles": 1, "deadline": 5, "profit": 1,
               "access_points": [4]}],
    "access_points": [{"id": 0}],
    "servers": [{"id": 0, "compute": 10, "kind": "fog"}],
    "delays": [[0]]
  })";
  try {
    load_instance(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    // schema version, data_size type, missing bandwidth, kind, dangling AP
    // reference, non-positive data size and bandwidth from the semantic pass.
    EXPECT_GE(e.violations().size(), 5u) << e.what();
  }
}

TEST(InstanceDocument, MalformedJsonIsParseError) {
  EXPECT_THROW(load_instance("{not json"), ParseError);
  EXPECT_THROW(load_instance("[]"), ParseError);
}

TEST(SolutionDocument, RoundTrips) {
  const Solution s{{{TaskId{3}, ApId{1}, ServerId{2}, 1.25, 7.5}}, 12};
  EXPECT_EQ(load_solution(save_solution(s)), s);
}

TEST(SolutionDocument, RejectsNonPositiveGrants) {
  const std::string text = R"({"schema": 1, "profit": 0,
    "assignments": [{"task": 1, "ap": 0, "server": 0, "bandwidth": 0, "compute": 1}]})";
  EXPECT_THROW(load_solution(text), ParseError);
}

}  // namespace
}  // namespace edgealloc
