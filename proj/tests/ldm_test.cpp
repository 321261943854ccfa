#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "edgealloc/ldm.hpp"
#include "edgealloc/solver.hpp"
#include "edgealloc/verify.hpp"
#include "test_util.hpp"

namespace edgealloc {
namespace {

using ldm::DiscretizationConfig;
using ldm::RowFamily;
using ldm::VarKind;
using testing::make_task;
using testing::single_pair;

std::string read_golden(const std::string& name) {
  std::ifstream in(std::string(EDGEALLOC_GOLDEN_DIR) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// One task (id 1), one AP (id 0) and one remote server (id 3) at delay 1.
Instance one_task_instance() {
  std::vector<AccessPoint> aps{{ApId{0}, 10}};
  std::vector<Server> servers{{ServerId{3}, 10, ServerKind::cloud, std::nullopt}};
  return Instance({make_task(1, 10, 10, 8, 10)}, aps, servers, Topology(1, 1, {1}));
}

std::size_t count_family(const ldm::IlpModel& model, RowFamily family) {
  std::size_t n = 0;
  for (const auto& r : model.rows()) n += r.family == family;
  return n;
}

TEST(UnitCount, FloorsCapacity) {
  EXPECT_EQ(ldm::unit_count(7, 5), 1);
  EXPECT_EQ(ldm::unit_count(15, 5), 3);
  EXPECT_EQ(ldm::unit_count(14.999, 5), 2);
  EXPECT_EQ(ldm::unit_count(4, 5), 0);
  // 0.3 / 0.1 is 2.9999999999999996 in binary.
  EXPECT_EQ(ldm::unit_count(0.3, 0.1), 3);
}

TEST(UnitCount, RejectsNonPositiveUnit) {
  EXPECT_THROW(ldm::unit_count(10, 0), DomainError);
  EXPECT_THROW(ldm::unit_count(10, -5), DomainError);
  EXPECT_THROW(ldm::discretize(one_task_instance(), {0, 5}), DomainError);
}

TEST(Discretize, BuildsEveryRowFamily) {
  const auto model = ldm::discretize(one_task_instance(), {5, 5});
  EXPECT_EQ(model.ap_units(), std::vector<int>{2});
  EXPECT_EQ(model.server_units(), std::vector<int>{2});
  EXPECT_EQ(model.variables().size(), 5u);
  for (RowFamily f : {RowFamily::deadline, RowFamily::task_ap_choice, RowFamily::task_server_choice,
                      RowFamily::ap_capacity, RowFamily::server_capacity, RowFamily::z_lower,
                      RowFamily::z_upper_x, RowFamily::z_upper_y})
    EXPECT_EQ(count_family(model, f), 1u);
  const auto stats = model.stats();
  EXPECT_EQ(stats.variables, 5u);
  EXPECT_EQ(stats.rows, 8u);
  EXPECT_EQ(stats.nonzeros, 5u + 2 + 2 + 2 + 2 + 5 + 3 + 3);
}

TEST(Discretize, DeadlineRowCoefficients) {
  const auto model = ldm::discretize(one_task_instance(), {5, 5});
  const auto& row = model.rows().front();
  ASSERT_EQ(row.family, RowFamily::deadline);
  EXPECT_EQ(row.rhs, 8);
  std::map<std::string, double> coef;
  for (const auto& t : row.terms) coef[model.variables()[t.var].name] = t.coef;
  EXPECT_DOUBLE_EQ(coef["x_1_0_1"], 2.0);   // 10 / (1 * 5)
  EXPECT_DOUBLE_EQ(coef["x_1_0_2"], 1.0);   // 10 / (2 * 5)
  EXPECT_DOUBLE_EQ(coef["y_1_3_1"], 2.0);
  EXPECT_DOUBLE_EQ(coef["y_1_3_2"], 1.0);
  EXPECT_DOUBLE_EQ(coef["z_1_0_3"], 2.0);   // 2 * delay
}

TEST(Discretize, NoVariablesForUnreachableAps) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Instance inst = testing::small_instance(seed);
    const auto model = ldm::discretize(inst, {5, 5});
    for (const auto& v : model.variables()) {
      if (v.kind == VarKind::y) continue;
      const auto reach = inst.reachable_ap_indices(v.task);
      EXPECT_NE(std::find(reach.begin(), reach.end(), v.ap), reach.end()) << v.name;
    }
  }
}

TEST(Discretize, SingleUnitCollapsesToOneVariablePerPair) {
  const Instance inst = single_pair({make_task(0, 10, 10, 20, 1)}, 7, 7);
  const auto model = ldm::discretize(inst, {5, 5});
  EXPECT_TRUE(model.find_x(0, 0, 1));
  EXPECT_FALSE(model.find_x(0, 0, 2));
  EXPECT_TRUE(model.find_y(0, 0, 1));
  EXPECT_FALSE(model.find_y(0, 0, 2));
  const auto& row = model.rows().front();
  EXPECT_DOUBLE_EQ(row.terms.front().coef, 10.0 / 5);
}

TEST(Prune, DropsPairsWhoseBackhaulExceedsDeadline) {
  std::vector<AccessPoint> aps{{ApId{0}, 20}};
  std::vector<Server> servers{{ServerId{0}, 20, ServerKind::edge, ApId{0}},
                              {ServerId{1}, 20, ServerKind::cloud, std::nullopt}};
  const Instance inst({make_task(0, 5, 5, 10, 1)}, aps, servers, Topology(1, 2, {0, 6}));
  const auto full = ldm::discretize(inst, {5, 5});
  const auto pruned = ldm::prune(full, inst, {5, 5});
  EXPECT_TRUE(full.find_z(0, 0, 1));
  EXPECT_FALSE(pruned.find_z(0, 0, 1));
  EXPECT_TRUE(pruned.find_z(0, 0, 0));
  EXPECT_EQ(count_family(pruned, RowFamily::z_lower), 1u);
}

TEST(Prune, DropsApsTooSlowEvenAtFullBandwidth) {
  std::vector<AccessPoint> aps{{ApId{0}, 5}, {ApId{1}, 100}};
  std::vector<Server> servers{{ServerId{0}, 100, ServerKind::cloud, std::nullopt}};
  // Through AP 0 the upload alone takes 50 / 5 = 10 > 8.
  const Instance inst({make_task(0, 50, 1, 8, 1, {0, 1})}, aps, servers, Topology(2, 1, {0, 0}));
  const auto pruned = ldm::prune(ldm::discretize(inst, {5, 5}), inst, {5, 5});
  EXPECT_FALSE(pruned.find_x(0, 0, 1));
  EXPECT_FALSE(pruned.find_z(0, 0, 0));
  EXPECT_TRUE(pruned.find_x(0, 1, 20));
  EXPECT_TRUE(pruned.find_z(0, 1, 0));
}

TEST(Prune, KeepsTheOptimum) {
  solver::LdmSettings with, without;
  with.method = without.method = solver::ExactMethod::brute_force;
  with.brute_force_cap = without.brute_force_cap = 1e12;
  without.prune = false;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const Instance inst = testing::small_instance(seed);
    const auto a = solver::solve_ldm(inst, {5, 5}, with);
    const auto b = solver::solve_ldm(inst, {5, 5}, without);
    EXPECT_EQ(a.solution.profit, b.solution.profit) << "seed " << seed;
    EXPECT_LE(a.model_stats.variables, b.model_stats.variables);
  }
}

TEST(ExtractSolution, GrantsAreUnitMultiples) {
  const Instance inst = single_pair({make_task(0, 10, 10, 20, 4)}, 20, 20);
  const auto model = ldm::discretize(inst, {5, 5});
  ldm::Valuation values(model.variables().size(), 0);
  values[*model.find_x(0, 0, 3)] = 1;
  values[*model.find_y(0, 0, 2)] = 1;
  values[*model.find_z(0, 0, 0)] = 1;
  ASSERT_TRUE(model.satisfies(values));
  const Solution s = ldm::extract_solution(inst, {5, 5}, model, values);
  ASSERT_EQ(s.assignments.size(), 1u);
  EXPECT_EQ(s.assignments[0].bandwidth, 15);
  EXPECT_EQ(s.assignments[0].compute, 10);
  EXPECT_EQ(s.profit, 4);
  EXPECT_TRUE(verify(inst, s).feasible);
}

TEST(ExtractSolution, AllZerosIsEmpty) {
  const Instance inst = testing::small_instance(4);
  const auto model = ldm::discretize(inst, {5, 5});
  const ldm::Valuation zeros(model.variables().size(), 0);
  EXPECT_TRUE(model.satisfies(zeros));
  const Solution s = ldm::extract_solution(inst, {5, 5}, model, zeros);
  EXPECT_TRUE(s.assignments.empty());
  EXPECT_EQ(s.profit, 0);
}

TEST(ExtractSolution, UnsupportedZIsConsistencyError) {
  const Instance inst = single_pair({make_task(0, 10, 10, 20, 4)}, 20, 20);
  const auto model = ldm::discretize(inst, {5, 5});
  ldm::Valuation values(model.variables().size(), 0);
  values[*model.find_z(0, 0, 0)] = 1;
  EXPECT_FALSE(model.satisfies(values));
  EXPECT_THROW(ldm::extract_solution(inst, {5, 5}, model, values), ldm::ConsistencyError);
  EXPECT_THROW(ldm::extract_solution(inst, {5, 5}, model, {}), ldm::ConsistencyError);
}

TEST(ExportLp, EmptyModel) {
  const Instance inst({}, {{ApId{0}, 10}}, {{ServerId{0}, 10, ServerKind::cloud, std::nullopt}},
                      Topology(1, 1, {1}));
  EXPECT_EQ(ldm::export_lp(ldm::discretize(inst, {5, 5})), read_golden("empty.lp"));
}

TEST(ExportLp, OneTaskGolden) {
  const std::string golden = read_golden("one_task.lp");
  ASSERT_FALSE(golden.empty());
  EXPECT_EQ(ldm::export_lp(ldm::discretize(one_task_instance(), {5, 5})), golden);
}

TEST(ExportLp, NamesEveryVariableOnce) {
  const Instance inst = testing::generated_instance(2, 10);
  const auto model = ldm::discretize(inst, {15, 15});
  std::set<std::string> names;
  for (const auto& v : model.variables()) EXPECT_TRUE(names.insert(v.name).second) << v.name;
  const std::string lp = ldm::export_lp(model);
  EXPECT_EQ(lp.rfind("End\n"), lp.size() - 4);
}

// Random selections of enumerated options are exactly the valuations of
// interest; each one maps onto the model and extracts to a verified solution.
TEST(Valuations, FeasibleSelectionsExtractToVerifiedSolutions) {
  const DiscretizationConfig cfg{5, 5};
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const Instance inst = testing::small_instance(seed);
    const auto model = ldm::prune(ldm::discretize(inst, cfg), inst, cfg);
    const auto options = solver::enumerate_options(inst, cfg, false);
    taskgen::Rng rng(seed);
    for (int trial = 0; trial < 20; ++trial) {
      solver::Selection sel;
      sel.choice.resize(options.per_task.size());
      for (std::size_t i = 0; i < sel.choice.size(); ++i) {
        const auto& opts = options.per_task[i];
        if (!opts.empty() && rng.coin())
          sel.choice[i] = std::size_t(rng.uniform_int(0, std::int64_t(opts.size()) - 1));
      }
      const auto values = solver::to_valuation(model, options, sel);
      const bool fits = solver::fits(options, sel);
      EXPECT_EQ(model.satisfies(values), fits);
      if (!fits) continue;
      const Solution s = ldm::extract_solution(inst, cfg, model, values);
      const auto report = verify(inst, s);
      EXPECT_TRUE(report.feasible) << report_to_json(report);
      EXPECT_DOUBLE_EQ(s.profit, model.objective_value(values));
    }
  }
}

TEST(Valuations, StructuralSumsAtMostOne) {
  const DiscretizationConfig cfg{5, 5};
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Instance inst = testing::small_instance(seed);
    const auto model = ldm::discretize(inst, cfg);
    const auto sel = solver::brute_force(solver::enumerate_options(inst, cfg), 1e12);
    const auto values = solver::to_valuation(model, solver::enumerate_options(inst, cfg), sel);
    ASSERT_TRUE(model.satisfies(values));
    std::vector<int> x_sum(inst.tasks().size()), y_sum(inst.tasks().size()), z_sum(inst.tasks().size());
    for (std::size_t v = 0; v < values.size(); ++v) {
      const auto& var = model.variables()[v];
      auto& sum = var.kind == VarKind::x ? x_sum : var.kind == VarKind::y ? y_sum : z_sum;
      sum[var.task] += values[v];
    }
    for (std::size_t i = 0; i < x_sum.size(); ++i) {
      EXPECT_LE(x_sum[i], 1);
      EXPECT_LE(y_sum[i], 1);
      // z = 1 exactly when the task has an AP and a server.
      EXPECT_EQ(z_sum[i] == 1, x_sum[i] == 1 && y_sum[i] == 1);
    }
  }
}

// z <= sum x and z <= sum y: a z without both supports never satisfies the
// model, whichever x / y are set elsewhere.
TEST(Valuations, ZRequiresBothSupports) {
  const DiscretizationConfig cfg{5, 5};
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Instance inst = testing::small_instance(seed);
    const auto model = ldm::discretize(inst, cfg);
    for (std::size_t z = 0; z < model.variables().size(); ++z) {
      const auto& var = model.variables()[z];
      if (var.kind != VarKind::z) continue;
      ldm::Valuation only_x(model.variables().size(), 0), only_y = only_x;
      only_x[z] = only_y[z] = 1;
      if (auto x = model.find_x(var.task, var.ap, 1)) only_x[*x] = 1;
      if (auto y = model.find_y(var.task, var.server, 1)) only_y[*y] = 1;
      EXPECT_FALSE(model.satisfies(only_x));
      EXPECT_FALSE(model.satisfies(only_y));
    }
  }
}

// A coarse option (m, n) at unit 15 is the fine option (3m, 3n) at unit 5.
TEST(Refinement, CoarseSelectionsMapToFineModel) {
  const DiscretizationConfig coarse{15, 15}, fine{5, 5};
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Instance inst = testing::generated_instance(seed, 8, 0.6, 3);
    const auto f_opts = solver::enumerate_options(inst, fine, false);
    const auto f_model = ldm::discretize(inst, fine);
    const auto sel = solver::branch_and_bound(solver::enumerate_options(inst, coarse)).selection;
    solver::Selection mapped;
    mapped.choice.resize(sel.choice.size());
    const auto c_dom = solver::enumerate_options(inst, coarse);
    for (std::size_t i = 0; i < sel.choice.size(); ++i) {
      if (!sel.choice[i]) continue;
      const auto& o = c_dom.per_task[i][*sel.choice[i]];
      const auto& fo = f_opts.per_task[i];
      auto it = std::find_if(fo.begin(), fo.end(), [&](const solver::TaskOption& f) {
        return f.ap == o.ap && f.server == o.server && f.m == 3 * o.m && f.n == 3 * o.n;
      });
      ASSERT_NE(it, fo.end()) << "seed " << seed << " task " << i;
      mapped.choice[i] = std::size_t(it - fo.begin());
    }
    const auto values = solver::to_valuation(f_model, f_opts, mapped);
    EXPECT_TRUE(f_model.satisfies(values));
    EXPECT_EQ(f_model.objective_value(values), sel.profit);
  }
}

}  // namespace
}  // namespace edgealloc
