#pragma once

// Exact solvers for the discretized problem, working on the per-task option
// view: an option (ap, server, m, n) grants m bandwidth units and n compute
// units and is deadline-feasible by construction. Choosing at most one option
// per task subject to integer AP / server unit budgets is equivalent to the
// 0-1 ILP built by ldm::discretize.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "edgealloc/ldm.hpp"
#include "edgealloc/model.hpp"

namespace edgealloc::solver {

struct TaskOption {
  std::size_t task = 0;
  std::size_t ap = 0;
  std::size_t server = 0;
  int m = 0;  // bandwidth units
  int n = 0;  // compute units
  double profit = 0;

  bool operator==(const TaskOption&) const = default;
};

struct OptionSet {
  std::vector<std::vector<TaskOption>> per_task;  // indexed by task
  std::vector<int> ap_units;
  std::vector<int> server_units;
};

/// All deadline-feasible (ap, server, m, n) per task. With remove_dominated,
/// an option is dropped when another option on the same (ap, server) uses no
/// more of either resource.
OptionSet enumerate_options(const Instance& instance, const ldm::DiscretizationConfig& cfg,
                            bool remove_dominated = true);

/// choice[i] indexes per_task[i]; nullopt leaves the task out.
struct Selection {
  std::vector<std::optional<std::size_t>> choice;
  double profit = 0;
};

/// Integer capacity check of a selection.
bool fits(const OptionSet& options, const Selection& selection);

struct SearchBudget {
  std::uint64_t max_nodes = 10'000'000;
  double max_seconds = 60.0;
};

struct SearchStats {
  std::uint64_t nodes = 0;
  std::vector<std::pair<std::uint64_t, double>> incumbent_trace;  // (node, profit)
  double wall_seconds = 0;
  bool proven_optimal = false;
};

struct SearchResult {
  Selection selection;
  SearchStats stats;
};

/// LP-based branch and bound over the option formulation: one binary per
/// option, at most one option per task, and one knapsack row per AP and per
/// server. The root is tightened with lifted cover cuts and one round of
/// Gomory cuts; greedy, rounding, diving, RENS and RINS heuristics seed the
/// incumbent, and columns are fixed by reduced cost. Nodes branch on the
/// task-option choice picked by strong branching, depth first.
/// With integer profits a node is cut unless its bound reaches the incumbent
/// plus one; otherwise it must beat the incumbent by 1e-9 relative. When the
/// budget runs out the incumbent is returned with proven_optimal unset.
SearchResult branch_and_bound(const OptionSet& options, const SearchBudget& budget = {});

/// Refused enumeration: the search space exceeds the oracle's cap.
class OracleRefused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultBruteForceCap = 1e7;

/// Exhaustive enumeration of per-task choices; exact. Refuses when
/// prod_i (|options_i| + 1) exceeds cap.
Selection brute_force(const OptionSet& options, double cap = kDefaultBruteForceCap);

/// Sets x_ijm = y_ikn = z_ijk = 1 for every chosen option.
ldm::Valuation to_valuation(const ldm::IlpModel& model, const OptionSet& options,
                            const Selection& selection);

enum class ExactMethod { branch_and_bound, brute_force };

struct LdmSettings {
  bool prune = true;
  bool remove_dominated = true;
  ExactMethod method = ExactMethod::branch_and_bound;
  SearchBudget budget;
  double brute_force_cap = kDefaultBruteForceCap;
};

struct LdmResult {
  Solution solution;
  SearchStats stats;
  ldm::ModelStats model_stats;
};

/// Discretize, optionally prune, solve exactly on the option view, map the
/// selection back onto the ILP variables, check every model row, and extract
/// the grants.
LdmResult solve_ldm(const Instance& instance, const ldm::DiscretizationConfig& cfg,
                    const LdmSettings& settings = {});

}  // namespace edgealloc::solver
