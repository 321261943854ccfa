#pragma once

// Experiment harness: generates tasksets over a parameter grid, runs the
// greedy heuristic and the discretized exact solver on each, and reports
// profit gain ratios (provisioned profit / total profit) bucketed by the
// share of resource-intensive tasks and by taskset size.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "edgealloc/model.hpp"
#include "edgealloc/solver.hpp"
#include "edgealloc/taskgen.hpp"

namespace edgealloc::bench {

/// provisioned profit / total profit. A taskset with zero total profit has
/// ratio 1 when the solution's profit is also 0; otherwise DomainError.
double profit_gain_ratio(const Instance& instance, const Solution& solution);

struct IntensityFlags {
  bool compute_intensive = false;    // q_i / tau_i > 0.2 * min_k c_k
  bool bandwidth_intensive = false;  // s_i / tau_i > 0.2 * min_{j in A_i} b_j
};

/// tau_i = deadline_i - 2 * mean delay over all (AP, server) pairs.
std::vector<IntensityFlags> classify_intensity(const Instance& instance);

struct AlgorithmSpec {
  enum class Kind { zsg, ldm, brute };
  Kind kind = Kind::zsg;
  double b_unit = 0;
  double c_unit = 0;
  /// When > 0, the exact solver's time budget is this multiple of the largest
  /// ZSG runtime observed for the same taskset size.
  double zsg_time_multiple = 0;

  static AlgorithmSpec zsg() { return {}; }
  static AlgorithmSpec ldm(double b_unit, double c_unit) { return {Kind::ldm, b_unit, c_unit, 0}; }
  static AlgorithmSpec brute(double b_unit, double c_unit) {
    return {Kind::brute, b_unit, c_unit, 0};
  }
  std::string tag() const;  // "zsg" | "ldm" | "brute"
};

struct CampaignGrid {
  std::vector<std::uint64_t> seeds;
  std::vector<std::size_t> n_tasks;
  std::vector<double> ub;
  std::vector<double> uc;
  std::vector<AlgorithmSpec> algorithms;
  taskgen::ArchitectureConfig architecture = taskgen::ArchitectureConfig::small();
  std::uint64_t architecture_seed = 1;
  solver::SearchBudget budget;
  unsigned threads = 1;

  /// 3 sizes x 3 ub x 3 uc x 10 seeds on the small architecture, running
  /// ZSG, LDM-5 and LDM-15.
  static CampaignGrid desk_default();
};

struct RunRecord {
  std::string taskset_id;
  std::uint64_t seed = 0;
  std::size_t n_tasks = 0;
  double ub = 0;
  double uc = 0;
  std::string algo;
  double b_unit = 0;
  double c_unit = 0;
  double profit = 0;
  double ratio = 0;
  double wall_ms = 0;
  bool optimal = false;
  double pct_ci = 0;
  double pct_bi = 0;

  /// "zsg", or tag-b_unit when the units agree ("ldm-5"), else tag-b-c.
  std::string label() const;
};

struct BucketSummary {
  std::string axis;  // "ci", "bi" or "size"
  std::string bucket;
  std::string algo;  // RunRecord::label()
  std::size_t count = 0;
  double mean = 0;
  double median = 0;
};

struct CampaignResult {
  std::vector<RunRecord> records;
  std::vector<BucketSummary> summary;
  std::vector<std::string> notes;  // bucket scheme, empty buckets
};

/// The taskset every (seed, size, ub, uc) cell of a campaign uses.
Instance campaign_taskset(const taskgen::Architecture& arch, std::uint64_t seed, std::size_t n_tasks, double ub, double uc);

/// One record per (taskset, algorithm). Every solution is re-verified before
/// it is recorded. Records are sorted by (n_tasks, ub, uc, seed, algorithm).
CampaignResult run_campaign(const CampaignGrid& grid);

/// Decile bucket of a percentage: "[0,10)", ..., "[90,100]".
std::string decile_bucket(double pct);

std::vector<BucketSummary> summarize(const std::vector<RunRecord>& records,
                                     std::vector<std::string>* notes = nullptr);

inline constexpr const char* kCsvHeader =
    "taskset_id,seed,n_tasks,ub,uc,algo,b_unit,c_unit,profit,ratio,wall_ms,optimal,pct_ci,pct_bi";

std::string records_to_csv(const std::vector<RunRecord>& records);
std::vector<RunRecord> records_from_csv(const std::string& text);
std::string summary_to_csv(const std::vector<BucketSummary>& summary,
                           const std::vector<std::string>& notes);

/// Tukey box statistics; whiskers reach the most extreme points within
/// 1.5 * IQR of the quartiles. Quartiles interpolate linearly between order
/// statistics.
struct BoxStats {
  std::size_t count = 0;
  double whisker_low = 0;
  double q1 = 0;
  double median = 0;
  double q3 = 0;
  double whisker_high = 0;
  double mean = 0;
  std::vector<double> outliers;
};

BoxStats box_stats(std::vector<double> values);

/// Writes fig_ci.svg, fig_bi.svg, fig_size.svg, boxplot_data.csv and
/// records.csv into out_dir. Throws DomainError on empty input.
void emit_plots(const std::vector<RunRecord>& records, const std::filesystem::path& out_dir);

}  // namespace edgealloc::bench
