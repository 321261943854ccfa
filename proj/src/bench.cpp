#include "edgealloc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "edgealloc/verify.hpp"
#include "edgealloc/zsg.hpp"

namespace edgealloc::bench {

namespace {

using Clock = std::chrono::steady_clock;

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error("bad number in CSV: '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error("bad integer in CSV: '" + s + "'");
  return v;
}

double percent(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : 100.0 * double(part) / double(whole);
}

std::uint32_t scaled(double v) { return static_cast<std::uint32_t>(std::llround(v * 1e6)); }

std::string taskset_name(std::uint64_t seed, std::size_t n, double ub, double uc) {
  return "n" + std::to_string(n) + "_ub" + num(ub) + "_uc" + num(uc) + "_s" + std::to_string(seed);
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return 0;
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Parallel-for over [0, n). Each index is handled by exactly one worker.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(threads, n); ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace

double profit_gain_ratio(const Instance& instance, const Solution& solution) {
  const double total = instance.total_profit();
  const double got = objective_value(instance, solution);
  if (total == 0) {
    if (got == 0) return 1.0;
    throw DomainError("profit gain ratio undefined: zero total profit");
  }
  return got / total;
}

std::vector<IntensityFlags> classify_intensity(const Instance& instance) {
  const double mean_delay = instance.topology().mean_delay();
  const double min_compute = instance.min_compute_capacity();
  std::vector<IntensityFlags> flags;
  flags.reserve(instance.tasks().size());
  for (std::size_t i = 0; i < instance.tasks().size(); ++i) {
    const Task& t = instance.tasks()[i];
    const double window = t.deadline - 2.0 * mean_delay;
    double min_bandwidth = std::numeric_limits<double>::infinity();
    for (std::size_t j : instance.reachable_ap_indices(i))
      min_bandwidth = std::min(min_bandwidth, instance.aps()[j].bandwidth_capacity);
    flags.push_back({t.cycles / window > 0.2 * min_compute,
                     t.data_size / window > 0.2 * min_bandwidth});
  }
  return flags;
}

std::string AlgorithmSpec::tag() const {
  switch (kind) {
    case Kind::zsg: return "zsg";
    case Kind::ldm: return "ldm";
    case Kind::brute: return "brute";
  }
  return "unknown";
}

std::string RunRecord::label() const {
  if (algo == "zsg") return algo;
  if (b_unit == c_unit) return algo + "-" + num(b_unit);
  return algo + "-" + num(b_unit) + "-" + num(c_unit);
}

CampaignGrid CampaignGrid::desk_default() {
  CampaignGrid g;
  for (std::uint64_t s = 1; s <= 10; ++s) g.seeds.push_back(s);
  g.n_tasks = {10, 20, 30};
  g.ub = {0.3, 0.6, 0.9};
  g.uc = {1, 3, 5};
  g.algorithms = {AlgorithmSpec::zsg(), AlgorithmSpec::ldm(5, 5), AlgorithmSpec::ldm(15, 15)};
  return g;
}

Instance campaign_taskset(const taskgen::Architecture& arch, std::uint64_t seed,
                          std::size_t n_tasks, double ub, double uc) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(n_tasks), scaled(ub), scaled(uc)};
  taskgen::Rng rng(seq);
  taskgen::TasksetGenConfig cfg;
  cfg.n_tasks = n_tasks;
  cfg.ub = ub;
  cfg.uc = uc;
  return taskgen::generate_taskset(arch, cfg, rng);
}

CampaignResult run_campaign(const CampaignGrid& grid) {
  taskgen::Rng arch_rng(grid.architecture_seed);
  const taskgen::Architecture arch = taskgen::sample_architecture(grid.architecture, arch_rng);

  struct Cell {
    std::uint64_t seed;
    std::size_t n;
    double ub, uc;
    std::optional<Instance> instance;
    double pct_ci = 0, pct_bi = 0;
    std::optional<Solution> zsg_solution;
    double zsg_ms = 0;
  };
  std::vector<Cell> cells;
  for (std::size_t n : grid.n_tasks)
    for (double ub : grid.ub)
      for (double uc : grid.uc)
        for (std::uint64_t seed : grid.seeds) cells.push_back({seed, n, ub, uc, {}, 0, 0, {}, 0});

  const bool want_zsg = std::any_of(grid.algorithms.begin(), grid.algorithms.end(),
                                    [](const AlgorithmSpec& a) {
                                      return a.kind == AlgorithmSpec::Kind::zsg || a.zsg_time_multiple > 0;
                                    });

  // Phase 1: tasksets and the greedy runs (their times size the exact budgets).
  parallel_for(cells.size(), grid.threads, [&](std::size_t c) {
    Cell& cell = cells[c];
    cell.instance = campaign_taskset(arch, cell.seed, cell.n, cell.ub, cell.uc);
    const auto flags = classify_intensity(*cell.instance);
    const auto ci = std::count_if(flags.begin(), flags.end(), [](auto f) { return f.compute_intensive; });
    const auto bi = std::count_if(flags.begin(), flags.end(), [](auto f) { return f.bandwidth_intensive; });
    cell.pct_ci = percent(std::size_t(ci), flags.size());
    cell.pct_bi = percent(std::size_t(bi), flags.size());
    if (want_zsg) {
      const auto start = Clock::now();
      cell.zsg_solution = zsg::solve(*cell.instance);
      cell.zsg_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    }
  });

  std::map<std::size_t, double> max_zsg_ms;
  for (const auto& cell : cells) max_zsg_ms[cell.n] = std::max(max_zsg_ms[cell.n], cell.zsg_ms);

  // Phase 2: every (cell, algorithm) pair.
  const std::size_t n_algos = grid.algorithms.size();
  std::vector<RunRecord> records(cells.size() * n_algos);
  parallel_for(records.size(), grid.threads, [&](std::size_t r) {
    const Cell& cell = cells[r / n_algos];
    const AlgorithmSpec& algo = grid.algorithms[r % n_algos];
    const Instance& inst = *cell.instance;

    RunRecord rec;
    rec.taskset_id = taskset_name(cell.seed, cell.n, cell.ub, cell.uc);
    rec.seed = cell.seed;
    rec.n_tasks = cell.n;
    rec.ub = cell.ub;
    rec.uc = cell.uc;
    rec.algo = algo.tag();
    rec.b_unit = algo.b_unit;
    rec.c_unit = algo.c_unit;
    rec.pct_ci = cell.pct_ci;
    rec.pct_bi = cell.pct_bi;

    Solution sol;
    if (algo.kind == AlgorithmSpec::Kind::zsg) {
      sol = *cell.zsg_solution;
      rec.wall_ms = cell.zsg_ms;
      rec.optimal = false;
    } else {
      solver::LdmSettings settings;
      settings.budget = grid.budget;
      if (algo.zsg_time_multiple > 0)
        settings.budget.max_seconds = algo.zsg_time_multiple * max_zsg_ms[cell.n] / 1000.0;
      settings.method = algo.kind == AlgorithmSpec::Kind::brute ? solver::ExactMethod::brute_force
                                                                : solver::ExactMethod::branch_and_bound;
      const auto start = Clock::now();
      auto result = solver::solve_ldm(inst, {algo.b_unit, algo.c_unit}, settings);
      rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
      rec.optimal = result.stats.proven_optimal;
      sol = std::move(result.solution);
    }
    const auto report = verify(inst, sol);
    if (!report.feasible)
      throw std::logic_error(rec.taskset_id + ": " + rec.label() + " produced an infeasible solution");
    rec.profit = sol.profit;
    rec.ratio = profit_gain_ratio(inst, sol);
    records[r] = std::move(rec);
  });

  std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::tie(a.n_tasks, a.ub, a.uc, a.seed, a.algo, a.b_unit, a.c_unit) <
           std::tie(b.n_tasks, b.ub, b.uc, b.seed, b.algo, b.b_unit, b.c_unit);
  });

  CampaignResult result;
  result.records = std::move(records);
  result.summary = summarize(result.records, &result.notes);
  return result;
}

std::string decile_bucket(double pct) {
  const int d = std::clamp(static_cast<int>(std::floor(pct / 10.0)), 0, 9);
  return "[" + std::to_string(d * 10) + "," + std::to_string(d * 10 + 10) + (d == 9 ? "]" : ")");
}

std::vector<BucketSummary> summarize(const std::vector<RunRecord>& records,
                                     std::vector<std::string>* notes) {
  // (axis order, bucket order key, bucket label, algo) -> ratios
  std::map<std::tuple<int, double, std::string, std::string>, std::vector<double>> groups;
  for (const auto& r : records) {
    const double ci = std::clamp(std::floor(r.pct_ci / 10.0), 0.0, 9.0);
    const double bi = std::clamp(std::floor(r.pct_bi / 10.0), 0.0, 9.0);
    groups[{0, ci, decile_bucket(r.pct_ci), r.label()}].push_back(r.ratio);
    groups[{1, bi, decile_bucket(r.pct_bi), r.label()}].push_back(r.ratio);
    groups[{2, double(r.n_tasks), std::to_string(r.n_tasks), r.label()}].push_back(r.ratio);
  }
  static const char* axis_names[] = {"ci", "bi", "size"};
  std::vector<BucketSummary> out;
  for (const auto& [key, ratios] : groups) {
    double mean = 0;
    for (double v : ratios) mean += v;
    mean /= double(ratios.size());
    out.push_back({axis_names[std::get<0>(key)], std::get<2>(key), std::get<3>(key), ratios.size(),
                   mean, median_of(ratios)});
  }
  if (notes) {
    notes->push_back("intensity buckets are deciles of the percentage of intensive tasks; "
                     "the last bucket is closed");
    for (int axis = 0; axis < 2; ++axis) {
      for (int d = 0; d < 10; ++d) {
        const bool any = std::any_of(groups.begin(), groups.end(), [&](const auto& g) {
          return std::get<0>(g.first) == axis && std::get<1>(g.first) == double(d);
        });
        if (!any)
          notes->push_back(std::string(axis_names[axis]) + " bucket " + decile_bucket(d * 10.0) +
                           " is empty");
      }
    }
  }
  return out;
}

std::string records_to_csv(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.taskset_id << ',' << r.seed << ',' << r.n_tasks << ',' << num(r.ub) << ','
        << num(r.uc) << ',' << r.algo << ',' << num(r.b_unit) << ',' << num(r.c_unit) << ','
        << num(r.profit) << ',' << num(r.ratio) << ',' << num(r.wall_ms) << ','
        << (r.optimal ? 1 : 0) << ',' << num(r.pct_ci) << ',' << num(r.pct_bi) << '\n';
  }
  return out.str();
}

std::vector<RunRecord> records_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw std::runtime_error("CSV header does not match the record schema");
  std::vector<RunRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 14) throw std::runtime_error("CSV row has " + std::to_string(f.size()) + " fields");
    RunRecord r;
    r.taskset_id = f[0];
    r.seed = parse_u64(f[1]);
    r.n_tasks = static_cast<std::size_t>(parse_u64(f[2]));
    r.ub = parse_double(f[3]);
    r.uc = parse_double(f[4]);
    r.algo = f[5];
    r.b_unit = parse_double(f[6]);
    r.c_unit = parse_double(f[7]);
    r.profit = parse_double(f[8]);
    r.ratio = parse_double(f[9]);
    r.wall_ms = parse_double(f[10]);
    r.optimal = f[11] == "1";
    r.pct_ci = parse_double(f[12]);
    r.pct_bi = parse_double(f[13]);
    out.push_back(std::move(r));
  }
  return out;
}

std::string summary_to_csv(const std::vector<BucketSummary>& summary,
                           const std::vector<std::string>& notes) {
  std::ostringstream out;
  for (const auto& n : notes) out << "# " << n << '\n';
  out << "axis,bucket,algo,count,mean_ratio,median_ratio\n";
  for (const auto& s : summary)
    out << s.axis << ',' << s.bucket << ',' << s.algo << ',' << s.count << ',' << num(s.mean)
        << ',' << num(s.median) << '\n';
  return out.str();
}

BoxStats box_stats(std::vector<double> values) {
  BoxStats b;
  b.count = values.size();
  if (values.empty()) return b;
  std::sort(values.begin(), values.end());
  auto quantile = [&](double p) {
    const double pos = p * double(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - double(lo)) * (values[hi] - values[lo]);
  };
  b.q1 = quantile(0.25);
  b.median = quantile(0.5);
  b.q3 = quantile(0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr, hi_fence = b.q3 + 1.5 * iqr;
  b.whisker_low = b.q1;
  b.whisker_high = b.q3;
  double sum = 0;
  for (double v : values) {
    sum += v;
    if (v < lo_fence || v > hi_fence) {
      b.outliers.push_back(v);
      continue;
    }
    b.whisker_low = std::min(b.whisker_low, v);
    b.whisker_high = std::max(b.whisker_high, v);
  }
  b.mean = sum / double(values.size());
  return b;
}

}  // namespace edgealloc::bench
