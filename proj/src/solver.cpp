#include "edgealloc/solver.hpp"

#include "bounded_lp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

namespace edgealloc::solver {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// LP-based branch and bound on the option formulation
//
//   max sum p_o x_o  s.t.  sum_{o of task i} x_o <= 1,
//                          sum_{o on AP j} m_o x_o <= u_j,
//                          sum_{o on server k} n_o x_o <= v_k,  x binary.
//
// Each node solves the LP relaxation under its fixings. Branching fixes the
// fractional option with the largest LP value, to 1 first and then to 0.
class BranchAndBound {
 public:
  BranchAndBound(const OptionSet& options, const SearchBudget& budget, bool heuristics = true)
      : options_(options),
        budget_(budget),
        heuristics_(heuristics),
        ap_used_(options.ap_units.size(), 0),
        server_used_(options.server_units.size(), 0),
        best_(options.per_task.size()) {
    const std::size_t n_ap = options.ap_units.size();
    std::vector<double> rhs;
    for (int u : options.ap_units) rhs.push_back(u);
    for (int v : options.server_units) rhs.push_back(v);
    std::vector<std::size_t> task_row(options.per_task.size(), 0);
    for (std::size_t i = 0; i < options.per_task.size(); ++i) {
      if (options.per_task[i].size() < 2) continue;  // x <= 1 already covers it
      task_row[i] = rhs.size();
      rhs.push_back(1.0);
    }
    std::vector<detail::SparseColumn> cols;
    for (std::size_t i = 0; i < options.per_task.size(); ++i) {
      first_.push_back(columns_.size());
      for (std::size_t idx = 0; idx < options.per_task[i].size(); ++idx) {
        const TaskOption& o = options.per_task[i][idx];
        detail::SparseColumn c;
        c.cost = o.profit;
        c.rows = {o.ap, n_ap + o.server};
        c.coefs = {double(o.m), double(o.n)};
        if (options.per_task[i].size() >= 2) {
          c.rows.push_back(task_row[i]);
          c.coefs.push_back(1.0);
        }
        cols.push_back(std::move(c));
        columns_.push_back({i, idx});
        integral_ = integral_ && o.profit == std::floor(o.profit);
      }
    }
    first_.push_back(columns_.size());
    lp_.emplace(std::move(rhs), std::move(cols));
    lo_.assign(columns_.size(), 0.0);
    hi_.assign(columns_.size(), 1.0);
  }

  SearchResult run() {
    start_ = Clock::now();
    stats_.incumbent_trace.emplace_back(0, 0.0);
    greedy();
    if (!columns_.empty()) {
      add_root_cuts();
      const auto root = lp_->solve(lo_, hi_);
      if (heuristics_ && root.feasible && root.value > target()) {
        root_x_ = root.x;
        dive(lp_->basis());
        rens();
        rins();
      }
      search(nullptr);
    }
    stats_.wall_seconds = seconds_since(start_);
    stats_.proven_optimal = !aborted_;
    return {Selection{best_, best_profit_}, std::move(stats_)};
  }

 private:
  // Full strong branching in the main search: the reliability limits are
  // never reached on the instance sizes this targets, so pseudocosts only
  // order the candidates. Heuristic sub-searches only need good incumbents
  // and strong-branch a few candidates.
  static constexpr int kReliable = 1000000;
  static constexpr std::size_t kMaxStrong = 1000000;
  static constexpr int kLookahead = 1000000;
  static constexpr std::size_t kSubMaxStrong = 8;
  static constexpr int kSubLookahead = 4;
  static constexpr int kGomoryRounds = 1;
  static constexpr int kCutRounds = 300;
  static constexpr int kStallRounds = 60;
  static constexpr std::size_t kMaxCuts = 1500;
  static constexpr double kCutViolation = 1e-4;
  static constexpr std::size_t kGomoryPerRound = 20;
  static constexpr int kMaxRinsRuns = 20;
  static constexpr std::uint64_t kRinsNodes = 200;
  static constexpr std::uint64_t kRensNodes = 1000;

  struct Column {
    std::size_t task;
    std::size_t idx;
  };

  const TaskOption& option(std::size_t c) const {
    return options_.per_task[columns_[c].task][columns_[c].idx];
  }

  bool out_of_budget() {
    if (aborted_) return true;
    if (stats_.nodes >= budget_.max_nodes) aborted_ = true;
    if (seconds_since(start_) >= budget_.max_seconds) aborted_ = true;
    return aborted_;
  }

  // A subtree must be able to exceed this to be worth exploring. With
  // integral profits any improvement is worth at least 1; otherwise the
  // margin absorbs LP rounding, so optimality holds to 1e-9 relative.
  double target() const {
    if (integral_) return best_profit_ + 1.0 - 1e-6;
    return best_profit_ + kDefaultTolerance * std::max(1.0, std::abs(best_profit_));
  }

  void offer(const std::vector<std::optional<std::size_t>>& choice) {
    double profit = 0;
    for (std::size_t i = 0; i < choice.size(); ++i)
      if (choice[i]) profit += options_.per_task[i][*choice[i]].profit;
    if (profit > best_profit_) {
      best_profit_ = profit;
      best_ = choice;
      stats_.incumbent_trace.emplace_back(stats_.nodes, profit);
      fix_by_root();
      rins_pending_ = heuristics_;
    }
  }

  // Capacity row `r` (APs first, then servers) as (column, weight) pairs.
  std::vector<std::pair<std::size_t, int>> capacity_row(std::size_t r) const {
    const std::size_t n_ap = options_.ap_units.size();
    std::vector<std::pair<std::size_t, int>> row;
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      if (hi_[c] == 0.0) continue;
      const TaskOption& o = option(c);
      if (r < n_ap && o.ap == r) row.emplace_back(c, o.m);
      if (r >= n_ap && o.server == r - n_ap) row.emplace_back(c, o.n);
    }
    return row;
  }

  // Most violated cover of one capacity row. A cover picks a threshold t_i
  // for some tasks with sum t_i > capacity; at most |C| - 1 of those tasks
  // can take an option weighing t_i or more. Found exactly by a
  // multiple-choice knapsack over thresholds, then sequentially lifted.
  bool separate_cover(std::size_t r, int capacity, const std::vector<double>& x) {
    const auto row = capacity_row(r);
    const std::size_t n_tasks = options_.per_task.size();
    std::vector<std::vector<std::pair<int, double>>> levels(n_tasks);  // (t, 1 - Y(t))
    for (std::size_t i = 0; i < n_tasks; ++i) {
      std::vector<int> weights;
      for (const auto& [c, w] : row)
        if (columns_[c].task == i) weights.push_back(w);
      std::sort(weights.begin(), weights.end());
      weights.erase(std::unique(weights.begin(), weights.end()), weights.end());
      for (int t : weights) {
        double y = 0;
        for (const auto& [c, w] : row)
          if (columns_[c].task == i && w >= t) y += x[c];
        levels[i].emplace_back(std::min(t, capacity + 1), 1.0 - y);
      }
    }
    const int cap = capacity + 1;
    constexpr double kNone = std::numeric_limits<double>::infinity();
    // dp[i][w]: least cost reaching total weight w (capped) with tasks < i.
    std::vector<std::vector<double>> dp(n_tasks + 1, std::vector<double>(cap + 1, kNone));
    std::vector<std::vector<int>> via(n_tasks + 1, std::vector<int>(cap + 1, -1));
    dp[0][0] = 0;
    for (std::size_t i = 0; i < n_tasks; ++i) {
      for (int w = 0; w <= cap; ++w) {
        if (dp[i][w] == kNone) continue;
        if (dp[i][w] < dp[i + 1][w]) {
          dp[i + 1][w] = dp[i][w];
          via[i + 1][w] = -1;
        }
        for (std::size_t l = 0; l < levels[i].size(); ++l) {
          const int nw = std::min(cap, w + levels[i][l].first);
          const double cost = dp[i][w] + levels[i][l].second;
          if (cost < dp[i + 1][nw] - 1e-12) {
            dp[i + 1][nw] = cost;
            via[i + 1][nw] = int(l);
          }
        }
      }
    }
    if (dp[n_tasks][cap] > 1.0 - kCutViolation) return false;

    std::vector<int> threshold(n_tasks, 0);
    int w = cap, size = 0;
    for (std::size_t i = n_tasks; i-- > 0;) {
      const int l = via[i + 1][w];
      if (l < 0) continue;
      threshold[i] = levels[i][l].first;
      ++size;
      // Recover the predecessor weight; several may match, any is fine.
      for (int pw = 0; pw <= cap; ++pw) {
        if (dp[i][pw] == kNone || std::min(cap, pw + threshold[i]) != w) continue;
        if (std::abs(dp[i][pw] + levels[i][l].second - dp[i + 1][w]) < 1e-9) {
          w = pw;
          break;
        }
      }
    }
    // Start from the cover itself, then lift every other option of the row
    // in order of LP value. Option k gets size - 1 minus the best left-hand
    // side the rest of the row can reach once k takes its weight.
    std::vector<double> pi(row.size(), 0.0);
    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < row.size(); ++k) {
      const int t = threshold[columns_[row[k].first].task];
      if (t > 0 && row[k].second >= t) {
        pi[k] = 1.0;
      } else {
        order.push_back(k);
      }
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[row[a].first] > x[row[b].first]; });
    std::vector<std::vector<std::size_t>> by_task(n_tasks);
    for (std::size_t k = 0; k < row.size(); ++k) by_task[columns_[row[k].first].task].push_back(k);
    for (std::size_t k : order) {
      const std::size_t task = columns_[row[k].first].task;
      const int room = capacity - row[k].second;
      if (room < 0) continue;
      std::vector<double> best(std::size_t(room) + 1, 0.0), next;
      for (std::size_t i = 0; i < n_tasks; ++i) {
        if (i == task) continue;
        next = best;
        for (std::size_t e : by_task[i]) {
          if (pi[e] <= 0) continue;
          for (int r = row[e].second; r <= room; ++r)
            next[std::size_t(r)] = std::max(next[std::size_t(r)], best[std::size_t(r - row[e].second)] + pi[e]);
        }
        best.swap(next);
      }
      pi[k] = std::max(0.0, double(size - 1) - best.back());
    }
    std::vector<std::pair<std::size_t, double>> entries;
    double lhs = 0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (pi[k] <= 0) continue;
      entries.emplace_back(row[k].first, pi[k]);
      lhs += pi[k] * x[row[k].first];
    }
    if (lhs <= size - 1 + kCutViolation) return false;
    lp_->add_row(size - 1, entries, true);
    ++cuts_;
    return true;
  }

  // Cut rounds at the root until the bound stalls: lifted covers of the
  // capacity rows, then Gomory cuts from the optimal tableau.
  void add_root_cuts() {
    const std::size_t n_rows = options_.ap_units.size() + options_.server_units.size();
    double last = std::numeric_limits<double>::infinity();
    int stalled = 0;
    for (int pass = 0; pass < kCutRounds && cuts_ < kMaxCuts && !out_of_budget(); ++pass) {
      const auto lp = lp_->solve(lo_, hi_);
      if (!lp.feasible || lp.value <= target()) break;
      // The LP is degenerate, so a round may move the point without moving
      // the bound; give up only after several such rounds.
      stalled = last - lp.value < 1e-4 * std::max(1.0, lp.value) ? stalled + 1 : 0;
      if (stalled > kStallRounds) break;
      last = std::min(last, lp.value);
      // Columns that cannot be part of an improving solution are dropped
      // for good, which also sharpens the cuts separated below.
      for (std::size_t c = 0; c < columns_.size(); ++c)
        if (lp.reduced[c] < 0 && lp.value + lp.reduced[c] <= target()) hi_[c] = 0.0;
      round(lp.x);
      // Read the tableau before any row changes the basis dimensions. The
      // heuristic sub-searches skip Gomory cuts; their dense rows cost more
      // than they save on small subproblems.
      std::vector<detail::BoundedLp::Cut> gomory;
      if (heuristics_ && pass < kGomoryRounds) gomory = lp_->gomory_cuts(kGomoryPerRound, 0.01);
      bool added = false;
      for (std::size_t r = 0; r < n_rows && cuts_ < kMaxCuts; ++r) {
        const int capacity = r < options_.ap_units.size()
                                 ? options_.ap_units[r]
                                 : options_.server_units[r - options_.ap_units.size()];
        added = separate_cover(r, capacity, lp.x) || added;
      }
      for (const auto& cut : gomory) {
        if (cuts_ >= kMaxCuts) break;
        lp_->add_row(cut.rhs, cut.entries, false);
        ++cuts_;
        added = true;
      }
      if (!added) break;
    }
  }

  // Fills tasks in non-increasing profit order with their smallest-footprint
  // fitting option.
  void greedy() {
    std::vector<std::size_t> order(options_.per_task.size());
    std::iota(order.begin(), order.end(), 0);
    auto top = [&](std::size_t i) {
      return options_.per_task[i].empty() ? 0.0 : options_.per_task[i].front().profit;
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return top(a) > top(b); });
    std::vector<double> score(columns_.size());
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      const TaskOption& o = option(c);
      score[c] = -(double(o.m) / options_.ap_units[o.ap] +
                   double(o.n) / options_.server_units[o.server]);
    }
    complete(order, score);
  }

  // Keeps the fixings, then visits tasks in `order`, giving each its
  // highest-scoring option that still fits.
  void complete(const std::vector<std::size_t>& order, const std::vector<double>& score) {
    std::vector<int> ap = ap_used_, srv = server_used_;
    std::vector<std::optional<std::size_t>> choice(options_.per_task.size());
    for (std::size_t c = 0; c < columns_.size(); ++c)
      if (lo_[c] == 1.0) choice[columns_[c].task] = columns_[c].idx;
    for (std::size_t i : order) {
      if (choice[i]) continue;
      std::optional<std::size_t> pick;
      for (std::size_t c = first_[i]; c < first_[i + 1]; ++c) {
        if (hi_[c] == 0.0) continue;
        const TaskOption& o = option(c);
        if (ap[o.ap] + o.m > options_.ap_units[o.ap] ||
            srv[o.server] + o.n > options_.server_units[o.server])
          continue;
        if (!pick || score[c] > score[*pick]) pick = c;
      }
      if (!pick) continue;
      const TaskOption& o = option(*pick);
      ap[o.ap] += o.m;
      srv[o.server] += o.n;
      choice[i] = columns_[*pick].idx;
    }
    offer(choice);
  }

  // Rounds an LP solution: tasks by their largest LP value, each taking its
  // fitting option with the largest LP value.
  void round(const std::vector<double>& x) {
    std::vector<std::size_t> order(options_.per_task.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> weight(order.size(), 0.0);
    for (std::size_t c = 0; c < columns_.size(); ++c)
      weight[columns_[c].task] = std::max(weight[columns_[c].task], x[c]);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return weight[a] > weight[b];
    });
    complete(order, x);
  }

  // Fractional diving: repeatedly takes the open option closest to 1,
  // re-solving the LP from the previous basis, until the LP is integral or
  // can no longer beat the incumbent.
  void dive(detail::BoundedLp::Basis basis) {
    std::vector<Undo> undos;
    for (std::size_t step = 0; step < options_.per_task.size() && !out_of_budget(); ++step) {
      const auto lp = lp_->solve(lo_, hi_, &basis);
      if (!lp.feasible || lp.value <= target()) break;
      basis = lp_->basis();
      round(lp.x);
      std::optional<std::size_t> pick;
      for (std::size_t c = 0; c < columns_.size(); ++c) {
        if (lp.x[c] <= 1e-6 || lp.x[c] >= 1 - 1e-6) continue;
        if (!pick || lp.x[c] > lp.x[*pick]) pick = c;
      }
      if (!pick) {
        std::vector<std::optional<std::size_t>> choice(options_.per_task.size());
        for (std::size_t c = 0; c < columns_.size(); ++c)
          if (lp.x[c] > 0.5) choice[columns_[c].task] = columns_[c].idx;
        offer(choice);
        break;
      }
      Side side;
      side.one = *pick;
      if (!applicable(side)) side = Side{{*pick}, std::nullopt};
      undos.push_back(apply(side));
    }
    for (auto it = undos.rbegin(); it != undos.rend(); ++it) revert(*it);
  }

  // Relaxation-enforced neighbourhood: each task may only take options the
  // root LP uses.
  void rens() {
    OptionSet sub;
    sub.ap_units = options_.ap_units;
    sub.server_units = options_.server_units;
    std::vector<std::vector<std::size_t>> kept(options_.per_task.size());
    for (std::size_t i = 0; i < options_.per_task.size(); ++i) {
      sub.per_task.emplace_back();
      for (std::size_t c = first_[i]; c < first_[i + 1]; ++c) {
        if (root_x_[c] <= 1e-6) continue;
        sub.per_task.back().push_back(option(c));
        kept[i].push_back(columns_[c].idx);
      }
    }
    SearchBudget budget;
    budget.max_nodes = kRensNodes;
    budget.max_seconds = std::max(0.0, budget_.max_seconds - seconds_since(start_));
    const SearchResult r = BranchAndBound(sub, budget, false).run();
    std::vector<std::optional<std::size_t>> choice(options_.per_task.size());
    for (std::size_t i = 0; i < choice.size(); ++i)
      if (r.selection.choice[i]) choice[i] = kept[i][*r.selection.choice[i]];
    offer(choice);
  }

  // Relaxation-induced neighbourhood: tasks on which the root LP and the
  // incumbent agree keep the incumbent's choice, and a small nested search
  // re-optimizes the rest under the capacity they leave.
  void rins() {
    rins_pending_ = false;
    if (root_x_.empty() || rins_runs_ >= kMaxRinsRuns) return;
    ++rins_runs_;
    const std::size_t n_tasks = options_.per_task.size();
    OptionSet sub;
    sub.ap_units = options_.ap_units;
    sub.server_units = options_.server_units;
    std::vector<std::size_t> free_tasks;
    double fixed_profit = 0;
    for (std::size_t i = 0; i < n_tasks; ++i) {
      bool agree = true;
      for (std::size_t c = first_[i]; c < first_[i + 1]; ++c) {
        const bool chosen = best_[i] && *best_[i] == columns_[c].idx;
        if (std::abs(root_x_[c] - (chosen ? 1.0 : 0.0)) > 1e-6) agree = false;
      }
      if (!agree) {
        free_tasks.push_back(i);
        sub.per_task.push_back(options_.per_task[i]);
      } else if (best_[i]) {
        const TaskOption& o = options_.per_task[i][*best_[i]];
        sub.ap_units[o.ap] -= o.m;
        sub.server_units[o.server] -= o.n;
        fixed_profit += o.profit;
      }
    }
    if (free_tasks.empty()) return;
    SearchBudget budget;
    budget.max_nodes = kRinsNodes;
    budget.max_seconds = std::max(0.0, budget_.max_seconds - seconds_since(start_));
    const SearchResult r = BranchAndBound(sub, budget, false).run();
    if (fixed_profit + r.selection.profit <= best_profit_) return;
    std::vector<std::optional<std::size_t>> choice = best_;
    for (std::size_t k = 0; k < free_tasks.size(); ++k) choice[free_tasks[k]] = r.selection.choice[k];
    offer(choice);
  }

  // One side of a branch: columns forced to 0 and at most one forced to 1.
  struct Side {
    std::vector<std::size_t> zero;
    std::optional<std::size_t> one;
  };

  struct Undo {
    std::vector<std::pair<std::size_t, double>> hi;
    std::optional<std::size_t> one;
  };

  bool applicable(const Side& side) const {
    if (!side.one) return true;
    const TaskOption& o = option(*side.one);
    return ap_used_[o.ap] + o.m <= options_.ap_units[o.ap] &&
           server_used_[o.server] + o.n <= options_.server_units[o.server];
  }

  Undo apply(const Side& side) {
    Undo undo;
    auto zero = [&](std::size_t c) {
      undo.hi.emplace_back(c, hi_[c]);
      hi_[c] = 0.0;
    };
    for (std::size_t c : side.zero) zero(c);
    if (side.one) {
      const std::size_t c = *side.one, task = columns_[c].task;
      for (std::size_t s = first_[task]; s < first_[task + 1]; ++s)
        if (s != c) zero(s);
      const TaskOption& o = option(c);
      lo_[c] = 1.0;
      ap_used_[o.ap] += o.m;
      server_used_[o.server] += o.n;
      undo.one = c;
    }
    return undo;
  }

  void revert(const Undo& undo) {
    if (undo.one) {
      const TaskOption& o = option(*undo.one);
      ap_used_[o.ap] -= o.m;
      server_used_[o.server] -= o.n;
      lo_[*undo.one] = 0.0;
    }
    for (auto it = undo.hi.rbegin(); it != undo.hi.rend(); ++it) hi_[it->first] = it->second;
  }

  double side_value(const Side& side, const detail::BoundedLp::Basis& basis) {
    if (!applicable(side)) return -std::numeric_limits<double>::infinity();
    const Undo undo = apply(side);
    const auto r = lp_->solve(lo_, hi_, &basis);
    revert(undo);
    return r.feasible ? r.value : -std::numeric_limits<double>::infinity();
  }

  struct Candidate {
    Side left, right;
    double left_mass = 0, right_mass = 0;  // LP mass each side cuts away
    std::uint64_t key = 0;                 // identifies the dichotomy across nodes
  };

  // Per-unit-mass bound degradations seen so far for one dichotomy.
  struct Pseudocost {
    double left = 0, right = 0;
    int left_count = 0, right_count = 0;
  };

  // Dichotomies of one task's open options: a single option taken or
  // forbidden, or the options split by AP, by server or by bandwidth. Every
  // solution survives in at least one side.
  void task_candidates(std::size_t task, const std::vector<double>& x,
                       std::vector<Candidate>& out) const {
    std::vector<std::size_t> open;
    double mass = 0;
    for (std::size_t c = first_[task]; c < first_[task + 1]; ++c) {
      if (hi_[c] == 0.0) continue;
      open.push_back(c);
      mass += x[c];
    }
    auto key = [&](std::uint64_t kind, std::uint64_t param) {
      return ((std::uint64_t(task) * 4 + kind) << 32) | param;
    };
    auto split = [&](std::uint64_t k, auto&& in_left) {
      Candidate cand;
      cand.key = k;
      double left = 0;
      for (std::size_t c : open) {
        if (in_left(c)) {
          cand.right.zero.push_back(c);
          left += x[c];
        } else {
          cand.left.zero.push_back(c);
        }
      }
      if (cand.left.zero.empty() || cand.right.zero.empty()) return;
      cand.left_mass = mass - left;
      cand.right_mass = left;
      if (std::min(left, mass - left) > 1e-6) out.push_back(std::move(cand));
    };
    for (std::size_t c : open) {
      if (x[c] <= 1e-6 || x[c] >= 1 - 1e-6) continue;
      Candidate cand;
      cand.left.one = c;
      cand.right.zero = {c};
      cand.left_mass = 1 - x[c];
      cand.right_mass = x[c];
      cand.key = key(0, c);
      out.push_back(std::move(cand));
    }
    for (std::size_t j = 0; j < options_.ap_units.size(); ++j)
      split(key(1, j), [&](std::size_t c) { return option(c).ap == j; });
    for (std::size_t k = 0; k < options_.server_units.size(); ++k)
      split(key(2, k), [&](std::size_t c) { return option(c).server == k; });
    std::vector<int> widths;
    for (std::size_t c : open)
      if (x[c] > 1e-6) widths.push_back(option(c).m);
    std::sort(widths.begin(), widths.end());
    widths.erase(std::unique(widths.begin(), widths.end()), widths.end());
    for (std::size_t w = 0; w + 1 < widths.size(); ++w)
      split(key(3, std::uint64_t(widths[w])), [&](std::size_t c) { return option(c).m <= widths[w]; });
  }

  void search(const detail::BoundedLp::Basis* parent) {
    ++stats_.nodes;
    if (out_of_budget()) return;
    if (rins_pending_) rins();
    const auto lp = lp_->solve(lo_, hi_, parent);
    if (!lp.feasible || lp.value <= target()) return;

    const auto basis = lp_->basis();
    round(lp.x);
    if (lp.value <= target()) return;
    if (stats_.nodes == 1) {
      root_value_ = lp.value;
      root_reduced_ = lp.reduced;
      fix_by_root();
    }

    // Reduced-cost fixing: moving column c off its bound costs at least
    // |d_c|, so it stays put whenever that alone sinks the bound.
    Side fixed;
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      const double d = lp.reduced[c];
      if (lo_[c] == hi_[c] || lp.value - std::abs(d) > target()) continue;
      if (lp.x[c] == 0.0 && d < 0) fixed.zero.push_back(c);
      if (lp.x[c] == 1.0 && d > 0 && lo_[c] == 0.0 && !fixed.one) fixed.one = c;
    }
    if (fixed.one && !applicable(fixed)) fixed.one.reset();
    const Undo fixings = apply(fixed);
    branch(lp, basis);
    revert(fixings);
  }

  // Root reduced costs stay valid everywhere, so they fix columns for good
  // each time the incumbent improves.
  void fix_by_root() {
    if (root_reduced_.empty()) return;
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      const double d = root_reduced_[c];
      if (d < 0 && lo_[c] == 0.0 && root_value_ + d <= target()) hi_[c] = 0.0;
    }
  }

  void branch(const detail::BoundedLp::Result& lp, const detail::BoundedLp::Basis& basis) {
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < options_.per_task.size(); ++i) task_candidates(i, lp.x, candidates);
    if (candidates.empty()) {
      std::vector<std::optional<std::size_t>> choice(options_.per_task.size());
      for (std::size_t c = 0; c < columns_.size(); ++c)
        if (lp.x[c] > 0.5) choice[columns_[c].task] = columns_[c].idx;
      offer(choice);
      return;
    }

    // Reliability branching: candidates whose pseudocosts rest on too few
    // observations are strong branched, in order of estimated score, until a
    // run of them fails to improve the best score.
    constexpr double kNoValue = std::numeric_limits<double>::infinity();
    auto score = [&](double left, double right) {
      return std::max(lp.value - left, 1e-6) * std::max(lp.value - right, 1e-6);
    };
    auto estimate = [&](const Candidate& cand, bool left) {
      const auto it = pseudocosts_.find(cand.key);
      const double mass = left ? cand.left_mass : cand.right_mass;
      double unit = left ? mean_left_ : mean_right_;
      if (it != pseudocosts_.end()) {
        const Pseudocost& pc = it->second;
        if (left && pc.left_count > 0) unit = pc.left / pc.left_count;
        if (!left && pc.right_count > 0) unit = pc.right / pc.right_count;
      }
      return lp.value - unit * mass;
    };
    auto reliable = [&](const Candidate& cand) {
      const auto it = pseudocosts_.find(cand.key);
      return it != pseudocosts_.end() && it->second.left_count >= kReliable &&
             it->second.right_count >= kReliable;
    };
    auto observe = [&](const Candidate& cand, double left, double right) {
      Pseudocost& pc = pseudocosts_[cand.key];
      if (left > -kNoValue && cand.left_mass > 1e-9) {
        const double unit = (lp.value - left) / cand.left_mass;
        pc.left += unit;
        ++pc.left_count;
        mean_left_ += (unit - mean_left_) / double(++left_observations_);
      }
      if (right > -kNoValue && cand.right_mass > 1e-9) {
        const double unit = (lp.value - right) / cand.right_mass;
        pc.right += unit;
        ++pc.right_count;
        mean_right_ += (unit - mean_right_) / double(++right_observations_);
      }
    };

    std::vector<double> estimated(candidates.size());
    std::vector<std::size_t> order(candidates.size());
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      estimated[k] = score(estimate(candidates[k], true), estimate(candidates[k], false));
      order[k] = k;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return estimated[a] > estimated[b]; });
    const std::size_t max_strong = heuristics_ ? kMaxStrong : kSubMaxStrong;
    const int lookahead = heuristics_ ? kLookahead : kSubLookahead;
    std::size_t pick = order.front(), strong = 0;
    double pick_left = kNoValue, pick_right = kNoValue, best_score = -1;
    int stale = 0;
    for (std::size_t k : order) {
      const Candidate& cand = candidates[k];
      if (reliable(cand) || strong >= max_strong || stale >= lookahead) {
        if (estimated[k] > best_score) {
          best_score = estimated[k];
          pick = k;
          pick_left = pick_right = kNoValue;
        }
        continue;
      }
      ++strong;
      const double left = side_value(cand.left, basis);
      const double right = side_value(cand.right, basis);
      observe(cand, left, right);
      const double sc = score(left, right);
      if (sc > best_score) {
        best_score = sc;
        pick = k;
        pick_left = left;
        pick_right = right;
        stale = 0;
      } else {
        ++stale;
      }
      if (left <= target() || right <= target()) {
        // One side is already closed; nothing branches better.
        pick = k;
        pick_left = left;
        pick_right = right;
        break;
      }
    }
    if (pick_left == kNoValue) {
      pick_left = estimate(candidates[pick], true);
      pick_right = estimate(candidates[pick], false);
      // Estimates only order the children; neither side may be skipped.
      const bool left_first = pick_left >= pick_right;
      pick_left = left_first ? kNoValue : std::nextafter(kNoValue, 0.0);
      pick_right = left_first ? std::nextafter(kNoValue, 0.0) : kNoValue;
    }

    const Candidate& cand = candidates[pick];
    auto visit = [&](const Side& side, double value) {
      if (aborted_ || value <= target()) return;
      const Undo undo = apply(side);
      search(&basis);
      revert(undo);
    };
    if (pick_left >= pick_right) {
      visit(cand.left, pick_left);
      visit(cand.right, pick_right);
    } else {
      visit(cand.right, pick_right);
      visit(cand.left, pick_left);
    }
  }

  const OptionSet& options_;
  SearchBudget budget_;
  bool heuristics_;
  std::vector<Column> columns_;
  std::vector<std::size_t> first_;  // first column of each task; one past the end last
  std::optional<detail::BoundedLp> lp_;
  std::vector<double> lo_, hi_;
  std::vector<int> ap_used_, server_used_;
  std::vector<std::optional<std::size_t>> best_;
  double best_profit_ = 0;
  bool integral_ = true;
  SearchStats stats_;
  Clock::time_point start_;
  bool aborted_ = false;
  std::size_t cuts_ = 0;
  double root_value_ = 0;
  std::vector<double> root_reduced_;
  std::unordered_map<std::uint64_t, Pseudocost> pseudocosts_;
  double mean_left_ = 1, mean_right_ = 1;
  std::uint64_t left_observations_ = 0, right_observations_ = 0;
  std::vector<double> root_x_;
  bool rins_pending_ = false;
  int rins_runs_ = 0;
};

}  // namespace

OptionSet enumerate_options(const Instance& instance, const ldm::DiscretizationConfig& cfg,
                            bool remove_dominated) {
  const auto tasks = instance.tasks();
  const auto aps = instance.aps();
  const auto servers = instance.servers();
  const auto& topo = instance.topology();

  OptionSet set;
  set.ap_units.resize(aps.size());
  set.server_units.resize(servers.size());
  for (std::size_t j = 0; j < aps.size(); ++j)
    set.ap_units[j] = ldm::unit_count(aps[j].bandwidth_capacity, cfg.b_unit);
  for (std::size_t k = 0; k < servers.size(); ++k)
    set.server_units[k] = ldm::unit_count(servers[k].compute_capacity, cfg.c_unit);
  set.per_task.resize(tasks.size());

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& t = tasks[i];
    const double limit = t.deadline * (1.0 + kDefaultTolerance);
    for (std::size_t j : instance.reachable_ap_indices(i)) {
      for (std::size_t k = 0; k < servers.size(); ++k) {
        const double delay = topo.delay(j, k);
        if (!(t.deadline - 2.0 * delay > 0)) continue;
        int prev_n = set.server_units[k] + 1;
        for (int m = 1; m <= set.ap_units[j]; ++m) {
          // Smallest compute grant that meets the deadline with m bandwidth units.
          int n_min = 0;
          for (int n = 1; n <= set.server_units[k]; ++n) {
            if (completion_time(t, delay, m * cfg.b_unit, n * cfg.c_unit) <= limit) {
              n_min = n;
              break;
            }
          }
          if (n_min == 0) continue;
          if (remove_dominated) {
            if (n_min < prev_n) set.per_task[i].push_back({i, j, k, m, n_min, t.profit});
            prev_n = std::min(prev_n, n_min);
          } else {
            for (int n = n_min; n <= set.server_units[k]; ++n)
              set.per_task[i].push_back({i, j, k, m, n, t.profit});
          }
        }
      }
    }
  }
  return set;
}

bool fits(const OptionSet& options, const Selection& selection) {
  std::vector<long> ap_used(options.ap_units.size(), 0), server_used(options.server_units.size(), 0);
  for (std::size_t i = 0; i < selection.choice.size(); ++i) {
    if (!selection.choice[i]) continue;
    const TaskOption& o = options.per_task.at(i).at(*selection.choice[i]);
    ap_used[o.ap] += o.m;
    server_used[o.server] += o.n;
  }
  for (std::size_t j = 0; j < ap_used.size(); ++j)
    if (ap_used[j] > options.ap_units[j]) return false;
  for (std::size_t k = 0; k < server_used.size(); ++k)
    if (server_used[k] > options.server_units[k]) return false;
  return true;
}

SearchResult branch_and_bound(const OptionSet& options, const SearchBudget& budget) {
  return BranchAndBound(options, budget).run();
}

Selection brute_force(const OptionSet& options, double cap) {
  double space = 1;
  for (const auto& opts : options.per_task) space *= double(opts.size() + 1);
  if (space > cap)
    throw OracleRefused("brute force search space " + std::to_string(space) +
                        " exceeds cap " + std::to_string(cap));

  const std::size_t n = options.per_task.size();
  std::vector<int> ap_left = options.ap_units, server_left = options.server_units;
  std::vector<std::optional<std::size_t>> current(n);
  Selection best{current, 0.0};

  // Plain recursion over every task's choices; a prefix that already exceeds
  // a capacity has no feasible completion and is not expanded.
  auto visit = [&](auto&& self, std::size_t i, double profit) -> void {
    if (i == n) {
      if (profit > best.profit) best = {current, profit};
      return;
    }
    self(self, i + 1, profit);
    const auto& opts = options.per_task[i];
    for (std::size_t idx = 0; idx < opts.size(); ++idx) {
      const TaskOption& o = opts[idx];
      if (ap_left[o.ap] < o.m || server_left[o.server] < o.n) continue;
      ap_left[o.ap] -= o.m;
      server_left[o.server] -= o.n;
      current[i] = idx;
      self(self, i + 1, profit + o.profit);
      current[i].reset();
      ap_left[o.ap] += o.m;
      server_left[o.server] += o.n;
    }
  };
  visit(visit, 0, 0.0);
  return best;
}

ldm::Valuation to_valuation(const ldm::IlpModel& model, const OptionSet& options,
                            const Selection& selection) {
  ldm::Valuation values(model.variables().size(), 0);
  auto set = [&](std::optional<std::size_t> var, const char* what, std::size_t task) {
    if (!var)
      throw ldm::ConsistencyError(std::string("selected option of task index ") +
                                  std::to_string(task) + " has no " + what + " variable");
    values[*var] = 1;
  };
  for (std::size_t i = 0; i < selection.choice.size(); ++i) {
    if (!selection.choice[i]) continue;
    const TaskOption& o = options.per_task.at(i).at(*selection.choice[i]);
    set(model.find_x(i, o.ap, o.m), "x", i);
    set(model.find_y(i, o.server, o.n), "y", i);
    set(model.find_z(i, o.ap, o.server), "z", i);
  }
  return values;
}

LdmResult solve_ldm(const Instance& instance, const ldm::DiscretizationConfig& cfg,
                    const LdmSettings& settings) {
  ldm::IlpModel model = ldm::discretize(instance, cfg);
  if (settings.prune) model = ldm::prune(model, instance, cfg);
  const OptionSet options = enumerate_options(instance, cfg, settings.remove_dominated);

  SearchResult result;
  if (settings.method == ExactMethod::brute_force) {
    const auto start = Clock::now();
    result.selection = brute_force(options, settings.brute_force_cap);
    result.stats.wall_seconds = seconds_since(start);
    result.stats.proven_optimal = true;
    result.stats.incumbent_trace.emplace_back(0, result.selection.profit);
  } else {
    result = branch_and_bound(options, settings.budget);
  }

  const ldm::Valuation values = to_valuation(model, options, result.selection);
  if (!model.satisfies(values))
    throw ldm::ConsistencyError("selected options violate a model row");
  return {ldm::extract_solution(instance, cfg, model, values), std::move(result.stats),
          model.stats()};
}

}  // namespace edgealloc::solver
