#pragma once

// Small dense-basis primal simplex for
//
//   max c.x  s.t.  A x <= b,  lo <= x <= hi
//
// with finite column bounds, non-negative costs and a sparse A. A cold solve
// starts from the slack basis with every column at its lower bound when that
// is primal feasible, and otherwise from the dual feasible slack basis with
// every paying column at its upper bound, running a dual phase first. A warm
// solve restarts the dual phase from an
// earlier optimal basis, which is what branch and bound wants after
// tightening a few bounds. Sized for a few hundred rows and a few thousand
// columns.

#include <cstddef>
#include <utility>
#include <vector>

namespace edgealloc::solver::detail {

struct SparseColumn {
  double cost = 0;
  std::vector<std::size_t> rows;
  std::vector<double> coefs;
};

class BoundedLp {
 public:
  BoundedLp(std::vector<double> rhs, std::vector<SparseColumn> columns);

  struct Result {
    bool feasible = false;
    double value = 0;
    std::vector<double> x;
    std::vector<double> reduced;  // per column; 0 for basic columns
  };

  struct Basis {
    std::vector<std::size_t> head;
    std::vector<int> where;
    std::vector<double> binv;
  };

  /// Rows from the constructor count as having integral slacks.
  /// Falls back to a cold start when `warm` is null, was taken before rows
  /// were added, or is not dual feasible under the new bounds.
  Result solve(const std::vector<double>& lo, const std::vector<double>& hi,
               const Basis* warm = nullptr);

  /// The final basis of the last feasible solve.
  Basis basis() const { return {head_, where_, binv_}; }

  using Row = std::vector<std::pair<std::size_t, double>>;

  /// Appends the row sum coef * x[col] <= rhs. `integral_slack` promises the
  /// slack is integer at every integer point, which Gomory cuts exploit.
  void add_row(double rhs, const Row& entries, bool integral_slack);

  struct Cut {
    Row entries;
    double rhs = 0;
  };

  /// Gomory mixed-integer cuts read off the tableau rows of the last optimal
  /// basis, treating every column and every integral slack as integer. Only
  /// rows whose basic value is at least `min_fraction` from an integer are
  /// used. Each cut is violated by the last solution.
  std::vector<Cut> gomory_cuts(std::size_t max_cuts, double min_fraction);

  std::size_t rows() const { return rhs_.size(); }
  std::size_t columns() const { return columns_.size(); }

 private:
  void reinvert();
  void recompute_basic_values();
  void compute_duals(std::vector<double>& y) const;
  double reduced_cost(std::size_t v, const std::vector<double>& y) const;
  void pivot(std::size_t leave, std::size_t enter, const std::vector<double>& alpha);
  bool cold_start(bool at_upper);
  Result cold_solve();
  bool warm_start(const Basis& warm);
  enum class Status { optimal, infeasible, stalled };
  Status dual_phase();
  void primal_phase();
  Result result() const;

  std::vector<double> rhs_;
  std::vector<SparseColumn> columns_;
  std::vector<bool> row_integral_;

  // Per-solve state. Variables 0..n-1 are columns, n..n+m-1 slacks.
  std::vector<std::size_t> head_;  // basic variable per row
  std::vector<int> where_;         // row if basic, -1 at lower, -2 at upper
  std::vector<double> value_;
  std::vector<double> lo_, hi_;
  std::vector<double> binv_;  // row-major m x m
  int since_reinvert_ = 0;
};

}  // namespace edgealloc::solver::detail
