#include "bounded_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace edgealloc::solver::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kPrimalTol = 1e-9;
constexpr int kAtLower = -1;
constexpr int kAtUpper = -2;
constexpr int kReinvertEvery = 64;

// Raised mid-solve when the basis degrades; a warm solve then retries cold.
struct NumericalTrouble : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace

BoundedLp::BoundedLp(std::vector<double> rhs, std::vector<SparseColumn> columns)
    : rhs_(std::move(rhs)), columns_(std::move(columns)), row_integral_(rhs_.size(), true) {}

void BoundedLp::add_row(double rhs, const Row& entries, bool integral_slack) {
  const std::size_t row = rhs_.size();
  rhs_.push_back(rhs);
  row_integral_.push_back(integral_slack);
  for (const auto& [col, coef] : entries) {
    columns_[col].rows.push_back(row);
    columns_[col].coefs.push_back(coef);
  }
}

void BoundedLp::reinvert() {
  const std::size_t m = rhs_.size(), n = columns_.size();
  std::vector<double> b(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t v = head_[i];
    if (v >= n) {
      b[(v - n) * m + i] = 1.0;
    } else {
      const auto& col = columns_[v];
      for (std::size_t t = 0; t < col.rows.size(); ++t) b[col.rows[t] * m + i] = col.coefs[t];
    }
  }
  // Gauss-Jordan with partial pivoting on [B | I].
  binv_.assign(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) binv_[i * m + i] = 1.0;
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < m; ++r)
      if (std::abs(b[r * m + c]) > std::abs(b[p * m + c])) p = r;
    if (std::abs(b[p * m + c]) < 1e-12) throw NumericalTrouble("simplex basis became singular");
    if (p != c) {
      for (std::size_t k = 0; k < m; ++k) {
        std::swap(b[p * m + k], b[c * m + k]);
        std::swap(binv_[p * m + k], binv_[c * m + k]);
      }
    }
    const double piv = b[c * m + c];
    for (std::size_t k = 0; k < m; ++k) {
      b[c * m + k] /= piv;
      binv_[c * m + k] /= piv;
    }
    for (std::size_t r = 0; r < m; ++r) {
      if (r == c) continue;
      const double f = b[r * m + c];
      if (f == 0) continue;
      for (std::size_t k = 0; k < m; ++k) {
        b[r * m + k] -= f * b[c * m + k];
        binv_[r * m + k] -= f * binv_[c * m + k];
      }
    }
  }
  since_reinvert_ = 0;
}

void BoundedLp::recompute_basic_values() {
  const std::size_t m = rhs_.size(), n = columns_.size();
  std::vector<double> w = rhs_;
  for (std::size_t v = 0; v < n; ++v) {
    if (where_[v] >= 0 || value_[v] == 0) continue;
    const auto& col = columns_[v];
    for (std::size_t t = 0; t < col.rows.size(); ++t) w[col.rows[t]] -= col.coefs[t] * value_[v];
  }
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0;
    for (std::size_t k = 0; k < m; ++k) s += binv_[i * m + k] * w[k];
    value_[head_[i]] = s;
  }
}

void BoundedLp::compute_duals(std::vector<double>& y) const {
  const std::size_t m = rhs_.size(), n = columns_.size();
  y.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t v = head_[i];
    if (v >= n || columns_[v].cost == 0) continue;
    const double c = columns_[v].cost;
    for (std::size_t k = 0; k < m; ++k) y[k] += c * binv_[i * m + k];
  }
}

double BoundedLp::reduced_cost(std::size_t v, const std::vector<double>& y) const {
  const std::size_t n = columns_.size();
  if (v >= n) return -y[v - n];
  const auto& col = columns_[v];
  double d = col.cost;
  for (std::size_t t = 0; t < col.rows.size(); ++t) d -= col.coefs[t] * y[col.rows[t]];
  return d;
}

// Basic values must already reflect the entering variable's new value.
void BoundedLp::pivot(std::size_t leave, std::size_t enter, const std::vector<double>& alpha) {
  const std::size_t m = rhs_.size();
  head_[leave] = enter;
  where_[enter] = int(leave);
  const double piv = alpha[leave];
  for (std::size_t k = 0; k < m; ++k) binv_[leave * m + k] /= piv;
  for (std::size_t i = 0; i < m; ++i) {
    if (i == leave || alpha[i] == 0) continue;
    const double f = alpha[i];
    for (std::size_t k = 0; k < m; ++k) binv_[i * m + k] -= f * binv_[leave * m + k];
  }
  if (++since_reinvert_ >= kReinvertEvery) {
    reinvert();
    recompute_basic_values();
  }
}

bool BoundedLp::cold_start(bool at_upper) {
  const std::size_t m = rhs_.size(), n = columns_.size();
  where_.assign(n + m, kAtLower);
  value_.assign(n + m, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    if (at_upper && columns_[v].cost > 0) where_[v] = kAtUpper;
    value_[v] = where_[v] == kAtUpper ? hi_[v] : lo_[v];
  }
  head_.resize(m);
  binv_.assign(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    head_[i] = n + i;
    where_[n + i] = int(i);
    binv_[i * m + i] = 1.0;
  }
  since_reinvert_ = 0;
  recompute_basic_values();
  for (std::size_t i = 0; i < m; ++i)
    if (value_[n + i] < -kPrimalTol) return false;
  return true;
}

bool BoundedLp::warm_start(const Basis& warm) {
  const std::size_t m = rhs_.size(), n = columns_.size();
  if (warm.head.size() != m || warm.where.size() != n + m || warm.binv.size() != m * m) return false;
  head_ = warm.head;
  where_ = warm.where;
  binv_ = warm.binv;
  value_.assign(n + m, 0.0);
  std::vector<double> y;
  compute_duals(y);
  for (std::size_t v = 0; v < n + m; ++v) {
    if (where_[v] >= 0) continue;
    if (lo_[v] == hi_[v]) {
      value_[v] = lo_[v];
      continue;
    }
    const double d = reduced_cost(v, y);
    // Nonbasic columns sit at whichever bound their reduced cost favours.
    if (d > kDualTol) {
      if (hi_[v] == kInf) return false;
      where_[v] = kAtUpper;
    } else if (d < -kDualTol) {
      where_[v] = kAtLower;
    }
    value_[v] = where_[v] == kAtUpper ? hi_[v] : lo_[v];
  }
  recompute_basic_values();
  return true;
}

BoundedLp::Status BoundedLp::dual_phase() {
  const std::size_t m = rhs_.size(), n = columns_.size();
  std::vector<double> y, rho(m), alpha(m);
  const std::size_t max_iterations = 50 * (n + m) + 1000;
  int degenerate = 0;
  for (std::size_t iter = 0; iter <= max_iterations; ++iter) {
    // Largest infeasibility first; Bland's rule (smallest index) after a run
    // of degenerate pivots, which rules out cycling.
    const bool bland = degenerate > 50;
    std::size_t r = m;
    double worst = kPrimalTol;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t v = head_[i];
      const double excess = std::max(lo_[v] - value_[v], value_[v] - hi_[v]);
      if (excess <= kPrimalTol) continue;
      if (bland ? (r == m || v < head_[r]) : excess > worst) {
        worst = excess;
        r = i;
      }
    }
    if (r == m) return Status::optimal;

    const std::size_t out = head_[r];
    const bool below = value_[out] < lo_[out];
    for (std::size_t k = 0; k < m; ++k) rho[k] = binv_[r * m + k];
    compute_duals(y);

    std::size_t q = n + m;
    double best_ratio = kInf, best_alpha = 0;
    for (std::size_t v = 0; v < n + m; ++v) {
      if (where_[v] >= 0 || lo_[v] == hi_[v]) continue;
      double a;
      if (v >= n) {
        a = rho[v - n];
      } else {
        a = 0;
        const auto& col = columns_[v];
        for (std::size_t t = 0; t < col.rows.size(); ++t) a += rho[col.rows[t]] * col.coefs[t];
      }
      const bool up = where_[v] == kAtLower;
      // The leaving variable moves by -a per unit of v.
      const bool eligible = below ? (up ? a < -kPivotTol : a > kPivotTol)
                                  : (up ? a > kPivotTol : a < -kPivotTol);
      if (!eligible) continue;
      const double ratio = std::abs(reduced_cost(v, y)) / std::abs(a);
      if (ratio < best_ratio - 1e-12 ||
          (!bland && ratio <= best_ratio + 1e-12 && std::abs(a) > best_alpha)) {
        best_ratio = ratio;
        best_alpha = std::abs(a);
        q = v;
      }
    }
    if (q == n + m) return Status::infeasible;
    degenerate = best_ratio < 1e-12 ? degenerate + 1 : 0;

    for (std::size_t i = 0; i < m; ++i) alpha[i] = 0;
    if (q < n) {
      const auto& col = columns_[q];
      for (std::size_t t = 0; t < col.rows.size(); ++t)
        for (std::size_t i = 0; i < m; ++i) alpha[i] += binv_[i * m + col.rows[t]] * col.coefs[t];
    } else {
      for (std::size_t i = 0; i < m; ++i) alpha[i] = binv_[i * m + (q - n)];
    }
    const double target = below ? lo_[out] : hi_[out];
    const double step = (value_[out] - target) / alpha[r];
    value_[q] += step;
    for (std::size_t i = 0; i < m; ++i) value_[head_[i]] -= step * alpha[i];
    where_[out] = below ? kAtLower : kAtUpper;
    value_[out] = target;
    pivot(r, q, alpha);
  }
  return Status::stalled;
}

void BoundedLp::primal_phase() {
  const std::size_t m = rhs_.size(), n = columns_.size();
  std::vector<double> y(m), alpha(m);
  int degenerate = 0;
  const std::size_t max_iterations = 50 * (n + m) + 1000;

  for (std::size_t iter = 0;; ++iter) {
    if (iter > max_iterations) throw NumericalTrouble("simplex iteration limit reached");
    compute_duals(y);

    // Dantzig pricing; Bland's rule after a run of degenerate pivots.
    const bool bland = degenerate > 30;
    std::size_t q = n + m;
    double best = 0;
    for (std::size_t v = 0; v < n + m; ++v) {
      if (where_[v] >= 0) continue;
      const double d = reduced_cost(v, y);
      double score = 0;
      if (where_[v] == kAtLower && hi_[v] > lo_[v] && d > kDualTol) score = d;
      if (where_[v] == kAtUpper && hi_[v] > lo_[v] && d < -kDualTol) score = -d;
      if (score > best) {
        best = score;
        q = v;
        if (bland) break;
      }
    }
    if (q == n + m) return;

    for (std::size_t i = 0; i < m; ++i) alpha[i] = 0;
    if (q < n) {
      const auto& col = columns_[q];
      for (std::size_t t = 0; t < col.rows.size(); ++t)
        for (std::size_t i = 0; i < m; ++i) alpha[i] += binv_[i * m + col.rows[t]] * col.coefs[t];
    } else {
      for (std::size_t i = 0; i < m; ++i) alpha[i] = binv_[i * m + (q - n)];
    }

    const double dir = where_[q] == kAtLower ? 1.0 : -1.0;
    double step = hi_[q] - lo_[q];
    std::size_t leave = m;
    for (std::size_t i = 0; i < m; ++i) {
      const double delta = dir * alpha[i];
      const std::size_t v = head_[i];
      double limit;
      if (delta > kPivotTol) {
        limit = (value_[v] - lo_[v]) / delta;
      } else if (delta < -kPivotTol && hi_[v] < kInf) {
        limit = (hi_[v] - value_[v]) / -delta;
      } else {
        continue;
      }
      limit = std::max(limit, 0.0);
      if (limit < step - 1e-12 ||
          (limit <= step + 1e-12 && leave < m && std::abs(alpha[i]) > std::abs(alpha[leave]))) {
        step = limit;
        leave = i;
      }
    }
    if (step == kInf) throw std::logic_error("option LP unbounded");
    degenerate = step < 1e-12 ? degenerate + 1 : 0;

    value_[q] += dir * step;
    for (std::size_t i = 0; i < m; ++i) value_[head_[i]] -= dir * step * alpha[i];

    if (leave == m) {
      where_[q] = dir > 0 ? kAtUpper : kAtLower;
      value_[q] = dir > 0 ? hi_[q] : lo_[q];
      continue;
    }
    const std::size_t out = head_[leave];
    const bool to_lower = dir * alpha[leave] > 0;
    where_[out] = to_lower ? kAtLower : kAtUpper;
    value_[out] = to_lower ? lo_[out] : hi_[out];
    pivot(leave, q, alpha);
  }
}

BoundedLp::Result BoundedLp::result() const {
  const std::size_t n = columns_.size();
  Result res;
  res.feasible = true;
  res.x.assign(value_.begin(), value_.begin() + std::ptrdiff_t(n));
  for (std::size_t v = 0; v < n; ++v) res.value += columns_[v].cost * res.x[v];
  std::vector<double> y;
  compute_duals(y);
  res.reduced.assign(n, 0.0);
  for (std::size_t v = 0; v < n; ++v)
    if (where_[v] < 0) res.reduced[v] = reduced_cost(v, y);
  return res;
}

BoundedLp::Result BoundedLp::solve(const std::vector<double>& lo, const std::vector<double>& hi,
                                   const Basis* warm) {
  const std::size_t m = rhs_.size(), n = columns_.size();
  lo_.assign(n + m, 0.0);
  hi_.assign(n + m, kInf);
  std::copy(lo.begin(), lo.end(), lo_.begin());
  std::copy(hi.begin(), hi.end(), hi_.begin());

  if (warm) {
    try {
      if (warm_start(*warm)) {
        const Status status = dual_phase();
        if (status == Status::infeasible) return {};
        if (status == Status::optimal) {
          primal_phase();
          return result();
        }
      }
    } catch (const NumericalTrouble&) {
      // fall through to a cold start
    }
  }
  try {
    return cold_solve();
  } catch (const NumericalTrouble& e) {
    throw std::logic_error(e.what());
  }
}

BoundedLp::Result BoundedLp::cold_solve() {
  // Columns at their lower bounds are usually primal feasible; otherwise
  // start from the dual feasible end, every paying column at its upper bound.
  if (!cold_start(false)) {
    cold_start(true);
    const Status status = dual_phase();
    if (status == Status::infeasible) return {};
    if (status == Status::stalled) throw std::logic_error("dual simplex iteration limit reached");
  }
  primal_phase();
  return result();
}

std::vector<BoundedLp::Cut> BoundedLp::gomory_cuts(std::size_t max_cuts, double min_fraction) {
  const std::size_t m = rhs_.size(), n = columns_.size();
  reinvert();
  recompute_basic_values();
  auto integral = [&](std::size_t v) { return v < n || row_integral_[v - n]; };

  std::vector<std::pair<double, std::size_t>> sources;  // (distance from 0.5, row)
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t v = head_[r];
    if (!integral(v)) continue;
    const double f = value_[v] - std::floor(value_[v]);
    if (f < min_fraction || f > 1 - min_fraction) continue;
    sources.emplace_back(std::abs(f - 0.5), r);
  }
  std::sort(sources.begin(), sources.end());
  if (sources.size() > max_cuts) sources.resize(max_cuts);

  std::vector<Cut> cuts;
  std::vector<double> rho(m), kappa(n);
  for (const auto& [unused, r] : sources) {
    const double f0 = value_[head_[r]] - std::floor(value_[head_[r]]);
    for (std::size_t k = 0; k < m; ++k) rho[k] = binv_[r * m + k];
    // In t_j = distance of nonbasic j from its bound, the row reads
    // x_B + sum a'_j t_j = value, and GMI gives sum g_j t_j >= 1. Mapping
    // t back to columns yields sum kappa_c x_c + constant >= 1.
    std::fill(kappa.begin(), kappa.end(), 0.0);
    double constant = 0;
    for (std::size_t v = 0; v < n + m; ++v) {
      if (where_[v] >= 0 || lo_[v] == hi_[v]) continue;
      double a;
      if (v >= n) {
        a = rho[v - n];
      } else {
        a = 0;
        const auto& col = columns_[v];
        for (std::size_t t = 0; t < col.rows.size(); ++t) a += rho[col.rows[t]] * col.coefs[t];
      }
      const bool upper = where_[v] == kAtUpper;
      if (upper) a = -a;
      if (std::abs(a) < 1e-12) continue;
      double g;
      if (integral(v)) {
        const double fj = a - std::floor(a);
        g = fj <= f0 ? fj / f0 : (1 - fj) / (1 - f0);
      } else {
        g = a > 0 ? a / f0 : -a / (1 - f0);
      }
      if (g == 0) continue;
      if (v < n) {
        // t = x - lo at lower, hi - x at upper.
        kappa[v] += upper ? -g : g;
        constant += upper ? g * hi_[v] : -g * lo_[v];
      } else {
        // t = slack = b_r - A_r x.
        const std::size_t row = v - n;
        constant += g * rhs_[row];
        for (std::size_t c = 0; c < n; ++c) {
          const auto& col = columns_[c];
          for (std::size_t t = 0; t < col.rows.size(); ++t)
            if (col.rows[t] == row) kappa[c] -= g * col.coefs[t];
        }
      }
    }
    // sum kappa x >= 1 - constant  <=>  sum (-kappa) x <= constant - 1.
    Cut cut;
    cut.rhs = constant - 1;
    double largest = 0, smallest = kInf, activity = 0;
    for (std::size_t c = 0; c < n; ++c) {
      const double alpha = -kappa[c];
      if (std::abs(alpha) < 1e-9) {
        // Dropping a term must not cut anything off over [lo, hi].
        cut.rhs += std::max(alpha * lo_[c], alpha * hi_[c]);
        continue;
      }
      cut.entries.emplace_back(c, alpha);
      largest = std::max(largest, std::abs(alpha));
      smallest = std::min(smallest, std::abs(alpha));
      activity += alpha * value_[c];
    }
    // Selecting nothing is always feasible, so a valid cut has rhs >= 0.
    if (cut.entries.empty() || largest > 1e4 * smallest || cut.rhs < 0) continue;
    cut.rhs += 1e-7 * std::max(1.0, std::abs(cut.rhs));
    if (activity <= cut.rhs + 1e-6 * std::max(1.0, largest)) continue;
    cuts.push_back(std::move(cut));
  }
  return cuts;
}

}  // namespace edgealloc::solver::detail
