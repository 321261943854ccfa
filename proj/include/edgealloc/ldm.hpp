#pragma once

// Linear discretization of the mapping / allocation problem.
//
// Bandwidth is granted in multiples of a minimum unit b_unit and compute in
// multiples of c_unit, so AP j offers u_j = floor(b_j / b_unit) units and
// server k offers v_k = floor(c_k / c_unit). The nonconvex terms
// x_ij / u_ij and y_ik / v_ik are replaced by one binary per unit count
// (x_ijm, y_ikn), and the product x_ij * y_ik by a linked binary z_ijk.
// The resulting model is a pure 0-1 ILP:
//
//   max  sum p_i z_ijk
//   s.t. sum_jm x_ijm s_i/(m b_unit) + 2 sum_jk z_ijk d_jk
//          + sum_kn y_ikn q_i/(n c_unit) <= deadline_i      (per task)
//        sum_jm x_ijm <= 1,  sum_kn y_ikn <= 1               (per task)
//        sum_im m x_ijm <= u_j                               (per AP)
//        sum_in n y_ikn <= v_k                               (per server)
//        z_ijk >= sum_m x_ijm + sum_n y_ikn - 1
//        z_ijk <= sum_m x_ijm,  z_ijk <= sum_n y_ikn

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "edgealloc/model.hpp"

namespace edgealloc::ldm {

struct DiscretizationConfig {
  double b_unit = 5;
  double c_unit = 5;
};

/// floor(capacity / unit), robust to representation error when the ratio is
/// an integer up to rounding. Throws DomainError on a non-positive unit.
int unit_count(double capacity, double unit);

enum class VarKind { x, y, z };

struct Variable {
  VarKind kind = VarKind::x;
  std::size_t task = 0;
  std::size_t ap = 0;      // x and z
  std::size_t server = 0;  // y and z
  int units = 0;           // m for x, n for y, 0 for z
  std::string name;
};

enum class Sense { le, eq, ge };

enum class RowFamily {
  deadline,
  task_ap_choice,
  task_server_choice,
  ap_capacity,
  server_capacity,
  z_lower,    // z >= sum x + sum y - 1
  z_upper_x,  // z <= sum x
  z_upper_y,  // z <= sum y
};

struct Term {
  std::size_t var = 0;
  double coef = 0;
};

struct Row {
  std::string name;
  RowFamily family = RowFamily::deadline;
  std::vector<Term> terms;
  Sense sense = Sense::le;
  double rhs = 0;
};

struct ModelStats {
  std::size_t variables = 0;
  std::size_t rows = 0;
  std::size_t nonzeros = 0;
};

using Valuation = std::vector<std::uint8_t>;

/// Immutable 0-1 ILP built by discretize() or prune().
class IlpModel {
 public:
  IlpModel(std::vector<Variable> variables, std::vector<Row> rows, std::vector<Term> objective,
           std::vector<int> ap_units, std::vector<int> server_units);

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Row>& rows() const { return rows_; }
  const std::vector<Term>& objective() const { return objective_; }
  const std::vector<int>& ap_units() const { return ap_units_; }
  const std::vector<int>& server_units() const { return server_units_; }
  ModelStats stats() const;

  std::optional<std::size_t> find_x(std::size_t task, std::size_t ap, int m) const;
  std::optional<std::size_t> find_y(std::size_t task, std::size_t server, int n) const;
  std::optional<std::size_t> find_z(std::size_t task, std::size_t ap, std::size_t server) const;

  /// True when every row holds, with a relative tolerance on the row's
  /// right-hand side.
  bool satisfies(const Valuation& values, double tol = kDefaultTolerance) const;
  double objective_value(const Valuation& values) const;

 private:
  std::vector<Variable> variables_;
  std::vector<Row> rows_;
  std::vector<Term> objective_;
  std::vector<int> ap_units_;
  std::vector<int> server_units_;
  std::map<std::tuple<int, std::size_t, std::size_t, std::size_t>, std::size_t> index_;
};

/// Valuation inconsistent with the model's linking structure.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

IlpModel discretize(const Instance& instance, const DiscretizationConfig& cfg);

/// Drops variables that cannot take part in any deadline-feasible choice and
/// z variables without surviving support. The optimal objective is unchanged.
IlpModel prune(const IlpModel& model, const Instance& instance, const DiscretizationConfig& cfg);

/// Reads grants off a valuation: one assignment per task with z_ijk = 1,
/// bandwidth m * b_unit and compute n * c_unit.
Solution extract_solution(const Instance& instance, const DiscretizationConfig& cfg,
                          const IlpModel& model, const Valuation& values);

/// CPLEX LP text. Variables are named x_<task>_<ap>_<m>, y_<task>_<server>_<n>
/// and z_<task>_<ap>_<server> using instance ids.
std::string export_lp(const IlpModel& model);

}  // namespace edgealloc::ldm
