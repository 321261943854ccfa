#include "edgealloc/ldm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace edgealloc::ldm {

namespace {

std::string id_str(std::int64_t id) { return std::to_string(id); }

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::tuple<int, std::size_t, std::size_t, std::size_t> key_of(const Variable& v) {
  switch (v.kind) {
    case VarKind::x: return {0, v.task, v.ap, static_cast<std::size_t>(v.units)};
    case VarKind::y: return {1, v.task, v.server, static_cast<std::size_t>(v.units)};
    case VarKind::z: return {2, v.task, v.ap, v.server};
  }
  return {};
}

void check_config(const DiscretizationConfig& cfg) {
  if (!(cfg.b_unit > 0) || !std::isfinite(cfg.b_unit) || !(cfg.c_unit > 0) ||
      !std::isfinite(cfg.c_unit))
    throw DomainError("minimum units must be positive and finite");
}

}  // namespace

int unit_count(double capacity, double unit) {
  if (!(unit > 0) || !std::isfinite(unit)) throw DomainError("minimum unit must be positive");
  const double ratio = capacity / unit;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, std::abs(ratio)))
    return static_cast<int>(nearest);
  return static_cast<int>(std::floor(ratio));
}

IlpModel::IlpModel(std::vector<Variable> variables, std::vector<Row> rows,
                   std::vector<Term> objective, std::vector<int> ap_units,
                   std::vector<int> server_units)
    : variables_(std::move(variables)),
      rows_(std::move(rows)),
      objective_(std::move(objective)),
      ap_units_(std::move(ap_units)),
      server_units_(std::move(server_units)) {
  for (std::size_t v = 0; v < variables_.size(); ++v) index_.emplace(key_of(variables_[v]), v);
}

ModelStats IlpModel::stats() const {
  ModelStats s{variables_.size(), rows_.size(), 0};
  for (const auto& r : rows_)
    s.nonzeros += static_cast<std::size_t>(
        std::count_if(r.terms.begin(), r.terms.end(), [](const Term& t) { return t.coef != 0; }));
  return s;
}

std::optional<std::size_t> IlpModel::find_x(std::size_t task, std::size_t ap, int m) const {
  auto it = index_.find({0, task, ap, static_cast<std::size_t>(m)});
  return it == index_.end() ? std::nullopt : std::optional(it->second);
}

std::optional<std::size_t> IlpModel::find_y(std::size_t task, std::size_t server, int n) const {
  auto it = index_.find({1, task, server, static_cast<std::size_t>(n)});
  return it == index_.end() ? std::nullopt : std::optional(it->second);
}

std::optional<std::size_t> IlpModel::find_z(std::size_t task, std::size_t ap,
                                            std::size_t server) const {
  auto it = index_.find({2, task, ap, server});
  return it == index_.end() ? std::nullopt : std::optional(it->second);
}

bool IlpModel::satisfies(const Valuation& values, double tol) const {
  if (values.size() != variables_.size()) return false;
  for (const auto& r : rows_) {
    double lhs = 0;
    for (const auto& t : r.terms) lhs += t.coef * values[t.var];
    const double slack = tol * std::max(1.0, std::abs(r.rhs));
    switch (r.sense) {
      case Sense::le:
        if (lhs > r.rhs + slack) return false;
        break;
      case Sense::ge:
        if (lhs < r.rhs - slack) return false;
        break;
      case Sense::eq:
        if (std::abs(lhs - r.rhs) > slack) return false;
        break;
    }
  }
  return true;
}

double IlpModel::objective_value(const Valuation& values) const {
  double sum = 0;
  for (const auto& t : objective_) sum += t.coef * values.at(t.var);
  return sum;
}

IlpModel discretize(const Instance& instance, const DiscretizationConfig& cfg) {
  check_config(cfg);
  const auto tasks = instance.tasks();
  const auto aps = instance.aps();
  const auto servers = instance.servers();
  const auto& topo = instance.topology();

  std::vector<int> u(aps.size()), v(servers.size());
  for (std::size_t j = 0; j < aps.size(); ++j) u[j] = unit_count(aps[j].bandwidth_capacity, cfg.b_unit);
  for (std::size_t k = 0; k < servers.size(); ++k)
    v[k] = unit_count(servers[k].compute_capacity, cfg.c_unit);

  std::vector<Variable> vars;
  std::vector<Row> rows;
  std::vector<Term> objective;
  std::vector<Row> ap_rows(aps.size()), server_rows(servers.size());
  for (std::size_t j = 0; j < aps.size(); ++j)
    ap_rows[j] = {"ap_cap_" + id_str(to_int(aps[j].id)), RowFamily::ap_capacity, {}, Sense::le,
                  double(u[j])};
  for (std::size_t k = 0; k < servers.size(); ++k)
    server_rows[k] = {"server_cap_" + id_str(to_int(servers[k].id)), RowFamily::server_capacity,
                      {}, Sense::le, double(v[k])};

  std::vector<Row> link_rows;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& t = tasks[i];
    const std::string tid = id_str(to_int(t.id));
    Row deadline{"deadline_" + tid, RowFamily::deadline, {}, Sense::le, t.deadline};
    Row one_ap{"one_ap_" + tid, RowFamily::task_ap_choice, {}, Sense::le, 1.0};
    Row one_server{"one_server_" + tid, RowFamily::task_server_choice, {}, Sense::le, 1.0};

    std::vector<std::vector<std::size_t>> x_of_ap(aps.size()), y_of_server(servers.size());
    const auto reach = instance.reachable_ap_indices(i);
    for (std::size_t j : reach) {
      for (int m = 1; m <= u[j]; ++m) {
        const std::size_t id = vars.size();
        vars.push_back({VarKind::x, i, j, 0, m,
                        "x_" + tid + "_" + id_str(to_int(aps[j].id)) + "_" + std::to_string(m)});
        x_of_ap[j].push_back(id);
        deadline.terms.push_back({id, t.data_size / (m * cfg.b_unit)});
        one_ap.terms.push_back({id, 1.0});
        ap_rows[j].terms.push_back({id, double(m)});
      }
    }
    for (std::size_t k = 0; k < servers.size(); ++k) {
      for (int n = 1; n <= v[k]; ++n) {
        const std::size_t id = vars.size();
        vars.push_back({VarKind::y, i, 0, k, n,
                        "y_" + tid + "_" + id_str(to_int(servers[k].id)) + "_" + std::to_string(n)});
        y_of_server[k].push_back(id);
        deadline.terms.push_back({id, t.cycles / (n * cfg.c_unit)});
        one_server.terms.push_back({id, 1.0});
        server_rows[k].terms.push_back({id, double(n)});
      }
    }
    for (std::size_t j : reach) {
      for (std::size_t k = 0; k < servers.size(); ++k) {
        const std::size_t z = vars.size();
        const std::string suffix =
            tid + "_" + id_str(to_int(aps[j].id)) + "_" + id_str(to_int(servers[k].id));
        vars.push_back({VarKind::z, i, j, k, 0, "z_" + suffix});
        deadline.terms.push_back({z, 2.0 * topo.delay(j, k)});
        objective.push_back({z, t.profit});

        Row lower{"zlink_lo_" + suffix, RowFamily::z_lower, {{z, 1.0}}, Sense::ge, -1.0};
        Row upper_x{"zlink_x_" + suffix, RowFamily::z_upper_x, {{z, 1.0}}, Sense::le, 0.0};
        Row upper_y{"zlink_y_" + suffix, RowFamily::z_upper_y, {{z, 1.0}}, Sense::le, 0.0};
        for (std::size_t x : x_of_ap[j]) {
          lower.terms.push_back({x, -1.0});
          upper_x.terms.push_back({x, -1.0});
        }
        for (std::size_t y : y_of_server[k]) {
          lower.terms.push_back({y, -1.0});
          upper_y.terms.push_back({y, -1.0});
        }
        link_rows.push_back(std::move(lower));
        link_rows.push_back(std::move(upper_x));
        link_rows.push_back(std::move(upper_y));
      }
    }
    rows.push_back(std::move(deadline));
    if (!one_ap.terms.empty()) rows.push_back(std::move(one_ap));
    if (!one_server.terms.empty()) rows.push_back(std::move(one_server));
  }
  for (auto& r : ap_rows)
    if (!r.terms.empty()) rows.push_back(std::move(r));
  for (auto& r : server_rows)
    if (!r.terms.empty()) rows.push_back(std::move(r));
  for (auto& r : link_rows) rows.push_back(std::move(r));

  return IlpModel(std::move(vars), std::move(rows), std::move(objective), std::move(u),
                  std::move(v));
}

IlpModel prune(const IlpModel& model, const Instance& instance, const DiscretizationConfig& cfg) {
  check_config(cfg);
  const auto tasks = instance.tasks();
  const auto& topo = instance.topology();
  const auto& u = model.ap_units();
  const auto& v = model.server_units();
  constexpr double inf = std::numeric_limits<double>::infinity();
  auto fits = [](double time, const Task& t) { return time <= t.deadline * (1.0 + kDefaultTolerance); };

  const auto& vars = model.variables();
  std::vector<bool> keep(vars.size(), false);
  for (std::size_t id = 0; id < vars.size(); ++id) {
    const Variable& var = vars[id];
    const Task& t = tasks[var.task];
    switch (var.kind) {
      case VarKind::x: {
        // Fastest possible processing reachable from this AP.
        double best = inf;
        for (std::size_t k = 0; k < v.size(); ++k)
          if (v[k] >= 1)
            best = std::min(best, 2.0 * topo.delay(var.ap, k) + t.cycles / (v[k] * cfg.c_unit));
        keep[id] = fits(t.data_size / (var.units * cfg.b_unit) + best, t);
        break;
      }
      case VarKind::y: {
        double best = inf;
        for (std::size_t j : instance.reachable_ap_indices(var.task))
          if (u[j] >= 1)
            best = std::min(best, t.data_size / (u[j] * cfg.b_unit) + 2.0 * topo.delay(j, var.server));
        keep[id] = fits(t.cycles / (var.units * cfg.c_unit) + best, t);
        break;
      }
      case VarKind::z: {
        const int uj = u[var.ap], vk = v[var.server];
        keep[id] = uj >= 1 && vk >= 1 &&
                   fits(t.data_size / (uj * cfg.b_unit) + 2.0 * topo.delay(var.ap, var.server) +
                            t.cycles / (vk * cfg.c_unit),
                        t);
        break;
      }
    }
  }
  // A surviving z needs surviving x on its AP and y on its server.
  for (std::size_t id = 0; id < vars.size(); ++id) {
    const Variable& var = vars[id];
    if (var.kind != VarKind::z || !keep[id]) continue;
    bool has_x = false, has_y = false;
    for (int m = 1; m <= u[var.ap] && !has_x; ++m)
      if (auto x = model.find_x(var.task, var.ap, m)) has_x = keep[*x];
    for (int n = 1; n <= v[var.server] && !has_y; ++n)
      if (auto y = model.find_y(var.task, var.server, n)) has_y = keep[*y];
    keep[id] = has_x && has_y;
  }

  std::vector<std::size_t> remap(vars.size(), std::numeric_limits<std::size_t>::max());
  std::vector<Variable> new_vars;
  for (std::size_t id = 0; id < vars.size(); ++id) {
    if (!keep[id]) continue;
    remap[id] = new_vars.size();
    new_vars.push_back(vars[id]);
  }
  auto survivors = [&](const std::vector<Term>& terms) {
    std::vector<Term> out;
    for (const auto& t : terms)
      if (keep[t.var]) out.push_back({remap[t.var], t.coef});
    return out;
  };

  std::vector<Row> new_rows;
  for (const auto& r : model.rows()) {
    const bool z_row = r.family == RowFamily::z_lower || r.family == RowFamily::z_upper_x ||
                       r.family == RowFamily::z_upper_y;
    // z is always the first term of its linking rows.
    if (z_row && !keep[r.terms.front().var]) continue;
    Row nr{r.name, r.family, survivors(r.terms), r.sense, r.rhs};
    if (nr.terms.empty()) continue;
    new_rows.push_back(std::move(nr));
  }
  return IlpModel(std::move(new_vars), std::move(new_rows), survivors(model.objective()), u, v);
}

Solution extract_solution(const Instance& instance, const DiscretizationConfig& cfg,
                          const IlpModel& model, const Valuation& values) {
  check_config(cfg);
  const auto& vars = model.variables();
  if (values.size() != vars.size())
    throw ConsistencyError("valuation size does not match the model");

  const std::size_t n_tasks = instance.tasks().size();
  std::vector<std::vector<std::size_t>> xs(n_tasks), ys(n_tasks), zs(n_tasks);
  for (std::size_t id = 0; id < vars.size(); ++id) {
    if (!values[id]) continue;
    const auto& var = vars[id];
    (var.kind == VarKind::x ? xs : var.kind == VarKind::y ? ys : zs)[var.task].push_back(id);
  }

  std::vector<Assignment> out;
  for (std::size_t i = 0; i < n_tasks; ++i) {
    if (zs[i].empty()) continue;
    const std::string who = "task " + std::to_string(to_int(instance.tasks()[i].id));
    if (zs[i].size() > 1) throw ConsistencyError(who + ": more than one z set");
    if (xs[i].size() != 1 || ys[i].size() != 1)
      throw ConsistencyError(who + ": z set without exactly one x and one y");
    const Variable& z = vars[zs[i].front()];
    const Variable& x = vars[xs[i].front()];
    const Variable& y = vars[ys[i].front()];
    if (x.ap != z.ap || y.server != z.server)
      throw ConsistencyError(who + ": z does not match the selected AP / server");
    out.push_back({instance.tasks()[i].id, instance.aps()[z.ap].id, instance.servers()[z.server].id,
                   x.units * cfg.b_unit, y.units * cfg.c_unit});
  }
  return make_solution(instance, std::move(out));
}

std::string export_lp(const IlpModel& model) {
  constexpr std::size_t kTermsPerLine = 8;
  const auto& vars = model.variables();
  std::ostringstream out;

  auto write_terms = [&](const std::vector<Term>& terms) {
    for (std::size_t n = 0; n < terms.size(); ++n) {
      if (n > 0 && n % kTermsPerLine == 0) out << "\n   ";
      const double c = terms[n].coef;
      if (n == 0)
        out << ' ' << (c < 0 ? "-" : "") << format_number(std::abs(c));
      else
        out << (c < 0 ? " - " : " + ") << format_number(std::abs(c));
      out << ' ' << vars[terms[n].var].name;
    }
  };

  out << "\\ edgealloc discretized mapping/allocation model\n";
  out << "Maximize\n obj:";
  write_terms(model.objective());
  out << "\nSubject To\n";
  for (const auto& r : model.rows()) {
    out << ' ' << r.name << ':';
    write_terms(r.terms);
    out << (r.sense == Sense::le ? " <= " : r.sense == Sense::ge ? " >= " : " = ")
        << format_number(r.rhs) << '\n';
  }
  out << "Binary\n";
  for (const auto& v : vars) out << ' ' << v.name << '\n';
  out << "End\n";
  return out.str();
}

}  // namespace edgealloc::ldm
