// JSON documents for instances and solutions.

#include <fstream>
#include <sstream>

#include "edgealloc/model.hpp"
#include "json.hpp"

namespace edgealloc {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

// Collects every problem found in a document instead of stopping at the first.
class Reader {
 public:
  std::vector<std::string> errors;

  const json* field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) {
      errors.push_back(where + ": expected an object");
      return nullptr;
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
      errors.push_back(where + ": missing field '" + key + "'");
      return nullptr;
    }
    return &*it;
  }

  double number(const json& obj, const char* key, const std::string& where) {
    const json* v = field(obj, key, where);
    if (!v) return 0.0;
    if (!v->is_number()) {
      errors.push_back(where + ": field '" + key + "' must be a number");
      return 0.0;
    }
    return v->get<double>();
  }

  std::int64_t integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) {
      errors.push_back(where + ": expected an integer id");
      return 0;
    }
    return v.get<std::int64_t>();
  }

  std::int64_t integer(const json& obj, const char* key, const std::string& where) {
    const json* v = field(obj, key, where);
    return v ? integer(*v, where + "." + key) : 0;
  }

  const json* array(const json& obj, const char* key, const std::string& where) {
    const json* v = field(obj, key, where);
    if (v && !v->is_array()) {
      errors.push_back(where + ": field '" + key + "' must be an array");
      return nullptr;
    }
    return v;
  }

  void schema(const json& doc) {
    const json* v = field(doc, "schema", "document");
    if (v && (!v->is_number_integer() || v->get<int>() != kSchemaVersion))
      errors.push_back("document: unsupported schema version (expected 1)");
  }
};

json parse_or_throw(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError({std::string("malformed JSON: ") + e.what()});
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Instance load_instance(const std::string& text) {
  const json doc = parse_or_throw(text);
  Reader r;
  r.schema(doc);

  std::vector<AccessPoint> aps;
  if (const json* arr = r.array(doc, "access_points", "document")) {
    for (std::size_t n = 0; n < arr->size(); ++n) {
      const std::string where = "access_points[" + std::to_string(n) + "]";
      const json& o = (*arr)[n];
      aps.push_back({ApId{r.integer(o, "id", where)}, r.number(o, "bandwidth", where)});
    }
  }

  std::vector<Server> servers;
  if (const json* arr = r.array(doc, "servers", "document")) {
    for (std::size_t n = 0; n < arr->size(); ++n) {
      const std::string where = "servers[" + std::to_string(n) + "]";
      const json& o = (*arr)[n];
      Server s;
      s.id = ServerId{r.integer(o, "id", where)};
      s.compute_capacity = r.number(o, "compute", where);
      if (const json* kind = r.field(o, "kind", where)) {
        if (*kind == "edge")
          s.kind = ServerKind::edge;
        else if (*kind == "cloud")
          s.kind = ServerKind::cloud;
        else
          r.errors.push_back(where + ": kind must be \"edge\" or \"cloud\"");
      }
      if (o.is_object() && o.contains("colocated_ap") && !o["colocated_ap"].is_null())
        s.colocated_ap = ApId{r.integer(o["colocated_ap"], where + ".colocated_ap")};
      servers.push_back(std::move(s));
    }
  }

  std::vector<Task> tasks;
  if (const json* arr = r.array(doc, "tasks", "document")) {
    for (std::size_t n = 0; n < arr->size(); ++n) {
      const std::string where = "tasks[" + std::to_string(n) + "]";
      const json& o = (*arr)[n];
      Task t;
      t.id = TaskId{r.integer(o, "id", where)};
      t.data_size = r.number(o, "data_size", where);
      t.cycles = r.number(o, "cycles", where);
      t.deadline = r.number(o, "deadline", where);
      t.profit = r.number(o, "profit", where);
      if (const json* reach = r.array(o, "access_points", where)) {
        for (const auto& a : *reach) t.reachable_aps.push_back(ApId{r.integer(a, where)});
      }
      tasks.push_back(std::move(t));
    }
  }

  std::vector<double> delays;
  if (const json* rows = r.array(doc, "delays", "document")) {
    if (rows->size() != aps.size())
      r.errors.push_back("delays: expected " + std::to_string(aps.size()) + " rows, got " +
                         std::to_string(rows->size()));
    for (std::size_t j = 0; j < rows->size(); ++j) {
      const json& row = (*rows)[j];
      const std::string where = "delays[" + std::to_string(j) + "]";
      if (!row.is_array() || row.size() != servers.size()) {
        r.errors.push_back(where + ": expected a row of " + std::to_string(servers.size()) +
                           " numbers");
        continue;
      }
      for (const auto& d : row) {
        if (!d.is_number()) {
          r.errors.push_back(where + ": delays must be numbers");
          delays.push_back(0.0);
        } else {
          delays.push_back(d.get<double>());
        }
      }
    }
  }

  if (!r.errors.empty()) {
    // Structural errors make the semantic pass meaningless except for the
    // scalar fields; run it anyway on a consistent topology to report those.
    try {
      Instance(tasks, aps, servers,
               Topology(aps.size(), servers.size(),
                        std::vector<double>(aps.size() * servers.size(), 0.0)));
    } catch (const ParseError& e) {
      for (const auto& v : e.violations())
        if (v.find("delay") == std::string::npos) r.errors.push_back(v);
    }
    throw ParseError(std::move(r.errors));
  }
  return Instance(std::move(tasks), std::move(aps), std::move(servers),
                  Topology(aps.size(), servers.size(), std::move(delays)));
}

std::string save_instance(const Instance& instance) {
  ordered_json doc;
  doc["schema"] = kSchemaVersion;
  ordered_json tasks = ordered_json::array();
  for (const auto& t : instance.tasks()) {
    ordered_json reach = ordered_json::array();
    for (ApId a : t.reachable_aps) reach.push_back(to_int(a));
    tasks.push_back({{"id", to_int(t.id)},
                     {"data_size", t.data_size},
                     {"cycles", t.cycles},
                     {"deadline", t.deadline},
                     {"profit", t.profit},
                     {"access_points", reach}});
  }
  ordered_json aps = ordered_json::array();
  for (const auto& a : instance.aps())
    aps.push_back({{"id", to_int(a.id)}, {"bandwidth", a.bandwidth_capacity}});
  ordered_json servers = ordered_json::array();
  for (const auto& s : instance.servers()) {
    ordered_json o = {{"id", to_int(s.id)}, {"compute", s.compute_capacity}, {"kind", to_string(s.kind)}};
    if (s.colocated_ap) o["colocated_ap"] = to_int(*s.colocated_ap);
    servers.push_back(std::move(o));
  }
  ordered_json delays = ordered_json::array();
  const auto& topo = instance.topology();
  for (std::size_t j = 0; j < topo.num_aps(); ++j) {
    ordered_json row = ordered_json::array();
    for (std::size_t k = 0; k < topo.num_servers(); ++k) row.push_back(topo.delay(j, k));
    delays.push_back(std::move(row));
  }
  doc["tasks"] = std::move(tasks);
  doc["access_points"] = std::move(aps);
  doc["servers"] = std::move(servers);
  doc["delays"] = std::move(delays);
  return doc.dump(2) + "\n";
}

Instance load_instance_file(const std::string& path) { return load_instance(read_file(path)); }

void save_instance_file(const Instance& instance, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << save_instance(instance);
}

Solution load_solution(const std::string& text) {
  const json doc = parse_or_throw(text);
  Reader r;
  r.schema(doc);
  Solution sol;
  sol.profit = r.number(doc, "profit", "document");
  if (const json* arr = r.array(doc, "assignments", "document")) {
    for (std::size_t n = 0; n < arr->size(); ++n) {
      const std::string where = "assignments[" + std::to_string(n) + "]";
      const json& o = (*arr)[n];
      Assignment a;
      a.task = TaskId{r.integer(o, "task", where)};
      a.ap = ApId{r.integer(o, "ap", where)};
      a.server = ServerId{r.integer(o, "server", where)};
      a.bandwidth = r.number(o, "bandwidth", where);
      a.compute = r.number(o, "compute", where);
      if (!(a.bandwidth > 0) || !(a.compute > 0))
        r.errors.push_back(where + ": grants must be strictly positive");
      sol.assignments.push_back(a);
    }
  }
  if (!r.errors.empty()) throw ParseError(std::move(r.errors));
  return sol;
}

std::string save_solution(const Solution& solution) {
  ordered_json doc;
  doc["schema"] = kSchemaVersion;
  ordered_json arr = ordered_json::array();
  for (const auto& a : solution.assignments)
    arr.push_back({{"task", to_int(a.task)},
                   {"ap", to_int(a.ap)},
                   {"server", to_int(a.server)},
                   {"bandwidth", a.bandwidth},
                   {"compute", a.compute}});
  doc["assignments"] = std::move(arr);
  doc["profit"] = solution.profit;
  return doc.dump(2) + "\n";
}

}  // namespace edgealloc
