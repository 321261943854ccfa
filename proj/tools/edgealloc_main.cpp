// edgealloc: generate, solve, verify, export and benchmark task mapping /
// resource allocation instances.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "edgealloc/bench.hpp"
#include "edgealloc/ldm.hpp"
#include "edgealloc/model.hpp"
#include "edgealloc/solver.hpp"
#include "edgealloc/taskgen.hpp"
#include "edgealloc/verify.hpp"
#include "edgealloc/zsg.hpp"

namespace {

using namespace edgealloc;

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNotProven = 3;

constexpr const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  1  verify found the solution infeasible\n"
    "  2  usage error, unreadable input, or an instance too large for --algo brute\n"
    "  3  solve --strict: budget exhausted before optimality was proven\n"
    "  4  internal error\n"
    "Environment:\n"
    "  EDGEALLOC_SEED  default for --seed\n";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw UsageError("cannot write " + out);
  f << text;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("EDGEALLOC_SEED");
  if (!v || !*v) return std::nullopt;
  try {
    std::size_t pos = 0;
    const auto seed = std::stoull(v, &pos);
    if (pos != std::string(v).size()) throw std::invalid_argument(v);
    return seed;
  } catch (const std::exception&) {
    throw UsageError(std::string("EDGEALLOC_SEED is not an unsigned integer: ") + v);
  }
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (auto s = env_seed()) return *s;
  throw UsageError("--seed is required (or set EDGEALLOC_SEED)");
}

taskgen::ArchitectureConfig arch_preset(const std::string& name) {
  return name == "full" ? taskgen::ArchitectureConfig::full()
                         : taskgen::ArchitectureConfig::small();
}

// "zsg", "ldm-5", "ldm-5-10", "brute-15".
bench::AlgorithmSpec parse_algo_label(const std::string& label) {
  if (label == "zsg") return bench::AlgorithmSpec::zsg();
  std::vector<std::string> parts;
  std::stringstream ss(label);
  for (std::string p; std::getline(ss, p, '-');) parts.push_back(p);
  if ((parts.size() == 2 || parts.size() == 3) && (parts[0] == "ldm" || parts[0] == "brute")) {
    try {
      const double b = std::stod(parts[1]);
      const double c = parts.size() == 3 ? std::stod(parts[2]) : b;
      return parts[0] == "ldm" ? bench::AlgorithmSpec::ldm(b, c)
                               : bench::AlgorithmSpec::brute(b, c);
    } catch (const std::exception&) {
    }
  }
  throw UsageError("unknown algorithm '" + label + "' (expected zsg, ldm-B[-C] or brute-B[-C])");
}

struct GenerateArgs {
  std::optional<std::uint64_t> seed;
  std::uint64_t arch_seed = 1;
  std::string arch = "small";
  std::size_t tasks = 10;
  double ub = 0.5;
  double uc = 1.0;
  std::string out;
};

struct SolveArgs {
  std::string instance;
  std::string algo = "zsg";
  std::optional<double> b_unit;
  std::optional<double> c_unit;
  std::uint64_t budget_nodes = solver::SearchBudget{}.max_nodes;
  double budget_secs = solver::SearchBudget{}.max_seconds;
  bool no_prune = false;
  bool strict = false;
  std::string out;
};

struct VerifyArgs {
  std::string instance;
  std::string solution;
  double tol = kDefaultTolerance;
  std::string out;
};

struct ExportArgs {
  std::string instance;
  std::optional<double> b_unit;
  std::optional<double> c_unit;
  bool no_prune = false;
  bool stats = false;
  std::string out;
};

struct BenchArgs {
  std::optional<std::uint64_t> seed;
  std::size_t seeds = 10;
  std::vector<std::size_t> tasks{10, 20, 30};
  std::vector<double> ub{0.3, 0.6, 0.9};
  std::vector<double> uc{1, 3, 5};
  std::vector<std::string> algos{"zsg", "ldm-5", "ldm-15"};
  std::string arch = "small";
  std::uint64_t arch_seed = 1;
  std::uint64_t budget_nodes = solver::SearchBudget{}.max_nodes;
  double budget_secs = solver::SearchBudget{}.max_seconds;
  double zsg_multiple = 0;
  unsigned threads = 1;
  std::string out = "bench_out";
};

int run_generate(const GenerateArgs& a) {
  taskgen::Rng arch_rng(a.arch_seed);
  const auto arch = taskgen::sample_architecture(arch_preset(a.arch), arch_rng);
  taskgen::Rng rng(resolve_seed(a.seed));
  taskgen::TasksetGenConfig cfg;
  cfg.n_tasks = a.tasks;
  cfg.ub = a.ub;
  cfg.uc = a.uc;
  emit(save_instance(taskgen::generate_taskset(arch, cfg, rng)), a.out);
  return kExitOk;
}

int run_solve(const SolveArgs& a) {
  const bool exact = a.algo != "zsg";
  if (exact && (!a.b_unit || !a.c_unit))
    throw UsageError("--algo " + a.algo + " requires --b-unit and --c-unit");
  if (!exact && (a.b_unit || a.c_unit))
    throw UsageError("--b-unit/--c-unit apply only to --algo ldm or brute");

  const Instance inst = load_instance(read_file(a.instance));
  Solution sol;
  bool proven = true;
  if (!exact) {
    sol = zsg::solve(inst);
  } else {
    solver::LdmSettings settings;
    settings.prune = !a.no_prune;
    settings.method = a.algo == "brute" ? solver::ExactMethod::brute_force
                                        : solver::ExactMethod::branch_and_bound;
    settings.budget = {a.budget_nodes, a.budget_secs};
    const auto res = solver::solve_ldm(inst, {*a.b_unit, *a.c_unit}, settings);
    sol = res.solution;
    proven = res.stats.proven_optimal;
    std::cerr << "model: " << res.model_stats.variables << " variables, " << res.model_stats.rows
              << " rows, " << res.model_stats.nonzeros << " nonzeros\n"
              << "search: " << res.stats.nodes << " nodes, " << res.stats.wall_seconds << " s, "
              << (proven ? "proven optimal" : "budget exhausted, not proven optimal") << '\n';
  }
  const auto report = verify(inst, sol);
  if (!report.feasible) throw std::logic_error("solver produced an infeasible solution");
  emit(save_solution(sol), a.out);
  std::cerr << "profit " << sol.profit << " of " << inst.total_profit() << '\n';
  return a.strict && !proven ? kExitNotProven : kExitOk;
}

int run_verify(const VerifyArgs& a) {
  const Instance inst = load_instance(read_file(a.instance));
  const Solution sol = load_solution(read_file(a.solution));
  const auto report = verify(inst, sol, a.tol);
  emit(report_to_json(report), a.out);
  if (!report.feasible) {
    for (const auto& v : report.violations) std::cerr << "violated: " << to_string(v.constraint) << '\n';
    return kExitInfeasible;
  }
  return kExitOk;
}

int run_export(const ExportArgs& a) {
  const Instance inst = load_instance(read_file(a.instance));
  const ldm::DiscretizationConfig cfg{*a.b_unit, *a.c_unit};
  ldm::IlpModel model = ldm::discretize(inst, cfg);
  if (!a.no_prune) model = ldm::prune(model, inst, cfg);
  emit(ldm::export_lp(model), a.out);
  if (a.stats) {
    const auto st = model.stats();
    std::cerr << "variables " << st.variables << "\nrows " << st.rows << "\nnonzeros "
              << st.nonzeros << '\n';
  }
  return kExitOk;
}

int run_bench(const BenchArgs& a) {
  bench::CampaignGrid grid;
  const std::uint64_t first = a.seed ? *a.seed : env_seed().value_or(1);
  for (std::uint64_t s = 0; s < a.seeds; ++s) grid.seeds.push_back(first + s);
  grid.n_tasks = a.tasks;
  grid.ub = a.ub;
  grid.uc = a.uc;
  for (const auto& label : a.algos) {
    auto spec = parse_algo_label(label);
    if (spec.kind != bench::AlgorithmSpec::Kind::zsg) spec.zsg_time_multiple = a.zsg_multiple;
    grid.algorithms.push_back(spec);
  }
  grid.architecture = arch_preset(a.arch);
  grid.architecture_seed = a.arch_seed;
  grid.budget = {a.budget_nodes, a.budget_secs};
  grid.threads = a.threads;

  const auto result = bench::run_campaign(grid);
  bench::emit_plots(result.records, a.out);
  const std::string summary = bench::summary_to_csv(result.summary, result.notes);
  emit(summary, (std::filesystem::path(a.out) / "summary.csv").string());
  std::cout << summary;

  const auto unproven = std::count_if(result.records.begin(), result.records.end(),
                                      [](const auto& r) { return r.algo != "zsg" && !r.optimal; });
  std::cerr << result.records.size() << " runs written to " << a.out << "; " << unproven
            << " exact runs not proven optimal\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Task mapping and resource allocation for deadline-constrained offloading"};
  app.footer(kExitCodes);
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Sample an architecture and a taskset; write the instance");
  g->add_option("--seed", gen.seed, "Taskset seed (default: EDGEALLOC_SEED)");
  g->add_option("--arch-seed", gen.arch_seed, "Architecture seed")->capture_default_str();
  g->add_option("--arch", gen.arch, "Architecture preset")
      ->check(CLI::IsMember({"small", "full"}))
      ->capture_default_str();
  g->add_option("--tasks", gen.tasks, "Number of tasks")->check(CLI::PositiveNumber)->capture_default_str();
  g->add_option("--ub", gen.ub, "Per-AP bandwidth utilization in (0, 1]")->capture_default_str();
  g->add_option("--uc", gen.uc, "Total compute utilization in (0, tasks]")->capture_default_str();
  g->add_option("-o,--out", gen.out, "Output file (default: stdout)");

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Solve an instance; write the solution");
  s->add_option("-i,--instance", solve.instance, "Instance file")->required();
  s->add_option("--algo", solve.algo, "zsg (greedy), ldm (branch and bound) or brute (enumeration)")
      ->check(CLI::IsMember({"zsg", "ldm", "brute"}))
      ->capture_default_str();
  s->add_option("--b-unit", solve.b_unit, "Bandwidth unit; required for ldm and brute")
      ->check(CLI::PositiveNumber);
  s->add_option("--c-unit", solve.c_unit, "Compute unit; required for ldm and brute")
      ->check(CLI::PositiveNumber);
  s->add_option("--budget-nodes", solve.budget_nodes, "Branch and bound node budget")
      ->capture_default_str();
  s->add_option("--budget-secs", solve.budget_secs, "Branch and bound time budget in seconds")
      ->capture_default_str();
  s->add_flag("--no-prune", solve.no_prune, "Skip variable pruning before the exact search");
  s->add_flag("--strict", solve.strict, "Exit 3 when optimality is not proven within budget");
  s->add_option("-o,--out", solve.out, "Output file (default: stdout)");

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "Check a solution against every constraint");
  v->add_option("-i,--instance", ver.instance, "Instance file")->required();
  v->add_option("-s,--solution", ver.solution, "Solution file")->required();
  v->add_option("--tol", ver.tol, "Relative tolerance on deadlines and capacities")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  v->add_option("-o,--out", ver.out, "Report file (default: stdout)");

  ExportArgs exp;
  auto* e = app.add_subcommand("export-lp", "Write the discretized 0-1 model in LP format");
  e->add_option("-i,--instance", exp.instance, "Instance file")->required();
  e->add_option("--b-unit", exp.b_unit, "Bandwidth unit")->required()->check(CLI::PositiveNumber);
  e->add_option("--c-unit", exp.c_unit, "Compute unit")->required()->check(CLI::PositiveNumber);
  e->add_flag("--no-prune", exp.no_prune, "Export the unpruned model");
  e->add_flag("--stats", exp.stats, "Print variable, row and nonzero counts to stderr");
  e->add_option("-o,--out", exp.out, "Output file (default: stdout)");

  BenchArgs bn;
  auto* b = app.add_subcommand("bench", "Run a campaign; write CSV tables and SVG box plots");
  b->add_option("--seed", bn.seed, "First taskset seed (default: EDGEALLOC_SEED, else 1)");
  b->add_option("--seeds", bn.seeds, "Seeds per grid cell")->capture_default_str();
  b->add_option("--tasks", bn.tasks, "Taskset sizes")->delimiter(',')->capture_default_str();
  b->add_option("--ub", bn.ub, "Bandwidth utilizations")->delimiter(',')->capture_default_str();
  b->add_option("--uc", bn.uc, "Compute utilizations")->delimiter(',')->capture_default_str();
  b->add_option("--algos", bn.algos, "Algorithms: zsg, ldm-B[-C], brute-B[-C]")
      ->delimiter(',')
      ->capture_default_str();
  b->add_option("--arch", bn.arch, "Architecture preset")
      ->check(CLI::IsMember({"small", "full"}))
      ->capture_default_str();
  b->add_option("--arch-seed", bn.arch_seed, "Architecture seed")->capture_default_str();
  b->add_option("--budget-nodes", bn.budget_nodes, "Node budget per exact solve")->capture_default_str();
  b->add_option("--budget-secs", bn.budget_secs, "Time budget per exact solve")->capture_default_str();
  b->add_option("--zsg-multiple", bn.zsg_multiple,
                "If > 0, exact time budget = this multiple of the largest ZSG time per size")
      ->capture_default_str();
  b->add_option("--threads", bn.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  b->add_option("-o,--out", bn.out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kExitUsage;
  }

  try {
    if (*g) return run_generate(gen);
    if (*s) return run_solve(solve);
    if (*v) return run_verify(ver);
    if (*e) return run_export(exp);
    if (*b) return run_bench(bn);
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& err) {
    std::cerr << "error: " << err.what() << '\n';
    for (const auto& msg : err.violations()) std::cerr << "  " << msg << '\n';
    return kExitUsage;
  } catch (const ReferenceError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const solver::OracleRefused& err) {
    std::cerr << "error: " << err.what() << "; use --algo ldm for instances this large\n";
    return kExitUsage;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << '\n';
    return 4;
  }
  return kExitUsage;
}
