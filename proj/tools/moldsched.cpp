// Command-line front end: simulation, instance generation, property
// verification, the exact oracle, and CSV sweeps.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "moldsched/bounds.hpp"
#include "moldsched/engine.hpp"
#include "moldsched/instances.hpp"
#include "moldsched/io.hpp"
#include "moldsched/verify.hpp"

namespace {

using namespace moldsched;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("MOLDSCHED_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 1;
}

int resolve_procs(const GraphFile& gf, int procs_flag) {
  return procs_flag > 0 ? procs_flag : gf.procs;
}

struct SweepConfig {
  std::vector<Model> models;
  std::vector<int> sizes;
  std::vector<int> procs;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> policies;
  int oracle_limit = 6;
  double density = 0.3;
  std::string output;
};

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  SweepConfig cfg;
  for (const auto& m : j.at("models")) {
    cfg.models.push_back(model_from_name(m.get<std::string>()));
  }
  for (const auto& n : j.at("sizes")) cfg.sizes.push_back(n.get<int>());
  for (const auto& p : j.at("procs")) cfg.procs.push_back(p.get<int>());
  if (j.contains("seeds") && j["seeds"].is_object()) {
    const std::uint64_t begin = j["seeds"].value("begin", default_seed());
    const std::uint64_t count = j["seeds"].value("count", 1);
    for (std::uint64_t s = 0; s < count; ++s) cfg.seeds.push_back(begin + s);
  } else if (j.contains("seeds")) {
    for (const auto& s : j["seeds"]) cfg.seeds.push_back(s.get<std::uint64_t>());
  } else {
    cfg.seeds.push_back(default_seed());
  }
  for (const auto& p : j.value("policies", json::array({"paper"}))) {
    cfg.policies.push_back(p.get<std::string>());
  }
  cfg.oracle_limit = j.value("oracle_limit", 6);
  cfg.density = j.value("density", 0.3);
  cfg.output = j.value("output", std::string());
  if (cfg.models.empty() || cfg.sizes.empty() || cfg.procs.empty() ||
      cfg.policies.empty() || cfg.seeds.empty()) {
    throw std::runtime_error("sweep config has an empty axis");
  }
  return cfg;
}

std::string csv_num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

int run_sweep(const SweepConfig& cfg, const std::string& csv_path, int jobs) {
  struct Job {
    std::string id;
    Model model;
    int n, P;
    std::uint64_t seed;
    std::string policy;
  };
  std::vector<Job> work;
  for (Model m : cfg.models) {
    for (int n : cfg.sizes) {
      for (int P : cfg.procs) {
        for (std::uint64_t s : cfg.seeds) {
          for (const auto& pol : cfg.policies) {
            std::ostringstream id;
            id << model_name(m) << "_n" << n << "_P" << P << "_s" << s << "_"
               << pol;
            work.push_back({id.str(), m, n, P, s, pol});
          }
        }
      }
    }
  }

  std::vector<std::string> rows(work.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex err_mutex;
  std::string first_error;

  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= work.size() || failed.load()) break;
      const Job& jb = work[i];
      try {
        const TaskGraph g =
            gen_random_dag(jb.seed, jb.n, jb.P, jb.model, {}, cfg.density);
        const bool with_oracle = jb.n <= cfg.oracle_limit && jb.P <= 8;
        const CompetitiveReport rep = competitive_report(
            g, jb.P, AllocationPolicy::from_name(jb.policy), with_oracle);
        std::ostringstream row;
        row << jb.id << ',' << model_name(jb.model) << ',' << jb.n << ','
            << jb.P << ',' << jb.policy << ',' << csv_num(rep.makespan) << ','
            << csv_num(rep.lb.value) << ','
            << (rep.oracle_opt ? csv_num(*rep.oracle_opt) : "") << ','
            << csv_num(rep.ratio_vs_lb) << ','
            << (rep.ratio_vs_opt ? csv_num(*rep.ratio_vs_opt) : "") << ','
            << csv_num(rep.model_ratio);
        rows[i] = row.str();
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!failed.exchange(true)) first_error = e.what();
      }
    }
  };

  const int threads =
      jobs > 0 ? jobs : std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failed.load()) throw std::runtime_error("sweep failed: " + first_error);

  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return work[a].id < work[b].id;
  });

  std::ofstream out(csv_path);
  if (!out) throw std::runtime_error("cannot write " + csv_path);
  out << "instance_id,model,n,P,policy,makespan,lb,opt,ratio_lb,ratio_opt,"
         "model_ratio\n";
  for (std::size_t i : order) out << rows[i] << "\n";
  std::cout << "wrote " << rows.size() << " rows to " << csv_path << "\n";
  return kExitOk;
}

void print_grid_result(const char* what, const GridCheck& check) {
  std::cout << what << ": " << check.checked << " specs, "
            << check.violations.size() << " violations";
  if (check.worst_area_ratio > 0.0) {
    std::cout << " (worst area ratio " << check.worst_area_ratio
              << ", worst time ratio " << check.worst_time_ratio << ")";
  }
  std::cout << "\n";
  for (const auto& v : check.violations) std::cout << "  " << v << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"moldable task-graph scheduling toolkit"};
  app.require_subcommand(1);

  // --- simulate -------------------------------------------------------
  std::string sim_graph, sim_policy = "paper", sim_out, sim_report;
  int sim_procs = 0;
  bool sim_oracle = false;
  auto* sim = app.add_subcommand("simulate", "list-schedule a graph file");
  sim->add_option("graph", sim_graph, "graph JSON file")->required();
  sim->add_option("--procs", sim_procs, "platform size (default: from file)");
  sim->add_option("--policy", sim_policy,
                  "paper | mintime | seq | fixed:<k> | fig6b");
  sim->add_option("--out", sim_out, "write the schedule JSON here");
  sim->add_option("--report", sim_report, "write a competitive report here");
  sim->add_flag("--with-oracle", sim_oracle,
                "include the exact optimum in the report (tiny instances)");

  // --- generate -------------------------------------------------------
  auto* gen = app.add_subcommand("generate", "produce instance files");
  gen->require_subcommand(1);

  int chains_ell = 2;
  std::string chains_out;
  auto* gen_chains =
      gen->add_subcommand("chains", "independent-chains instance");
  gen_chains->add_option("--ell", chains_ell, "ell >= 2 (K = 2^ell)")
      ->required();
  gen_chains->add_option("--out", chains_out, "output graph JSON")->required();

  std::string lb_model, lb_out, lb_policy = "paper";
  int lb_procs = 256;
  double lb_eps = 0.5;
  auto* gen_lb = gen->add_subcommand("lb", "layered lower-bound instance");
  gen_lb->add_option("--model", lb_model, "roofline | communication | amdahl")
      ->required();
  gen_lb->add_option("--procs", lb_procs, "platform size (>= 16)");
  gen_lb->add_option("--eps", lb_eps, "epsilon in (0,1)");
  gen_lb->add_option("--policy", lb_policy, "policy under test");
  gen_lb->add_option("--out", lb_out, "output directory")->required();

  std::uint64_t rnd_seed = default_seed();
  int rnd_n = 10, rnd_procs = 8, rnd_layers = 0;
  double rnd_density = 0.3;
  std::string rnd_model = "general", rnd_out;
  auto* gen_rnd = gen->add_subcommand("random", "seeded layered DAG");
  gen_rnd->add_option("--seed", rnd_seed, "RNG seed (or MOLDSCHED_SEED)");
  gen_rnd->add_option("--n", rnd_n, "number of tasks")->required();
  gen_rnd->add_option("--procs", rnd_procs, "platform size");
  gen_rnd->add_option("--model", rnd_model, "model family for all tasks");
  gen_rnd->add_option("--density", rnd_density, "forward-edge probability");
  gen_rnd->add_option("--layers", rnd_layers, "layer count (default: drawn)");
  gen_rnd->add_option("--out", rnd_out, "output graph JSON")->required();

  // --- verify ---------------------------------------------------------
  auto* ver = app.add_subcommand("verify", "property checks");
  ver->require_subcommand(1);

  auto* ver_params = ver->add_subcommand(
      "params", "allocation parameter rows and their defining relations");

  std::string vb_model = "all";
  int vb_procs = 256, vb_samples = 10000;
  std::uint64_t vb_seed = default_seed();
  auto* ver_bounds = ver->add_subcommand(
      "alloc-bounds", "area/time ratio bounds of the initial allocation");
  ver_bounds->add_option("--model", vb_model,
                         "roofline | communication | amdahl | general | all");
  ver_bounds->add_option("--procs", vb_procs, "platform size");
  ver_bounds->add_option("--samples", vb_samples, "specs per model");
  ver_bounds->add_option("--seed", vb_seed, "RNG seed");

  std::string vm_model = "all";
  int vm_procs = 256, vm_samples = 2000;
  std::uint64_t vm_seed = default_seed();
  auto* ver_mono = ver->add_subcommand(
      "monotonic", "time/area monotonicity and the speedup bound");
  ver_mono->add_option("--model", vm_model, "model family or all");
  ver_mono->add_option("--procs", vm_procs, "platform size");
  ver_mono->add_option("--samples", vm_samples, "specs per model");
  ver_mono->add_option("--seed", vm_seed, "RNG seed");

  int l12_ell = 2;
  std::string l12_policy = "paper";
  auto* ver_l12 = ver->add_subcommand(
      "lemma12", "adversary phase gaps t_i - t_{i-1} >= 1/(ell+i)");
  ver_l12->add_option("--ell", l12_ell, "ell >= 2");
  ver_l12->add_option("--policy", l12_policy,
                      "paper | mintime | seq | fixed:<k> | fig6b");

  // --- oracle ---------------------------------------------------------
  std::string ora_graph;
  int ora_procs = 0, ora_max_tasks = 6, ora_max_procs = 8;
  long long ora_budget = 30'000'000;
  auto* ora = app.add_subcommand("oracle", "exact optimum for tiny graphs");
  ora->add_option("graph", ora_graph, "graph JSON file")->required();
  ora->add_option("--procs", ora_procs, "platform size (default: from file)");
  ora->add_option("--max-tasks", ora_max_tasks, "size refusal limit");
  ora->add_option("--max-procs", ora_max_procs, "processor refusal limit");
  ora->add_option("--budget", ora_budget, "search node budget");

  // --- sweep ----------------------------------------------------------
  std::string sw_config, sw_csv;
  int sw_jobs = 0;
  auto* sw = app.add_subcommand("sweep", "batch competitive reports to CSV");
  sw->add_option("--config", sw_config, "sweep config JSON")->required();
  sw->add_option("--csv", sw_csv, "output CSV (overrides config output)");
  sw->add_option("--jobs", sw_jobs, "parallel workers (default: cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      app.exit(e);
      return kExitOk;
    }
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (sim->parsed()) {
      const GraphFile gf = read_graph(sim_graph);
      const int P = resolve_procs(gf, sim_procs);
      const AllocationPolicy policy = AllocationPolicy::from_name(sim_policy);
      const Schedule sched = simulate(gf.graph, P, policy);
      const ScheduleCheck sc = validate_schedule(gf.graph, sched, P);
      std::cout << "tasks " << gf.graph.size() << ", P " << P << ", policy "
                << policy.name() << ", makespan " << sched.makespan
                << (sc.ok ? "" : " [INVALID SCHEDULE]") << "\n";
      if (!sim_out.empty()) write_schedule(sched, sim_out);
      if (!sim_report.empty()) {
        write_report(competitive_report(gf.graph, P, policy, sim_oracle),
                     sim_report);
      }
      return sc.ok ? kExitOk : kExitViolation;
    }

    if (gen_chains->parsed()) {
      const ChainsInstance inst = gen_chains_instance(chains_ell);
      write_graph(inst.graph, inst.P, chains_out);
      std::cout << "chains instance: K " << inst.K << ", chains "
                << inst.num_chains << ", tasks " << inst.graph.size() << ", P "
                << inst.P << " -> " << chains_out << "\n";
      return kExitOk;
    }

    if (gen_lb->parsed()) {
      const LBInstance inst =
          gen_lb_graph(model_from_name(lb_model), lb_procs, lb_eps,
                       AllocationPolicy::from_name(lb_policy));
      std::filesystem::create_directories(lb_out);
      const auto dir = std::filesystem::path(lb_out);
      write_graph(inst.graph, inst.P, (dir / "graph.json").string());
      std::ofstream meta(dir / "meta.json");
      meta << lb_meta_to_json(inst) << "\n";
      int failed = 0;
      for (const auto& c : inst.constraint_report) failed += !c.ok;
      std::cout << "lb instance: model " << model_name(inst.kind) << ", X "
                << inst.X << ", K " << inst.K << ", Y " << inst.Y << ", Z "
                << inst.Z << ", tasks " << inst.graph.size() << ", " << failed
                << " constraint(s) failed -> " << lb_out << "\n";
      return kExitOk;
    }

    if (gen_rnd->parsed()) {
      const TaskGraph g =
          gen_random_dag(rnd_seed, rnd_n, rnd_procs, model_from_name(rnd_model),
                         {}, rnd_density, rnd_layers);
      write_graph(g, rnd_procs, rnd_out);
      std::cout << "random dag: n " << g.size() << ", edges " << g.edges.size()
                << " -> " << rnd_out << "\n";
      return kExitOk;
    }

    if (ver_params->parsed()) {
      const ParamsCheck check = verify_params();
      std::printf("%-14s %-12s %-12s %-12s %-12s\n", "model", "alpha", "beta",
                  "mu", "ratio");
      for (const auto& row : check.rows) {
        std::printf("%-14s %-12.9f %-12.9f %-12.9f %-12.9f\n",
                    model_name(row.kind), row.params.alpha, row.params.beta,
                    row.params.mu, row.ratio);
      }
      for (const auto& v : check.violations) std::cout << v << "\n";
      std::cout << (check.pass ? "params: PASS" : "params: FAIL") << "\n";
      return check.pass ? kExitOk : kExitViolation;
    }

    if (ver_bounds->parsed() || ver_mono->parsed()) {
      const bool bounds = ver_bounds->parsed();
      const std::string& model = bounds ? vb_model : vm_model;
      const int P = bounds ? vb_procs : vm_procs;
      const int samples = bounds ? vb_samples : vm_samples;
      const std::uint64_t seed = bounds ? vb_seed : vm_seed;
      std::vector<Model> kinds;
      if (model == "all") {
        kinds = {Model::Roofline, Model::Communication, Model::Amdahl,
                 Model::General};
      } else {
        kinds = {model_from_name(model)};
      }
      bool pass = true;
      for (Model m : kinds) {
        const GridCheck check = bounds
                                    ? verify_alloc_bounds(m, P, samples, seed)
                                    : verify_monotonic(m, P, samples, seed);
        print_grid_result(model_name(m), check);
        pass = pass && check.violations.empty();
      }
      std::cout << (pass ? "PASS" : "FAIL") << "\n";
      return pass ? kExitOk : kExitViolation;
    }

    if (ver_l12->parsed()) {
      const PhaseGapCheck check =
          verify_phase_gaps(l12_ell, ChainAllocator::from_name(l12_policy));
      std::cout << "trace:";
      for (double t : check.trace.t) std::cout << " " << t;
      std::cout << "\nmakespan " << check.makespan << "\n";
      for (const auto& v : check.violations) std::cout << v << "\n";
      std::cout << (check.pass ? "lemma12: PASS" : "lemma12: FAIL") << "\n";
      return check.pass ? kExitOk : kExitViolation;
    }

    if (ora->parsed()) {
      const GraphFile gf = read_graph(ora_graph);
      const int P = resolve_procs(gf, ora_procs);
      const OracleResult res = brute_force_optimal(
          gf.graph, P, {ora_max_tasks, ora_max_procs, ora_budget});
      std::cout << "optimal makespan " << res.schedule.makespan << " ("
                << (res.optimal ? "exact" : "budget-limited best-found") << ", "
                << res.nodes << " nodes)\n";
      return kExitOk;
    }

    if (sw->parsed()) {
      const SweepConfig cfg = load_sweep_config(sw_config);
      const std::string csv = !sw_csv.empty() ? sw_csv : cfg.output;
      if (csv.empty()) {
        std::cerr << "sweep needs --csv or an \"output\" in the config\n";
        return kExitUsage;
      }
      return run_sweep(cfg, csv, sw_jobs);
    }
  } catch (const GraphIoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
