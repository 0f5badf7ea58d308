// Command line front end: instance generation and checks, runs, the
// flexibility sweep, schedule validation and standalone LP solves.
#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "lngopt/big_pairs.hpp"
#include "lngopt/config.hpp"
#include "lngopt/generator.hpp"
#include "lngopt/insertion.hpp"
#include "lngopt/instance_io.hpp"
#include "lngopt/milp.hpp"
#include "lngopt/pipeline.hpp"
#include "lngopt/validator.hpp"

namespace fs = std::filesystem;
using namespace lngopt;

namespace {

// Flags that mirror config keys; a flag given on the command line wins over
// the config file.
struct ConfigFlags {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::vector<std::string> overrides;  // key=value

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config_file, "Config file (key = value lines)");
    add(app, "--instance", "instance", "Instance bundle directory");
    add(app, "--approach", "approach", "Comma separated approaches");
    add(app, "-o,--out", "output_dir", "Output directory");
    add(app, "--budget", "budget", "tt-opt evaluation budget");
    add(app, "--wallclock", "wallclock", "tt-opt time limit in seconds (replaces the budget)");
    add(app, "--seed", "seed", "tt-opt seed");
    add(app, "--workers", "workers", "Concurrent tt-opt evaluations");
    add(app, "--grid-o", "grid_o", "Points on the O axis");
    add(app, "--grid-r", "grid_r", "Points on the R axis");
    add(app, "--omega", "omega", "Over-delivery penalty per m3 in the insertion model");
    add(app, "--fill-fraction", "fill_fraction", "Override every vessel's fill fraction");
    add(app, "--node-limit", "node_limit", "Branch-and-bound node limit per MILP");
    add(app, "--relative-gap", "relative_gap", "Relative optimality gap per MILP");
    add(app, "--penalized-objective", "penalized_objective", "Score tt-opt by the penalized insertion objective");
    add(app, "--node-steps", "node_steps", "Route length of the node model");
    add(app, "--window-days", "window_days", "Decomposition window length");
    add(app, "--keep-fractions", "keep_fractions", "Flexibility fractions for bench");
    add(app, "--bench-seed", "bench_seed", "Seed of the flexibility restriction");
    app->add_option("--set", overrides, "Any config key as key=value");
  }

  RunConfig load() const {
    RunConfig c;
    if (!config_file.empty()) c = parse_config(read_text_file(config_file));
    for (const auto& [key, opt] : options)
      if (opt->count()) set_config_value(c, key, values.at(key));
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      set_config_value(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    c.check();
    return c;
  }

 private:
  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    options[key] = app->add_option(flag, values[key], help);
  }
};

void print_summary(const RunReport& rep) {
  if (!rep.error.empty()) std::fprintf(stderr, "error [%s]: %s\n", rep.error_stage.c_str(), rep.error.c_str());
  std::printf("instance %s: %zu trips, preprocessing %.2fs\n", rep.instance.c_str(), rep.trips,
              rep.preprocessing_seconds);
  for (const auto& a : rep.approaches) {
    std::printf("%-16s profit %18.2f  runtime %8.2fs  %s", to_string(a.approach), a.profit, a.runtime_seconds,
                a.has_schedule ? (a.valid ? "valid" : "INVALID") : "no schedule");
    if (a.approach == Approach::multistart_lns)
      std::printf("  best O=%g R=%g after %zu evaluations", a.best_o, a.best_r, a.evaluations);
    std::printf("\n");
    if (!a.error.empty()) std::printf("  error [%s]: %s\n", a.error_stage.c_str(), a.error.c_str());
    if (a.has_schedule && !a.valid) std::printf("%s", a.validation_summary.c_str());
  }
}

bool report_ok(const RunReport& rep) {
  if (!rep.error.empty()) return false;
  for (const auto& a : rep.approaches)
    if (!a.error.empty() || (a.has_schedule && !a.valid)) return false;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LNG trading and transportation planner"};
  app.require_subcommand(1);

  // instance gen | validate
  auto* inst_cmd = app.add_subcommand("instance", "Generate or check instance bundles");
  inst_cmd->require_subcommand(1);
  auto* gen = inst_cmd->add_subcommand("gen", "Write a generated instance bundle");
  std::uint64_t gen_seed = 1;
  GeneratorParams gp;
  std::string gen_out;
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--vessels", gp.n_vessels, "Number of vessels");
  gen->add_option("--buys", gp.n_buy, "Number of buy contracts");
  gen->add_option("--sells", gp.n_sell, "Number of sell contracts");
  gen->add_option("--small-frac", gp.small_fraction, "Share of small sells");
  gen->add_option("--horizon", gp.horizon_days, "Horizon in days");
  gen->add_option("--ports", gp.n_ports, "Number of ports");
  gen->add_option("--max-trip-days", gp.max_trip_days, "Longest gap between services (0 = default)");
  gen->add_option("--out", gen_out, "Bundle directory")->required();

  auto* check = inst_cmd->add_subcommand("validate", "Parse and check an instance bundle");
  std::string check_path;
  check->add_option("path", check_path, "Bundle directory")->required();

  // run
  auto* run_cmd = app.add_subcommand("run", "Run the configured approaches on one instance");
  ConfigFlags run_flags;
  run_flags.attach(run_cmd);
  std::string dump_trips, dump_bigpairs, export_dir;
  run_cmd->add_option("--dump-trips", dump_trips, "Write every trip as CSV");
  run_cmd->add_option("--dump-bigpairs", dump_bigpairs, "Write the big-pairs solution at O = R = 0 as JSON");
  run_cmd->add_option("--export-lp", export_dir, "Write the big-pairs and insertion models at O = R = 0 as LP files");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Flexibility sweep over restricted copies of one instance");
  ConfigFlags bench_flags;
  bench_flags.attach(bench_cmd);
  std::string bench_csv_path;
  bench_cmd->add_option("--csv", bench_csv_path, "CSV output (default: stdout)");

  // validate
  auto* val_cmd = app.add_subcommand("validate", "Check a schedule against an instance");
  std::string val_schedule, val_instance, val_mode = "main";
  val_cmd->add_option("schedule", val_schedule, "Schedule JSON")->required();
  val_cmd->add_option("instance", val_instance, "Instance bundle directory")->required();
  val_cmd->add_option("--mode", val_mode, "main or node")->check(CLI::IsMember({"main", "node"}));

  // lp-solve
  auto* lp_cmd = app.add_subcommand("lp-solve", "Solve an LP file with the built-in or an external solver");
  std::string lp_file, lp_external, lp_work = ".", lp_solution;
  std::size_t lp_nodes = 200000;
  lp_cmd->add_option("file", lp_file, "LP file")->required();
  lp_cmd->add_option("--external", lp_external, "Command with {lp} and {sol} placeholders");
  lp_cmd->add_option("--work-dir", lp_work, "Scratch directory for the external solver");
  lp_cmd->add_option("--node-limit", lp_nodes, "Node limit of the built-in solver");
  lp_cmd->add_option("--solution", lp_solution, "Write the solution file here (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const Instance inst = generate_instance(gen_seed, gp);
      save_instance(inst, gen_out);
      std::printf("%s: %zu vessels, %zu buys, %zu sells, %d days, flexible share %.3f\n", gen_out.c_str(),
                  inst.vessels.size(), inst.count(ContractKind::buy), inst.count(ContractKind::sell),
                  inst.horizon_days, flexible_share(inst));
      return 0;
    }
    if (*check) {
      const Instance inst = load_instance(check_path);
      std::printf("ok: %zu ports, %zu vessels, %zu buys, %zu sells, %d days\n", inst.ports.size(),
                  inst.vessels.size(), inst.count(ContractKind::buy), inst.count(ContractKind::sell),
                  inst.horizon_days);
      return 0;
    }
    if (*run_cmd) {
      const RunConfig cfg = run_flags.load();
      if (cfg.instance.empty()) throw ConfigError("instance is required");
      const Instance raw = load_instance(cfg.instance);
      const Instance inst = configured_instance(raw, cfg);
      if (!dump_trips.empty() || !dump_bigpairs.empty() || !export_dir.empty()) {
        const TripSet trips = generate_trips(inst);
        if (!dump_trips.empty()) {
          std::ofstream out(dump_trips);
          write_trips_csv(out, inst, trips);
        }
        const BigPairSolution big = solve_big_pairs(inst, trips, {});
        if (!dump_bigpairs.empty()) write_text_file(dump_bigpairs, big_pairs_to_json(big, trips, inst));
        if (!export_dir.empty()) {
          fs::create_directories(export_dir);
          write_text_file(fs::path(export_dir) / "bigpairs.lp", export_lp(build_big_pairs_model(trips, {})));
          if (big.has_solution) {
            InsertionOptions io;
            io.omega = cfg.omega;
            io.laden_upper_is_capacity = cfg.laden_upper_is_capacity;
            const Neighborhood nb = derive_neighborhood(big, trips, inst);
            write_text_file(fs::path(export_dir) / "insertion.lp", export_lp(build_insertion_model(nb, inst, io)));
          }
        }
      }
      RunReport rep = run(raw, cfg);
      write_outputs(rep, raw, cfg);
      print_summary(rep);
      if (cfg.output_dir.empty()) std::cout << rep.to_json();
      return report_ok(rep) ? 0 : 2;
    }
    if (*bench_cmd) {
      const RunConfig cfg = bench_flags.load();
      if (cfg.instance.empty()) throw ConfigError("instance is required");
      const auto rows = bench(load_instance(cfg.instance), cfg);
      const std::string csv = bench_csv(rows);
      if (bench_csv_path.empty())
        std::cout << csv;
      else
        write_text_file(bench_csv_path, csv);
      bool ok = true;
      for (const auto& r : rows) ok = ok && r.valid;
      return ok ? 0 : 2;
    }
    if (*val_cmd) {
      const Instance inst = load_instance(val_instance);
      const Schedule s = schedule_from_json(read_text_file(val_schedule), inst);
      const ValidationMode mode = validation_mode_from_string(val_mode);
      const ViolationReport rep = validate(s, inst, mode);
      std::cout << rep.to_json();
      return rep.ok() ? 0 : 1;
    }
    if (*lp_cmd) {
      const MilpModel model = parse_lp(read_text_file(lp_file));
      MilpSolution sol;
      if (lp_external.empty()) {
        SolveOptions so;
        so.node_limit = lp_nodes;
        sol = solve(model, so);
      } else {
        sol = solve_external(model, lp_external, lp_work);
      }
      std::fprintf(stderr, "status %s objective %.10g nodes %zu\n", to_string(sol.status), sol.objective, sol.nodes);
      const std::string text = format_solution_file(model, sol);
      if (lp_solution.empty())
        std::cout << text;
      else
        write_text_file(lp_solution, text);
      return sol.has_solution() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
