#include "lngopt/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <json.hpp>
#include <set>
#include <sstream>

#include "lngopt/generator.hpp"
#include "lngopt/instance_io.hpp"
#include "lngopt/node_mip.hpp"

namespace lngopt {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Value handed to tt-opt for points that produced no valid schedule.
constexpr double kFailedValue = -1e18;

std::string stage_status(const char* stage, SolveStatus s) { return std::string(stage) + ":" + to_string(s); }

void fill_profit(ApproachReport& a, const Instance& inst, ValidationMode mode) {
  a.has_schedule = true;
  a.breakdown = evaluate_profit(a.schedule, inst, mode);
  a.profit = a.breakdown.net;
  const ViolationReport rep = validate(a.schedule, inst, mode);
  a.valid = rep.ok();
  a.validation_summary = rep.summary();
}

void copy_evaluation(ApproachReport& a, const LnsEvaluation& e, const Instance& inst) {
  a.schedule = e.schedule;
  a.model_objective = e.objective;
  a.solver_statuses = e.statuses;
  a.audit_failures = e.audit_failures;
  a.audited_insertions = e.audited ? 1 : 0;
  a.no_over_delivery = e.no_over_delivery;
  fill_profit(a, inst, ValidationMode::main);
}

SolveOptions solver_options(const RunConfig& c) {
  SolveOptions s;
  s.node_limit = c.node_limit;
  s.relative_gap = c.relative_gap;
  return s;
}

}  // namespace

// ---------------------------------------------------------------- evaluator

LnsEvaluator::LnsEvaluator(const Instance& instance, const TripSet& trips, const RunConfig& config)
    : instance_(instance), trips_(trips), config_(config) {}

std::size_t LnsEvaluator::insertion_solves() const {
  std::lock_guard lock(mutex_);
  return solves_;
}

BigPairSolution LnsEvaluator::solve_big(double o, double r) {
  BigPairOptions bo;
  bo.solver = solver_options(config_);
  {
    std::lock_guard lock(mutex_);
    bo.solver.warm_basis = basis_;
  }
  BigPairSolution big = solve_big_pairs(instance_, trips_, PenaltyParams{o, r}, bo);
  std::lock_guard lock(mutex_);
  if (basis_.empty() && !big.root_basis.empty()) basis_ = big.root_basis;
  return big;
}

std::shared_ptr<const LnsEvaluation> LnsEvaluator::big_pairs_only(double o, double r) {
  auto e = std::make_shared<LnsEvaluation>();
  e->big = solve_big(o, r);
  e->no_over_delivery = e->big.no_over_delivery(trips_);
  e->statuses.push_back(stage_status("bigpairs", e->big.status));
  if (!e->big.has_solution) return e;
  e->schedule = lift_big_pairs(e->big, trips_, instance_);
  e->breakdown = evaluate_profit(e->schedule, instance_);
  e->objective = e->big.profit;
  const ViolationReport rep = validate(e->schedule, instance_);
  e->valid = rep.ok();
  e->validation_summary = rep.summary();
  return e;
}

std::shared_ptr<const LnsEvaluation> LnsEvaluator::evaluate(double o, double r) {
  BigPairSolution big = solve_big(o, r);
  {
    std::lock_guard lock(mutex_);
    if (auto it = memo_.find(big.chosen); it != memo_.end() && big.has_solution) return it->second;
  }
  auto e = std::make_shared<LnsEvaluation>();
  e->big = std::move(big);
  e->no_over_delivery = e->big.no_over_delivery(trips_);
  e->statuses.push_back(stage_status("bigpairs", e->big.status));
  if (!e->big.has_solution) return e;

  InsertionOptions io;
  io.solver = solver_options(config_);
  io.omega = config_.omega;
  io.laden_upper_is_capacity = config_.laden_upper_is_capacity;
  const Neighborhood nb = derive_neighborhood(e->big, trips_, instance_);
  InsertionResult ins = solve_insertion(nb, e->big, trips_, instance_, io);
  e->statuses.push_back(stage_status("insertion", ins.status));
  e->audit_failures = ins.audit_failures;
  e->audited = ins.has_solution;
  bool use_insertion = ins.has_solution;
  if (use_insertion && ins.audit_failures.empty()) {
    const ViolationReport rep = validate(ins.schedule, instance_);
    use_insertion = rep.ok();
    if (!use_insertion) e->validation_summary = rep.summary();
  } else {
    use_insertion = false;
  }
  if (use_insertion) {
    e->schedule = std::move(ins.schedule);
    e->objective = ins.objective;
    e->from_insertion = true;
  } else {
    e->schedule = lift_big_pairs(e->big, trips_, instance_);
    e->objective = e->big.profit;
  }
  e->breakdown = evaluate_profit(e->schedule, instance_);
  const ViolationReport rep = validate(e->schedule, instance_);
  e->valid = rep.ok();
  if (!rep.ok()) e->validation_summary = rep.summary();

  std::lock_guard lock(mutex_);
  ++solves_;
  auto [it, fresh] = memo_.emplace(e->big.chosen, e);
  return fresh ? e : it->second;
}

// ---------------------------------------------------------------- helpers

Grid2D default_grid(const Instance& inst, const TripSet& trips, const RunConfig& c) {
  Grid2D g;
  g.o_values = log_axis(2.0 * inst.max_unit_price(), c.grid_o);
  g.r_values = log_axis(trips.max_abs_profit() / std::max(1, trips.max_potential()), c.grid_r);
  return g;
}

Instance configured_instance(const Instance& inst, const RunConfig& c) {
  Instance out = inst;
  if (c.fill_fraction > 0.0) {
    for (auto& v : out.vessels) v.fill_fraction = c.fill_fraction;
    check_invariants(out);
  }
  return out;
}

const ApproachReport* RunReport::find(Approach a) const {
  for (const auto& r : approaches)
    if (r.approach == a) return &r;
  return nullptr;
}

std::string RunReport::to_json() const {
  using nlohmann::ordered_json;
  ordered_json j;
  j["instance"] = instance;
  j["trips"] = trips;
  j["preprocessing_seconds"] = preprocessing_seconds;
  if (!error.empty()) j["error"] = {{"stage", error_stage}, {"message", error}};
  j["approaches"] = ordered_json::array();
  for (const auto& a : approaches) {
    ordered_json x;
    x["approach"] = to_string(a.approach);
    x["has_schedule"] = a.has_schedule;
    x["profit"] = a.profit;
    x["revenue"] = a.breakdown.revenue;
    x["purchase_cost"] = a.breakdown.purchase_cost;
    x["fuel_cost"] = a.breakdown.fuel_cost;
    x["free_lng_cost"] = a.breakdown.free_lng_cost;
    x["over_delivery_volume"] = a.breakdown.over_delivery_volume;
    x["model_objective"] = a.model_objective;
    x["runtime_seconds"] = a.runtime_seconds;
    x["search_seconds"] = a.search_seconds;
    x["solver_statuses"] = a.solver_statuses;
    x["best_o"] = a.best_o;
    x["best_r"] = a.best_r;
    x["evaluations"] = a.evaluations;
    x["valid"] = a.valid;
    if (!a.validation_summary.empty()) x["validation"] = a.validation_summary;
    if (!a.schedule_path.empty()) x["schedule"] = a.schedule_path;
    x["no_over_delivery"] = a.no_over_delivery;
    x["audited_insertions"] = a.audited_insertions;
    if (!a.audit_failures.empty()) x["audit_failures"] = a.audit_failures;
    if (!a.notes.empty()) x["notes"] = a.notes;
    if (!a.error.empty()) x["error"] = {{"stage", a.error_stage}, {"message", a.error}};
    j["approaches"].push_back(std::move(x));
  }
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------- run

namespace {

void run_multistart(ApproachReport& a, LnsEvaluator& ev, const Instance& inst, const TripSet& trips,
                    const RunConfig& c) {
  const Grid2D grid = default_grid(inst, trips, c);
  std::mutex mu;
  std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const LnsEvaluation>> seen;
  auto index_of = [](const std::vector<double>& axis, double x) {
    return static_cast<std::size_t>(std::lower_bound(axis.begin(), axis.end(), x) - axis.begin());
  };
  const Objective f = [&](double o, double r) {
    const auto key = std::make_pair(index_of(grid.o_values, o), index_of(grid.r_values, r));
    std::shared_ptr<const LnsEvaluation> e;
    {
      std::lock_guard lock(mu);
      if (auto it = seen.find(key); it != seen.end()) e = it->second;
    }
    if (!e) {
      e = ev.evaluate(o, r);
      std::lock_guard lock(mu);
      seen.emplace(key, e);
    }
    if (!e->valid) return kFailedValue;
    return c.penalized_objective ? e->objective : e->breakdown.net;
  };

  TtOptions to;
  to.seed = c.seed;
  to.rank = c.rank;
  to.workers = c.workers;
  OptResult res;
  if (c.wallclock_seconds > 0.0) {
    // Growing budgets replay the same evaluation prefix from the cache, so
    // the time limit only decides how far along the sequence we get.
    const auto t0 = Clock::now();
    for (std::size_t b = 1;; b = std::min(2 * b, grid.size())) {
      to.budget = b;
      res = optimize(f, grid, to);
      if (b >= grid.size() || !res.error.empty() || seconds_since(t0) >= c.wallclock_seconds) break;
    }
    a.notes.push_back("wallclock budget reached " + std::to_string(res.evaluations_used) + " evaluations");
  } else {
    to.budget = c.budget;
    res = optimize(f, grid, to);
  }
  a.search = res;
  a.evaluations = res.evaluations_used;
  a.best_o = res.best_o;
  a.best_r = res.best_r;
  if (!res.error.empty()) {
    a.error = res.error;
    a.error_stage = "ttopt";
  }
  if (res.trace.empty()) return;
  const auto key = std::make_pair(res.best_i, res.best_j);
  const auto it = seen.find(key);
  if (it == seen.end()) return;
  copy_evaluation(a, *it->second, inst);
  // Audit results cover every distinct insertion solve of the search.
  a.audit_failures.clear();
  a.audited_insertions = 0;
  std::set<const LnsEvaluation*> counted;
  for (const auto& [ij, e] : seen) {
    if (!counted.insert(e.get()).second) continue;
    a.audited_insertions += e->audited ? 1 : 0;
    for (const auto& f : e->audit_failures)
      a.audit_failures.push_back("O=" + format_double(grid.o_values[ij.first]) +
                                 " R=" + format_double(grid.r_values[ij.second]) + ": " + f);
  }
  a.notes.push_back("distinct big-pairs selections: " + std::to_string(ev.insertion_solves()));
}

void run_node(ApproachReport& a, const Instance& inst, const RunConfig& c) {
  NodeOptions no;
  no.solver = solver_options(c);
  no.n_steps = c.node_steps;
  no.window_days = c.window_days;
  no.max_binaries = c.node_max_binaries;
  if (a.approach == Approach::node_mip) {
    NodeSolution s = solve_full(inst, no);
    a.solver_statuses.push_back(stage_status("node_mip", s.status));
    if (!s.note.empty()) a.notes.push_back(s.note);
    if (!s.note.empty()) return;  // not attempted; the note says why
    if (s.status == SolveStatus::infeasible || s.status == SolveStatus::unbounded) {
      a.error = std::string("no solution: ") + to_string(s.status);
      a.error_stage = "node_mip";
      return;
    }
    a.schedule = std::move(s.schedule);
    a.model_objective = s.objective;
  } else {
    DecomposedResult d = solve_decomposed(inst, no);
    for (SolveStatus s : d.window_status) a.solver_statuses.push_back(stage_status("window", s));
    a.notes = d.notes;
    a.schedule = std::move(d.schedule);
    a.model_objective = d.objective;
  }
  fill_profit(a, inst, ValidationMode::node);
}

}  // namespace

RunReport run(const Instance& original, const RunConfig& c) {
  RunReport rep;
  rep.instance = original.name;
  Instance inst;
  try {
    c.check();
    inst = configured_instance(original, c);
  } catch (const std::exception& e) {
    rep.error = e.what();
    rep.error_stage = "config";
    return rep;
  }

  const bool needs_trips = std::any_of(c.approaches.begin(), c.approaches.end(), [](Approach a) {
    return a == Approach::bigpairs || a == Approach::single_lns || a == Approach::multistart_lns;
  });
  TripSet trips;
  if (needs_trips) {
    const auto t0 = Clock::now();
    try {
      trips = generate_trips(inst);
    } catch (const std::exception& e) {
      rep.error = e.what();
      rep.error_stage = "trips";
      return rep;
    }
    rep.preprocessing_seconds = seconds_since(t0);
    rep.trips = trips.trips.size();
  }

  LnsEvaluator ev(inst, trips, c);
  for (Approach approach : c.approaches) {
    ApproachReport a;
    a.approach = approach;
    const auto t0 = Clock::now();
    try {
      switch (approach) {
        case Approach::bigpairs: {
          const auto e = ev.big_pairs_only(0.0, 0.0);
          a.solver_statuses = e->statuses;
          if (!e->big.has_solution) throw std::runtime_error("big pairs found no solution");
          copy_evaluation(a, *e, inst);
          a.model_objective = e->big.profit;
          break;
        }
        case Approach::single_lns: {
          const auto e = ev.evaluate(0.0, 0.0);
          if (!e->big.has_solution) {
            a.solver_statuses = e->statuses;
            throw std::runtime_error("big pairs found no solution");
          }
          copy_evaluation(a, *e, inst);
          a.evaluations = 1;
          if (!e->from_insertion) a.notes.push_back("insertion failed; lifted big-pairs schedule kept");
          break;
        }
        case Approach::multistart_lns:
          run_multistart(a, ev, inst, trips, c);
          break;
        case Approach::node_mip:
        case Approach::node_decomposed:
          run_node(a, inst, c);
          break;
      }
    } catch (const std::exception& e) {
      a.error = e.what();
      a.error_stage = a.error_stage.empty() ? to_string(approach) : a.error_stage;
    }
    a.search_seconds = seconds_since(t0);
    const bool uses_trips = approach != Approach::node_mip && approach != Approach::node_decomposed;
    a.runtime_seconds = a.search_seconds + (uses_trips ? rep.preprocessing_seconds : 0.0);
    rep.approaches.push_back(std::move(a));
  }
  return rep;
}

RunReport run(const RunConfig& c) {
  Instance inst;
  try {
    inst = load_instance(c.instance);
  } catch (const std::exception& e) {
    RunReport rep;
    rep.instance = c.instance;
    rep.error = e.what();
    rep.error_stage = "load";
    return rep;
  }
  return run(inst, c);
}

void write_outputs(RunReport& rep, const Instance& original, const RunConfig& c) {
  if (c.output_dir.empty()) return;
  namespace fs = std::filesystem;
  const fs::path dir(c.output_dir);
  fs::create_directories(dir);
  const Instance inst = configured_instance(original, c);
  for (auto& a : rep.approaches) {
    const std::string name = to_string(a.approach);
    if (a.has_schedule) {
      const fs::path p = dir / (name + ".schedule.json");
      write_text_file(p, schedule_to_json(a.schedule, inst));
      write_text_file(dir / (name + ".daily.csv"), schedule_daily_csv(a.schedule, inst));
      a.schedule_path = p.string();
    }
    if (a.approach == Approach::multistart_lns && !a.search.trace.empty())
      write_text_file(dir / "trace.csv", trace_csv(a.search));
  }
  write_text_file(dir / "config.txt", format_config(c));
  write_text_file(dir / "report.json", rep.to_json());
}

// ---------------------------------------------------------------- bench

std::vector<BenchRow> bench(const Instance& root, const RunConfig& c) {
  std::vector<BenchRow> rows;
  std::vector<double> fractions = c.keep_fractions;
  std::sort(fractions.begin(), fractions.end());
  for (double f : fractions) {
    const Instance inst = restrict_flexibility(root, f, c.bench_seed);
    const RunReport rep = run(inst, c);
    if (!rep.error.empty()) throw std::runtime_error("bench fraction " + format_double(f) + ": " + rep.error);
    for (const auto& a : rep.approaches) {
      BenchRow row;
      row.fraction = f;
      row.flexible_share = flexible_share(inst);
      row.approach = a.approach;
      row.profit = a.profit;
      row.valid = a.has_schedule && a.valid;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "fraction,approach,profit\n";
  for (const auto& r : rows)
    out << format_double(r.fraction) << ',' << to_string(r.approach) << ',' << format_double(r.profit) << '\n';
  return out.str();
}

}  // namespace lngopt
