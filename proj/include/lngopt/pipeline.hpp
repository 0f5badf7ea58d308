// End-to-end runs: trips -> big pairs -> insertion, the tt-opt multistart
// over (O, R), the node-model baselines, and the flexibility sweep.
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "lngopt/big_pairs.hpp"
#include "lngopt/config.hpp"
#include "lngopt/insertion.hpp"
#include "lngopt/schedule.hpp"
#include "lngopt/trips.hpp"
#include "lngopt/ttopt.hpp"
#include "lngopt/validator.hpp"

namespace lngopt {

struct ApproachReport {
  Approach approach = Approach::bigpairs;
  bool has_schedule = false;
  Schedule schedule;
  ProfitBreakdown breakdown;  // evaluate_profit of the schedule
  double profit = 0.0;        // breakdown.net
  double model_objective = 0.0;
  double runtime_seconds = 0.0;  // preprocessing + search
  double search_seconds = 0.0;
  std::vector<std::string> solver_statuses;  // "stage:status"
  double best_o = 0.0, best_r = 0.0;
  std::size_t evaluations = 0;
  bool valid = false;
  std::string validation_summary;
  std::string schedule_path;
  std::vector<std::string> audit_failures;
  std::size_t audited_insertions = 0;  // insertion solutions re-checked for this approach
  std::vector<std::string> notes;
  // Every chosen big trip has zero over-delivery (LNS approaches only).
  bool no_over_delivery = false;
  std::string error;
  std::string error_stage;
  OptResult search;  // multistart only
};

struct RunReport {
  std::string instance;
  std::size_t trips = 0;
  double preprocessing_seconds = 0.0;
  std::vector<ApproachReport> approaches;
  std::string error;
  std::string error_stage;

  const ApproachReport* find(Approach approach) const;
  std::string to_json() const;
};

/// Result of one (O, R) evaluation of the big-pairs + insertion pipeline.
struct LnsEvaluation {
  BigPairSolution big;
  Schedule schedule;
  ProfitBreakdown breakdown;
  double objective = 0.0;  // insertion model objective (net - omega * W)
  bool valid = false;
  bool from_insertion = false;  // false: lifted big-pairs schedule
  bool audited = false;         // insertion returned a solution and it was re-checked
  bool no_over_delivery = false;
  std::vector<std::string> statuses;
  std::vector<std::string> audit_failures;
  std::string validation_summary;
};

/// Runs big pairs at any (O, R) and inserts small sells. Thread-safe;
/// insertion results are shared between points that choose the same trips.
class LnsEvaluator {
 public:
  LnsEvaluator(const Instance& instance, const TripSet& trips, const RunConfig& config);

  std::shared_ptr<const LnsEvaluation> evaluate(double o, double r);
  /// Lifted big-pairs schedule at (O, R) without insertion.
  std::shared_ptr<const LnsEvaluation> big_pairs_only(double o, double r);
  std::size_t insertion_solves() const;

 private:
  BigPairSolution solve_big(double o, double r);

  const Instance& instance_;
  const TripSet& trips_;
  RunConfig config_;
  mutable std::mutex mutex_;
  std::vector<std::uint8_t> basis_;
  std::map<std::vector<std::size_t>, std::shared_ptr<const LnsEvaluation>> memo_;
  std::size_t solves_ = 0;
};

/// O axis over [0, 2 x max unit price], R axis over [0, max|P_t| / max(1, max y_t)].
Grid2D default_grid(const Instance& instance, const TripSet& trips, const RunConfig& config);

/// Applies config-level instance overrides (fill fraction).
Instance configured_instance(const Instance& instance, const RunConfig& config);

/// Stage failures are recorded in the report, never thrown.
RunReport run(const Instance& instance, const RunConfig& config);
/// Loads config.instance first; a load failure yields a report with stage "load".
RunReport run(const RunConfig& config);

/// Writes report.json, per-approach schedules and daily CSVs, and the tt-opt
/// trace into config.output_dir, filling in schedule paths.
void write_outputs(RunReport& report, const Instance& instance, const RunConfig& config);

struct BenchRow {
  double fraction = 0.0;
  double flexible_share = 0.0;
  Approach approach = Approach::bigpairs;
  double profit = 0.0;
  bool valid = false;
};

/// Runs every configured approach on restrict_flexibility(root, f) for each
/// keep fraction.
std::vector<BenchRow> bench(const Instance& root, const RunConfig& config);
/// Columns: fraction, approach, profit.
std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace lngopt
