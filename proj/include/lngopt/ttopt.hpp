// Budget-limited black-box maximization over a 2D grid by cross
// approximation with maximum-volume pivoting.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lngopt {

struct Grid2D {
  std::vector<double> o_values;  // penalty axis
  std::vector<double> r_values;  // reward axis

  std::size_t rows() const { return o_values.size(); }
  std::size_t cols() const { return r_values.size(); }
  std::size_t size() const { return rows() * cols(); }
  /// Throws std::invalid_argument unless both axes are non-empty, strictly
  /// increasing and non-negative.
  void check() const;
};

/// 0 followed by n-1 log-spaced points ending at `hi`, spanning three decades.
/// Degenerates to {0} when hi <= 0.
std::vector<double> log_axis(double hi, std::size_t n);

struct MaxvolResult {
  std::vector<std::size_t> rows;
  bool rank_deficient = false;  // pivoted selection was used instead
  std::size_t swaps = 0;
};

/// Rows of an n x k matrix (k <= n) whose k x k submatrix has locally maximal
/// |det| under single-row swaps: no swap grows it by more than `threshold`.
MaxvolResult maxvol(const Eigen::MatrixXd& a, double threshold = 1.01, std::size_t max_swaps = 200);

struct TracePoint {
  std::size_t i = 0, j = 0;
  double o = 0.0, r = 0.0;
  double value = 0.0;
};

struct OptResult {
  std::size_t best_i = 0, best_j = 0;
  double best_o = 0.0, best_r = 0.0;
  double best_value = 0.0;
  std::size_t evaluations_used = 0;
  std::vector<TracePoint> trace;  // in evaluation order
  std::size_t rank_deficient = 0;  // maxvol calls that fell back to pivoting
  std::string error;               // set when f threw; the trace is partial
};

struct TtOptions {
  std::size_t budget = 32;
  std::uint64_t seed = 0;
  std::size_t rank = 2;
  std::size_t max_sweeps = 4;
  std::size_t exploit = 2;  // best predicted unseen points evaluated per sweep
  std::size_t workers = 1;  // concurrent evaluations within one batch
};

using Objective = std::function<double(double o, double r)>;

/// Maximizes f over the grid with at most options.budget evaluations. The
/// grid corner (0, 0) is evaluated first and no point is evaluated twice. The
/// sequence of evaluated points does not depend on the budget, so a larger
/// budget never yields a worse result.
OptResult optimize(const Objective& f, const Grid2D& grid, const TtOptions& options);

/// Columns: O, R, value, eval_index.
std::string trace_csv(const OptResult& result);

}  // namespace lngopt
