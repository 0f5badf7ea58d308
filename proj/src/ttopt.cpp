#include "lngopt/ttopt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace lngopt {

void Grid2D::check() const {
  auto axis = [](const std::vector<double>& v, const char* name) {
    if (v.empty()) throw std::invalid_argument(std::string("grid axis ") + name + " is empty");
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!(v[i] >= 0.0)) throw std::invalid_argument(std::string("grid axis ") + name + " has a negative value");
      if (i > 0 && !(v[i] > v[i - 1]))
        throw std::invalid_argument(std::string("grid axis ") + name + " is not strictly increasing");
    }
  };
  axis(o_values, "O");
  axis(r_values, "R");
}

std::vector<double> log_axis(double hi, std::size_t n) {
  std::vector<double> v{0.0};
  if (!(hi > 0.0) || n <= 1) return v;
  if (n == 2) return {0.0, hi};
  const double lo = hi * 1e-3;
  for (std::size_t k = 0; k + 1 < n; ++k)
    v.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(n - 2)));
  v.back() = hi;
  return v;
}

namespace {

class Search {
 public:
  Search(const Objective& f, const Grid2D& grid, const TtOptions& opt)
      : f_(f), grid_(grid), opt_(opt), values_(grid.size(), std::numeric_limits<double>::quiet_NaN()),
        seen_(grid.size(), false) {}

  OptResult run() {
    const std::size_t n = grid_.rows(), m = grid_.cols();
    const std::size_t rank = std::max<std::size_t>(1, std::min({opt_.rank, n, m}));
    std::mt19937_64 rng(opt_.seed);
    evaluate({0});
    for (std::size_t restart = 0; !done(); ++restart) {
      const std::size_t before = res_.evaluations_used;
      std::vector<std::size_t> cols(m);
      std::iota(cols.begin(), cols.end(), 0);
      std::shuffle(cols.begin() + (restart == 0 ? 1 : 0), cols.end(), rng);
      std::vector<std::size_t> J(cols.begin(), cols.begin() + static_cast<std::ptrdiff_t>(rank));
      std::vector<std::size_t> I;
      for (std::size_t sweep = 0; sweep < opt_.max_sweeps && !done(); ++sweep) {
        std::vector<std::size_t> batch;
        for (std::size_t j : J)
          for (std::size_t i = 0; i < n; ++i) batch.push_back(i * m + j);
        evaluate(batch);
        if (done()) break;
        Eigen::MatrixXd C(n, J.size());
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t c = 0; c < J.size(); ++c) C(i, c) = values_[i * m + J[c]];
        MaxvolResult mi = maxvol(transform(C), 1.01);
        res_.rank_deficient += mi.rank_deficient;
        std::vector<std::size_t> I_new = mi.rows;

        batch.clear();
        for (std::size_t i : I_new)
          for (std::size_t j = 0; j < m; ++j) batch.push_back(i * m + j);
        evaluate(batch);
        if (done()) break;
        Eigen::MatrixXd R(I_new.size(), m), U(I_new.size(), J.size());
        for (std::size_t r = 0; r < I_new.size(); ++r) {
          for (std::size_t j = 0; j < m; ++j) R(r, j) = values_[I_new[r] * m + j];
          for (std::size_t c = 0; c < J.size(); ++c) U(r, c) = values_[I_new[r] * m + J[c]];
        }
        MaxvolResult mj = maxvol(transform(R).transpose(), 1.01);
        res_.rank_deficient += mj.rank_deficient;

        // Skeleton approximation C U^+ R; probe the best unseen predictions.
        const Eigen::MatrixXd approx = C * U.completeOrthogonalDecomposition().pseudoInverse() * R;
        std::vector<std::size_t> unseen;
        for (std::size_t p = 0; p < grid_.size(); ++p)
          if (!seen_[p]) unseen.push_back(p);
        std::stable_sort(unseen.begin(), unseen.end(), [&](std::size_t a, std::size_t b) {
          return approx(a / m, a % m) > approx(b / m, b % m);
        });
        if (unseen.size() > opt_.exploit) unseen.resize(opt_.exploit);
        evaluate(unseen);

        const bool stable = std::set<std::size_t>(I.begin(), I.end()) == std::set<std::size_t>(I_new.begin(), I_new.end()) &&
                            std::set<std::size_t>(J.begin(), J.end()) == std::set<std::size_t>(mj.rows.begin(), mj.rows.end());
        I = I_new;
        J = mj.rows;
        if (stable) break;
      }
      if (!done() && res_.evaluations_used == before) {
        // Nothing new from this restart: take the first unseen point.
        for (std::size_t p = 0; p < grid_.size(); ++p)
          if (!seen_[p]) {
            evaluate({p});
            break;
          }
      }
    }
    return res_;
  }

 private:
  bool done() const {
    return !res_.error.empty() || res_.evaluations_used >= opt_.budget || res_.evaluations_used >= grid_.size();
  }

  // Maps values to (0, pi/2], largest near the incumbent, so maxvol pivots
  // drift towards good regions.
  Eigen::MatrixXd transform(const Eigen::MatrixXd& v) const {
    double lo = res_.best_value;
    for (const auto& t : res_.trace) lo = std::min(lo, t.value);
    const double spread = std::max(res_.best_value - lo, 1e-12 * std::max(1.0, std::abs(res_.best_value)));
    return v.unaryExpr([&](double x) { return std::acos(0.0) + std::atan(5.0 * (x - res_.best_value) / spread); });
  }

  void evaluate(std::vector<std::size_t> points) {
    std::vector<std::size_t> todo;
    for (std::size_t p : points) {
      if (done() || todo.size() + res_.evaluations_used >= opt_.budget) break;
      if (seen_[p] || std::find(todo.begin(), todo.end(), p) != todo.end()) continue;
      todo.push_back(p);
    }
    if (todo.empty()) return;
    const std::size_t m = grid_.cols();
    std::vector<double> out(todo.size());
    std::vector<std::exception_ptr> err(todo.size());
    auto work = [&](std::size_t k) {
      try {
        out[k] = f_(grid_.o_values[todo[k] / m], grid_.r_values[todo[k] % m]);
      } catch (...) {
        err[k] = std::current_exception();
      }
    };
    const std::size_t workers = std::min(std::max<std::size_t>(1, opt_.workers), todo.size());
    if (workers == 1) {
      for (std::size_t k = 0; k < todo.size(); ++k) {
        work(k);
        if (err[k]) break;
      }
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
          for (std::size_t k; (k = next++) < todo.size();) work(k);
        });
      for (auto& t : pool) t.join();
    }
    // Record in request order, stopping at the first failure.
    for (std::size_t k = 0; k < todo.size(); ++k) {
      if (err[k]) {
        try {
          std::rethrow_exception(err[k]);
        } catch (const std::exception& e) {
          res_.error = e.what();
        } catch (...) {
          res_.error = "unknown exception";
        }
        return;
      }
      const std::size_t p = todo[k];
      seen_[p] = true;
      values_[p] = out[k];
      TracePoint t{p / m, p % m, grid_.o_values[p / m], grid_.r_values[p % m], out[k]};
      if (res_.trace.empty() || t.value > res_.best_value) {
        res_.best_i = t.i;
        res_.best_j = t.j;
        res_.best_o = t.o;
        res_.best_r = t.r;
        res_.best_value = t.value;
      }
      res_.trace.push_back(t);
      ++res_.evaluations_used;
    }
  }

  const Objective& f_;
  const Grid2D& grid_;
  TtOptions opt_;
  std::vector<double> values_;
  std::vector<bool> seen_;
  OptResult res_;
};

}  // namespace

OptResult optimize(const Objective& f, const Grid2D& grid, const TtOptions& options) {
  grid.check();
  if (options.budget < 1) throw std::invalid_argument("tt-opt budget must be at least 1");
  return Search(f, grid, options).run();
}

std::string trace_csv(const OptResult& result) {
  std::ostringstream out;
  out.precision(17);
  out << "O,R,value,eval_index\n";
  for (std::size_t k = 0; k < result.trace.size(); ++k) {
    const auto& t = result.trace[k];
    out << t.o << ',' << t.r << ',' << t.value << ',' << k << '\n';
  }
  return out.str();
}

}  // namespace lngopt
