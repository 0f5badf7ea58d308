// Brute force for the node-based model: every time-ordered route per vessel,
// every load band pattern, and each volume LP solved by enumerating vertices
// (subsets of active constraints). Exponential; tiny instances only.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "lngopt/node_mip.hpp"

namespace oracle {

struct Row {
  std::vector<double> a;
  double lo, hi;
};

// max c.x subject to lo <= a.x <= hi for all rows; the rows must bound x.
// Returns -inf when infeasible.
inline double lp_by_vertices(const std::vector<double>& c, const std::vector<Row>& rows) {
  const std::size_t n = c.size();
  const double ninf = -std::numeric_limits<double>::infinity();
  auto feasible = [&](const Eigen::VectorXd& x) {
    for (const auto& r : rows) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += r.a[j] * x[static_cast<Eigen::Index>(j)];
      const double tol = 1e-7 * std::max({1.0, std::abs(r.lo), std::abs(r.hi)});
      if (s < r.lo - tol || s > r.hi + tol) return false;
    }
    return true;
  };
  if (n == 0) return feasible(Eigen::VectorXd()) ? 0.0 : ninf;
  struct Plane {
    const std::vector<double>* a;
    double b;
  };
  std::vector<Plane> planes;
  for (const auto& r : rows) {
    planes.push_back({&r.a, r.lo});
    if (r.hi != r.lo) planes.push_back({&r.a, r.hi});
  }
  double best = ninf;
  std::vector<std::size_t> pick(n);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t depth, std::size_t from) {
    if (depth == n) {
      Eigen::MatrixXd A(n, n);
      Eigen::VectorXd b(n);
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < n; ++j) A(r, j) = (*planes[pick[r]].a)[j];
        b[r] = planes[pick[r]].b;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      if (lu.rank() < static_cast<Eigen::Index>(n)) return;
      const Eigen::VectorXd x = lu.solve(b);
      if (!feasible(x)) return;
      double v = 0.0;
      for (std::size_t j = 0; j < n; ++j) v += c[j] * x[static_cast<Eigen::Index>(j)];
      best = std::max(best, v);
      return;
    }
    for (std::size_t p = from; p < planes.size(); ++p) {
      pick[depth] = p;
      rec(depth + 1, p + 1);
    }
  };
  rec(0, 0);
  return best;
}

// Best objective of one vessel sailing `route` from load `start`, or -inf.
inline double route_value(const lngopt::Instance& inst, const lngopt::NodeModelSets& sets, std::size_t k,
                          const std::vector<std::size_t>& route, double start = 0.0) {
  const lngopt::Vessel& v = inst.vessels[k];
  const double C = v.capacity, low = v.ballast_ceiling(), high = v.laden_floor(), fill = 0.985 * C;
  const double ninf = -std::numeric_limits<double>::infinity();
  auto in_band = [&](double x) { return (x >= -1e-9 && x <= low + 1e-9) || (x >= high - 1e-9 && x <= fill + 1e-9); };
  if (!in_band(start)) return ninf;
  const std::size_t r = route.size();
  if (r == 0) return 0.0;
  std::vector<double> c(r), burn_before(r, 0.0);  // burn before arriving at position q
  for (std::size_t q = 0; q < r; ++q) {
    const auto& ct = inst.contracts[route[q]];
    c[q] = -ct.price_on(ct.midpoint());
    if (q > 0) burn_before[q] = burn_before[q - 1] + sets.burn(k, route[q - 1], route[q]);
  }
  std::vector<Row> base;
  for (std::size_t q = 0; q < r; ++q) {
    const auto& ct = inst.contracts[route[q]];
    Row b{std::vector<double>(r, 0.0), 0, 0};
    b.a[q] = 1.0;
    if (ct.is_buy()) {
      b.lo = ct.v_min;
      b.hi = ct.v_max;
    } else {
      b.lo = -ct.v_max;
      b.hi = ct.v_min == 0.0 ? -v.idle_boil_off : -ct.v_min;
    }
    if (b.lo > b.hi) return ninf;
    base.push_back(b);
    // 0 <= L_q + V_q <= C, L_q = start + sum_{p<q} V_p - burn_before[q]
    Row cap{std::vector<double>(r, 0.0), -start + burn_before[q], C - start + burn_before[q]};
    for (std::size_t p = 0; p <= q; ++p) cap.a[p] = 1.0;
    base.push_back(cap);
  }
  // Band-checked loads: arrivals at q = 1..r-1 and the load after the last trade.
  std::vector<std::pair<std::vector<double>, double>> loads;  // (coefficients, constant)
  for (std::size_t q = 1; q < r; ++q) {
    std::vector<double> a(r, 0.0);
    for (std::size_t p = 0; p < q; ++p) a[p] = 1.0;
    loads.push_back({a, start - burn_before[q]});
  }
  loads.push_back({std::vector<double>(r, 1.0), start - burn_before[r - 1]});
  double best = ninf;
  for (std::size_t mask = 0; mask < (std::size_t{1} << loads.size()); ++mask) {
    auto rows = base;
    for (std::size_t l = 0; l < loads.size(); ++l) {
      const bool laden = (mask >> l) & 1;
      const double lo = laden ? high : 0.0, hi = laden ? fill : low;
      rows.push_back({loads[l].first, lo - loads[l].second, hi - loads[l].second});
    }
    best = std::max(best, lp_by_vertices(c, rows));
  }
  return best;
}

// Structural feasibility of a route under the model's precomputed sets.
inline bool route_allowed(const lngopt::NodeModelSets& sets, std::size_t k, const std::vector<std::size_t>& route) {
  for (std::size_t q = 0; q < route.size(); ++q) {
    if (sets.impossible(k, route[q])) return false;
    if (q == 0 && sets.first_forbidden(k, route[q])) return false;
    if (q > 0 && sets.successor_forbidden(k, route[q - 1], route[q])) return false;
    for (std::size_t p = 0; p < q; ++p)
      if (sets.later_forbidden(k, route[p], route[q])) return false;
  }
  return true;
}

// Optimum of the node model over all route combinations with at most
// `n_steps` visits per vessel.
inline double best_objective(const lngopt::Instance& inst, const lngopt::NodeModelSets& sets, std::size_t n_steps) {
  const std::size_t n = inst.contracts.size(), K = inst.vessels.size();
  // Per vessel: contract mask -> best value. Later-forbidden pairs include
  // every time-reversed pair, so each subset has at most one admissible order.
  std::vector<std::map<unsigned, double>> value(K);
  for (std::size_t k = 0; k < K; ++k) {
    std::vector<std::size_t> route;
    std::function<void(unsigned)> grow = [&](unsigned mask) {
      const double val = route_value(inst, sets, k, route);
      if (val > -std::numeric_limits<double>::infinity()) {
        auto [it, fresh] = value[k].emplace(mask, val);
        if (!fresh) it->second = std::max(it->second, val);
      }
      if (route.size() == n_steps) return;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (1u << i)) continue;
        route.push_back(i);
        if (route_allowed(sets, k, route)) grow(mask | (1u << i));
        route.pop_back();
      }
    };
    grow(0u);
  }
  double best = -std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, unsigned, double)> combine = [&](std::size_t k, unsigned used, double acc) {
    if (k == K) {
      best = std::max(best, acc);
      return;
    }
    for (const auto& [mask, val] : value[k])
      if (!(mask & used)) combine(k + 1, used | mask, acc + val);
  };
  combine(0, 0u, 0.0);
  return best;
}

}  // namespace oracle
