#include "lngopt/node_mip.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "lngopt/validator.hpp"

namespace lngopt {

namespace {

constexpr double kVol = 1e-3;  // model volume unit: 1e3 m3
constexpr double kMoney = 1e-6;
constexpr double kFill = 0.985;

std::string sid(std::size_t a) { return std::to_string(a); }

}  // namespace

SignedBounds signed_bounds(const Contract& c) {
  if (c.is_buy()) return {c.v_min, c.v_max};
  return {-c.v_max, -c.v_min};
}

NodeModelSets build_node_sets(const Instance& inst) {
  NodeModelSets s;
  const std::size_t n = inst.contracts.size(), K = inst.vessels.size();
  s.contracts = n;
  s.vessels = K;
  for (const auto& c : inst.contracts) {
    s.midpoint.push_back(c.midpoint());
    s.slot_.push_back(c.is_sell() && c.v_min == 0.0);
  }
  for (const auto& v : inst.vessels) s.idle_rate.push_back(v.idle_boil_off);
  s.travel_days_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Contract& a = inst.contracts[i];
      const Contract& b = inst.contracts[j];
      s.travel_days_[i * n + j] =
          b.release - a.release + (b.deadline - b.release) / 2 - (a.deadline - a.release) / 2 - 1;
    }
  s.speed_.assign(K * n * n, 0.0);
  s.rate_.assign(K * n * n, 0.0);
  s.successor_.assign(K * n * n, 0);
  s.later_.assign(K * n * n, 0);
  s.impossible_.assign(K * n, 0);
  s.first_forbidden_.assign(K * n, 0);

  for (std::size_t k = 0; k < K; ++k) {
    const Vessel& v = inst.vessels[k];
    const double cap = kFill * v.capacity;
    for (std::size_t i = 0; i < n; ++i) {
      const Contract& c = inst.contracts[i];
      const SignedBounds b = signed_bounds(c);
      const bool too_big = c.is_buy() ? b.lower > cap : std::abs(b.upper) > cap;
      const bool outside_rent = c.midpoint() < v.rent_start || c.midpoint() > v.rent_end;
      s.impossible_[k * n + i] = too_big || outside_rent;
      s.first_forbidden_[k * n + i] = c.is_sell() || b.lower > cap;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Contract& a = inst.contracts[i];
      const auto rows = v.rows(FuelMode::lng_only, a.is_buy());
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t p = s.pair(k, i, j);
        const int T = s.T(i, j);
        const double dist = inst.distance(a.port, inst.contracts[j].port);
        // Slowest row reaching j in T days; dist 0 needs no speed.
        const ConsumptionRow* row = nullptr;
        if (T >= 0 && !rows.empty()) {
          for (const auto& r : rows)
            if (dist == 0.0 || (T > 0 && r.speed * 24.0 * T >= dist * (1.0 - 1e-12))) {
              row = &r;
              break;
            }
        }
        if (!row) {
          s.later_[p] = 1;
          continue;
        }
        s.speed_[p] = row->speed;
        s.rate_[p] = 24.0 * (row->consumption + row->boil_off);
        const double sail = s.rate_[p] * T;
        const Contract& b = inst.contracts[j];
        const SignedBounds ba = signed_bounds(a), bb = signed_bounds(b);
        bool m = sail > 0.25 * v.capacity;
        if (a.is_buy() && b.is_buy() && ba.lower + bb.lower - sail > cap) m = true;
        if (a.is_sell() && b.is_sell() && std::abs(ba.upper) + std::abs(bb.upper) + sail > cap) m = true;
        s.successor_[p] = m;
      }
    }
  }
  return s;
}

std::size_t default_node_steps(const NodeModelSets& s, const std::vector<std::size_t>& included) {
  std::vector<std::size_t> cs = included;
  if (cs.empty())
    for (std::size_t i = 0; i < s.contracts; ++i) cs.push_back(i);
  if (cs.empty()) return 1;
  int lo = s.midpoint[cs.front()], hi = lo, dmin = 0;
  for (std::size_t i : cs) {
    lo = std::min(lo, s.midpoint[i]);
    hi = std::max(hi, s.midpoint[i]);
    for (std::size_t j : cs)
      for (std::size_t k = 0; k < s.vessels; ++k)
        if (i != j && s.speed(k, i, j) > 0.0) {
          const int d = s.T(i, j) + 1;
          if (dmin == 0 || d < dmin) dmin = d;
        }
  }
  if (dmin == 0) return 1;
  return std::min(cs.size(), static_cast<std::size_t>((hi - lo) / dmin) + 1);
}

namespace {

struct Layout {
  std::vector<std::size_t> cs;
  std::vector<double> start;
  std::vector<NodeSubproblem::Anchor> anchor;
  std::vector<std::vector<std::uint8_t>> fixed0;  // [k][i] x forced to 0 everywhere

  Layout(const Instance& inst, const NodeModelSets& sets, const NodeSubproblem& sub) {
    const std::size_t K = inst.vessels.size(), n = inst.contracts.size();
    cs = sub.contracts;
    if (cs.empty())
      for (std::size_t i = 0; i < n; ++i) cs.push_back(i);
    std::sort(cs.begin(), cs.end());
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
    start = sub.start_load;
    start.resize(K, 0.0);
    anchor = sub.anchors;
    anchor.resize(K);
    fixed0.assign(K, std::vector<std::uint8_t>(n, 0));
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t i = 0; i < n; ++i) fixed0[k][i] = sets.impossible(k, i);
      if (k < sub.banned.size())
        for (std::size_t i : sub.banned[k]) fixed0[k][i] = 1;
      for (std::size_t o = 0; o < K; ++o)
        if (o != k && anchor[o].contract != kNoContract) fixed0[k][anchor[o].contract] = 1;
    }
    for (std::size_t k = 0; k < K; ++k)
      if (anchor[k].contract != kNoContract) fixed0[k][anchor[k].contract] = 0;
  }

  // Whether x_i_k_q is forced to zero.
  bool zero(std::size_t k, std::size_t i, std::size_t q, const NodeModelSets& sets) const {
    if (fixed0[k][i]) return true;
    if (anchor[k].contract != kNoContract) return (q == 0) != (i == anchor[k].contract);
    return q == 0 && sets.first_forbidden(k, i);
  }
  bool anchored(std::size_t k, std::size_t i, std::size_t q) const {
    return q == 0 && anchor[k].contract == i;
  }
};

std::string xn(std::size_t i, std::size_t k, std::size_t q) { return "x_" + sid(i) + "_" + sid(k) + "_" + sid(q); }
std::string vn(std::size_t i, std::size_t k, std::size_t q) { return "V_" + sid(i) + "_" + sid(k) + "_" + sid(q); }
std::string ln(std::size_t k, std::size_t q) { return "L_" + sid(k) + "_" + sid(q); }
std::string kn(std::size_t k, std::size_t q) { return "kappa_" + sid(k) + "_" + sid(q); }

// Signed model bounds of V_i_k_q when visited (C3).
SignedBounds visit_bounds(const Instance& inst, const NodeModelSets& sets, std::size_t k, std::size_t i) {
  SignedBounds b = signed_bounds(inst.contracts[i]);
  if (sets.slot(i)) b.upper = -sets.idle_rate[k];
  return b;
}

}  // namespace

MilpModel build_node_model(const Instance& inst, const NodeModelSets& sets, std::size_t n_steps,
                           const NodeSubproblem& sub) {
  if (n_steps < 1) throw std::invalid_argument("node model needs at least one step");
  const Layout lay(inst, sets, sub);
  const std::size_t K = inst.vessels.size(), Q = n_steps;
  MilpModel m;
  auto id = [&](const std::string& name) { return *m.find_variable(name); };

  for (std::size_t k = 0; k < K; ++k) {
    const Vessel& v = inst.vessels[k];
    for (std::size_t q = 0; q < Q; ++q)
      for (std::size_t i : lay.cs) {
        const Contract& c = inst.contracts[i];
        m.add_binary(xn(i, k, q));
        const SignedBounds b = signed_bounds(c);
        double lo = c.is_buy() ? 0.0 : b.lower, hi = c.is_buy() ? b.upper : 0.0;
        double price = c.price_on(c.midpoint());
        if (lay.anchored(k, i, q)) {
          lo = hi = lay.anchor[k].volume;
          price = 0.0;
        }
        m.add_continuous(vn(i, k, q), lo * kVol, hi * kVol, -price * kMoney / kVol);
      }
    for (std::size_t q = 0; q <= Q; ++q) {
      const double l0 = lay.start[k] * kVol;
      if (q == 0)
        m.add_continuous(ln(k, q), l0, l0);
      else
        m.add_continuous(ln(k, q), 0.0, v.capacity * kVol);
      m.add_binary(kn(k, q));
    }
  }

  for (std::size_t k = 0; k < K; ++k) {
    const Vessel& v = inst.vessels[k];
    const double C = v.capacity * kVol;
    // Pair products for consecutive positions.
    std::vector<std::vector<LinearTerm>> burn_terms(Q);
    for (std::size_t q = 0; q + 1 < Q; ++q)
      for (std::size_t i : lay.cs)
        for (std::size_t j : lay.cs) {
          if (i == j || sets.forbidden(k, i, j)) continue;
          if (lay.zero(k, i, q, sets) || lay.zero(k, j, q + 1, sets)) continue;
          const std::string zname = "z_" + sid(i) + "_" + sid(j) + "_" + sid(k) + "_" + sid(q);
          const std::size_t z = m.add_binary(zname);
          const std::size_t xi = id(xn(i, k, q)), xj = id(xn(j, k, q + 1));
          m.add_constraint(zname + "_a", {{z, 1.0}, {xi, -1.0}}, Comparator::le, 0.0);
          m.add_constraint(zname + "_b", {{z, 1.0}, {xj, -1.0}}, Comparator::le, 0.0);
          m.add_constraint(zname + "_c", {{z, 1.0}, {xi, -1.0}, {xj, -1.0}}, Comparator::ge, -1.0);
          burn_terms[q].push_back({z, sets.burn(k, i, j) * kVol});
        }

    for (std::size_t q = 0; q < Q; ++q) {
      // C1 as a recursion: L_(q+1) = L_q + sum V_q - burn of the leg q -> q+1.
      std::vector<LinearTerm> rec{{id(ln(k, q + 1)), 1.0}, {id(ln(k, q)), -1.0}};
      std::vector<LinearTerm> after{{id(ln(k, q)), 1.0}};
      for (std::size_t i : lay.cs) {
        rec.push_back({id(vn(i, k, q)), -1.0});
        after.push_back({id(vn(i, k, q)), 1.0});
      }
      for (const auto& t : burn_terms[q]) rec.push_back(t);
      m.add_constraint("C1_" + sid(k) + "_" + sid(q), std::move(rec), Comparator::eq, 0.0);
      // C2
      m.add_constraint("C2lo_" + sid(k) + "_" + sid(q), after, Comparator::ge, 0.0);
      m.add_constraint("C2hi_" + sid(k) + "_" + sid(q), std::move(after), Comparator::le, C);
      // C3
      for (std::size_t i : lay.cs) {
        const std::size_t x = id(xn(i, k, q)), V = id(vn(i, k, q));
        if (lay.anchored(k, i, q)) continue;  // volume fixed by bounds
        const SignedBounds b = visit_bounds(inst, sets, k, i);
        m.add_constraint("C3lo_" + sid(i) + "_" + sid(k) + "_" + sid(q), {{V, 1.0}, {x, -b.lower * kVol}},
                         Comparator::ge, 0.0);
        m.add_constraint("C3hi_" + sid(i) + "_" + sid(k) + "_" + sid(q), {{V, 1.0}, {x, -b.upper * kVol}},
                         Comparator::le, 0.0);
      }
    }
    // C4 on every load, including the one after the last position.
    for (std::size_t q = 0; q <= Q; ++q) {
      const std::size_t L = id(ln(k, q)), kap = id(kn(k, q));
      m.add_constraint("C4lo_" + sid(k) + "_" + sid(q), {{L, 1.0}, {kap, -v.laden_floor() * kVol}},
                       Comparator::ge, 0.0);
      m.add_constraint("C4hi_" + sid(k) + "_" + sid(q),
                       {{L, 1.0}, {kap, -(kFill * v.capacity - v.ballast_ceiling()) * kVol}}, Comparator::le,
                       v.ballast_ceiling() * kVol);
    }
    // C5. The later-visit rule is aggregated over q' > q, which is equivalent
    // under C7.
    for (std::size_t q = 0; q < Q; ++q)
      for (std::size_t i : lay.cs) {
        if (lay.zero(k, i, q, sets)) continue;
        for (std::size_t j : lay.cs) {
          if (i == j) continue;
          if (sets.later_forbidden(k, i, j)) {
            std::vector<LinearTerm> row{{id(xn(i, k, q)), 1.0}};
            for (std::size_t r = q + 1; r < Q; ++r)
              if (!lay.zero(k, j, r, sets)) row.push_back({id(xn(j, k, r)), 1.0});
            if (row.size() > 1)
              m.add_constraint("C5a_" + sid(k) + "_" + sid(i) + "_" + sid(j) + "_" + sid(q), std::move(row),
                               Comparator::le, 1.0);
          } else if (sets.successor_forbidden(k, i, j) && q + 1 < Q && !lay.zero(k, j, q + 1, sets)) {
            m.add_constraint("C5m_" + sid(k) + "_" + sid(i) + "_" + sid(j) + "_" + sid(q),
                             {{id(xn(i, k, q)), 1.0}, {id(xn(j, k, q + 1)), 1.0}}, Comparator::le, 1.0);
          }
        }
      }
    // C7 (per position), C8, C9, C10 and anchors.
    for (std::size_t q = 0; q < Q; ++q) {
      std::vector<LinearTerm> here, next;
      for (std::size_t i : lay.cs) {
        here.push_back({id(xn(i, k, q)), 1.0});
        if (q + 1 < Q) next.push_back({id(xn(i, k, q + 1)), 1.0});
      }
      m.add_constraint("C7s_" + sid(k) + "_" + sid(q), here, Comparator::le, 1.0);
      if (q + 1 < Q) {
        for (auto& t : here) t.coef = -1.0;
        next.insert(next.end(), here.begin(), here.end());
        m.add_constraint("C8_" + sid(k) + "_" + sid(q), std::move(next), Comparator::le, 0.0);
      }
      for (std::size_t i : lay.cs) {
        const std::size_t x = id(xn(i, k, q));
        if (lay.anchored(k, i, q))
          m.add_constraint("anchor_" + sid(k), {{x, 1.0}}, Comparator::eq, 1.0);
        else if (sets.impossible(k, i))
          m.add_constraint("C9_" + sid(i) + "_" + sid(k) + "_" + sid(q), {{x, 1.0}}, Comparator::eq, 0.0);
        else if (lay.zero(k, i, q, sets))
          m.add_constraint((q == 0 ? "C10_" : "fix_") + sid(i) + "_" + sid(k) + "_" + sid(q), {{x, 1.0}},
                           Comparator::eq, 0.0);
      }
    }
  }
  // C7: each contract at most once.
  for (std::size_t i : lay.cs) {
    std::vector<LinearTerm> row;
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t q = 0; q < Q; ++q) row.push_back({id(xn(i, k, q)), 1.0});
    m.add_constraint("C7c_" + sid(i), std::move(row), Comparator::le, 1.0);
  }
  return m;
}

namespace {

// Node-mode schedule from signed steps, loads recomputed along the route.
VesselSchedule route_schedule(const Instance& inst, const NodeModelSets& sets, std::size_t k, double start,
                              const std::vector<NodeStep>& route) {
  VesselSchedule vs;
  vs.vessel = k;
  vs.start_volume = start;
  double vol = start;
  for (std::size_t q = 0; q < route.size(); ++q) {
    const std::size_t i = route[q].contract;
    const Contract& c = inst.contracts[i];
    if (q > 0) {
      const std::size_t p = route[q - 1].contract;
      const double dist = inst.distance(inst.contracts[p].port, c.port);
      Leg leg;
      leg.speed = sets.speed(k, p, i);
      leg.fuel_mode = FuelMode::lng_only;
      leg.sail_hours = dist > 0.0 ? dist / leg.speed : 0.0;
      leg.idle_hours = std::max(0.0, 24.0 * (sets.T(p, i) + 1) - leg.sail_hours);
      leg.lng_burn = sets.burn(k, p, i);
      vs.legs.push_back(leg);
      vol -= leg.lng_burn;
    }
    PortCall call;
    call.contract = i;
    call.port = c.port;
    call.day = c.midpoint();
    call.volume = std::abs(route[q].volume);
    vol += route[q].volume;
    vs.calls.push_back(call);
    vs.onboard.push_back(vol);
  }
  return vs;
}

std::vector<NodeStep> visited(const std::vector<NodeStep>& steps) {
  std::vector<NodeStep> out;
  for (const auto& s : steps)
    if (s.contract != kNoContract) out.push_back(s);
  return out;
}

}  // namespace

std::vector<std::string> audit_node_solution(const NodeSolution& sol, const Instance& inst, const NodeModelSets& sets,
                                             const NodeSubproblem& sub, double tol) {
  std::vector<std::string> out;
  const Layout lay(inst, sets, sub);
  const double vtol = tol / kVol;  // model tolerance in m3
  std::vector<int> taken(inst.contracts.size(), 0);
  double objective = 0.0;
  for (std::size_t k = 0; k < sol.steps.size(); ++k) {
    const Vessel& v = inst.vessels[k];
    const auto& st = sol.steps[k];
    const std::string tag = "vessel " + v.id;
    double L = lay.start[k];
    bool stopped = false;
    for (std::size_t q = 0; q < st.size(); ++q) {
      const std::size_t i = st[q].contract;
      if (std::abs(sol.load[k][q] - L) > vtol)
        out.push_back(tag + " C1: load at step " + sid(q) + " differs from the trade/burn sum");
      if (i == kNoContract) {
        stopped = true;
        if (std::abs(st[q].volume) > vtol) out.push_back(tag + " C3: volume without a visit");
        continue;
      }
      if (stopped) out.push_back(tag + " C8: visit after an empty step");
      ++taken[i];
      if (lay.zero(k, i, q, sets)) out.push_back(tag + " C9/C10: forbidden visit of " + inst.contracts[i].id);
      if (lay.anchored(k, i, q)) {
        if (std::abs(st[q].volume - lay.anchor[k].volume) > vtol) out.push_back(tag + " anchor volume changed");
      } else {
        const SignedBounds b = visit_bounds(inst, sets, k, i);
        if (st[q].volume < b.lower - vtol || st[q].volume > b.upper + vtol)
          out.push_back(tag + " C3: volume outside bounds at " + inst.contracts[i].id);
        objective -= inst.contracts[i].price_on(inst.contracts[i].midpoint()) * st[q].volume;
      }
      const double after = L + st[q].volume;
      if (after < -vtol || after > v.capacity + vtol) out.push_back(tag + " C2: capacity after step " + sid(q));
      for (std::size_t r = q + 1; r < st.size(); ++r) {
        const std::size_t j = st[r].contract;
        if (j == kNoContract) continue;
        if (sets.later_forbidden(k, i, j)) out.push_back(tag + " C5: " + inst.contracts[j].id + " unreachable later");
        if (r == q + 1 && sets.successor_forbidden(k, i, j))
          out.push_back(tag + " C5: " + inst.contracts[j].id + " forbidden right after " + inst.contracts[i].id);
      }
      L = after;
      if (q + 1 < st.size() && st[q + 1].contract != kNoContract) L -= sets.burn(k, i, st[q + 1].contract);
    }
    if (!sol.load[k].empty() && std::abs(sol.load[k].back() - L) > vtol)
      out.push_back(tag + " C1: final load differs");
    for (std::size_t q = 0; q < sol.load[k].size(); ++q) {
      const double l = sol.load[k][q];
      const bool ok = sol.kappa[k][q] ? (l >= v.laden_floor() - vtol && l <= kFill * v.capacity + vtol)
                                      : (l >= -vtol && l <= v.ballast_ceiling() + vtol);
      if (!ok) out.push_back(tag + " C4: load " + std::to_string(l) + " inconsistent with kappa at step " + sid(q));
    }
  }
  for (std::size_t i = 0; i < taken.size(); ++i)
    if (taken[i] > 1) out.push_back("C7: contract " + inst.contracts[i].id + " taken twice");
  if (std::abs(objective - sol.objective) > tol / kMoney * std::max(1.0, std::abs(sol.objective) * kMoney))
    out.push_back("C0: objective differs from the priced volumes");
  return out;
}

NodeSolution solve_node(const Instance& inst, const NodeModelSets& sets, const NodeSubproblem& sub,
                        const NodeOptions& opt) {
  const Layout lay(inst, sets, sub);
  const std::size_t K = inst.vessels.size();
  NodeSolution sol;
  sol.n_steps = opt.n_steps ? opt.n_steps : default_node_steps(sets, lay.cs);
  sol.schedule = Schedule::empty(inst, "node_mip");
  for (std::size_t k = 0; k < K; ++k) sol.schedule.vessels[k].start_volume = lay.start[k];

  // Size estimate before building anything.
  const std::size_t Q = sol.n_steps, n = lay.cs.size();
  std::size_t estimate = K * (n * Q + Q + 1);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t i : lay.cs)
      for (std::size_t j : lay.cs)
        if (i != j && !sets.forbidden(k, i, j)) estimate += Q > 0 ? Q - 1 : 0;
  if (estimate > opt.max_binaries) {
    sol.status = SolveStatus::budget_exhausted;
    sol.note = "model too large: about " + sid(estimate) + " binaries";
    return sol;
  }

  MilpModel m = build_node_model(inst, sets, Q, sub);
  sol.binaries = m.num_binaries();
  SolveOptions so = opt.solver;
  if (so.incumbent.empty()) {
    // Idle everywhere except fixed first visits.
    std::vector<double> x(m.num_variables(), 0.0);
    for (std::size_t k = 0; k < K; ++k) {
      double L = lay.start[k];
      if (lay.anchor[k].contract != kNoContract) {
        x[*m.find_variable(xn(lay.anchor[k].contract, k, 0))] = 1.0;
        x[*m.find_variable(vn(lay.anchor[k].contract, k, 0))] = lay.anchor[k].volume * kVol;
      }
      for (std::size_t q = 0; q <= Q; ++q) {
        if (q == 1 && lay.anchor[k].contract != kNoContract) L += lay.anchor[k].volume;
        x[*m.find_variable(ln(k, q))] = L * kVol;
        x[*m.find_variable(kn(k, q))] = L >= inst.vessels[k].laden_floor() - 1e-9 ? 1.0 : 0.0;
      }
    }
    so.incumbent = std::move(x);
  }
  MilpSolution ms = solve(m, so);
  sol.status = ms.status;
  sol.nodes = ms.nodes;
  sol.gap = ms.gap;
  if (!ms.has_solution()) return sol;
  sol.objective = ms.objective / kMoney;

  sol.steps.assign(K, std::vector<NodeStep>(Q));
  sol.kappa.assign(K, std::vector<int>(Q + 1, 0));
  sol.load.assign(K, std::vector<double>(Q + 1, 0.0));
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t q = 0; q < Q; ++q)
      for (std::size_t i : lay.cs)
        if (ms.values[*m.find_variable(xn(i, k, q))] > 0.5) {
          if (sol.steps[k][q].contract != kNoContract)
            throw std::logic_error("node model: two contracts at one position");
          sol.steps[k][q] = {i, ms.values[*m.find_variable(vn(i, k, q))] / kVol};
        }
    for (std::size_t q = 0; q <= Q; ++q) {
      sol.kappa[k][q] = ms.values[*m.find_variable(kn(k, q))] > 0.5;
      sol.load[k][q] = ms.values[*m.find_variable(ln(k, q))] / kVol;
    }
    sol.schedule.vessels[k] = route_schedule(inst, sets, k, lay.start[k], visited(sol.steps[k]));
  }
  return sol;
}

NodeSolution solve_full(const Instance& inst, const NodeOptions& opt) {
  return solve_node(inst, build_node_sets(inst), {}, opt);
}

DecomposedResult solve_decomposed(const Instance& inst, const NodeOptions& opt) {
  DecomposedResult res;
  const NodeModelSets sets = build_node_sets(inst);
  const std::size_t K = inst.vessels.size();
  const int window = std::max(1, opt.window_days);
  res.windows = static_cast<std::size_t>((inst.horizon_days + window - 1) / window);
  if (res.windows == 0) res.windows = 1;

  std::vector<std::vector<NodeStep>> committed(K);  // including the current anchor
  std::vector<double> anchor_load(K, 0.0);          // load on arrival at the anchor
  std::vector<std::uint8_t> used(inst.contracts.size(), 0);

  for (std::size_t w = 0; w < res.windows; ++w) {
    const bool last = w + 1 == res.windows;
    const int end = last ? std::max(inst.horizon_days, window * static_cast<int>(w + 1)) : window * static_cast<int>(w + 1);
    NodeSubproblem sub;
    sub.start_load.assign(K, 0.0);
    sub.anchors.assign(K, {});
    sub.banned.assign(K, {});
    for (std::size_t k = 0; k < K; ++k) {
      if (committed[k].empty()) continue;
      sub.anchors[k] = {committed[k].back().contract, committed[k].back().volume};
      sub.start_load[k] = anchor_load[k];
      sub.contracts.push_back(committed[k].back().contract);
      // Anything the earlier part of the route cannot precede stays out.
      for (std::size_t q = 0; q + 1 < committed[k].size(); ++q)
        for (std::size_t j = 0; j < inst.contracts.size(); ++j)
          if (sets.later_forbidden(k, committed[k][q].contract, j)) sub.banned[k].push_back(j);
    }
    for (std::size_t i = 0; i < inst.contracts.size(); ++i)
      if (!used[i] && sets.midpoint[i] < end) sub.contracts.push_back(i);

    NodeOptions o = opt;
    o.n_steps = 0;
    NodeSolution sol = solve_node(inst, sets, sub, o);
    res.window_status.push_back(sol.status);
    if (!sol.note.empty()) res.notes.push_back("window " + sid(w) + ": " + sol.note);
    if (sol.steps.empty()) continue;

    for (std::size_t k = 0; k < K; ++k) {
      const auto route = visited(sol.steps[k]);
      if (route.empty()) continue;
      const bool anchored = !committed[k].empty();
      std::size_t cut = route.size();  // positions [0, cut) are committed
      if (!last) {
        cut = 0;
        for (std::size_t q = 0; q < route.size(); ++q)
          if (inst.contracts[route[q].contract].is_buy()) cut = q + 1;
      }
      // Loads along the route to find the arrival load at the new anchor.
      double L = anchored ? anchor_load[k] : 0.0;
      for (std::size_t q = 0; q < cut; ++q) {
        if (q > 0) L -= sets.burn(k, route[q - 1].contract, route[q].contract);
        if (q + 1 == cut) anchor_load[k] = L;
        L += route[q].volume;
      }
      for (std::size_t q = anchored ? 1 : 0; q < cut; ++q) {
        committed[k].push_back(route[q]);
        used[route[q].contract] = 1;
      }
    }
  }

  res.schedule = Schedule::empty(inst, "node_decomposed");
  for (std::size_t k = 0; k < K; ++k) res.schedule.vessels[k] = route_schedule(inst, sets, k, 0.0, committed[k]);
  res.objective = evaluate_profit(res.schedule, inst, ValidationMode::node).net;
  return res;
}

}  // namespace lngopt
