#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace lngopt::lp {

namespace {

constexpr double kPrimalTol = 1e-8;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kDropTol = 1e-14;
constexpr int kRefactorInterval = 100;
// A solve that ends after more eta updates than this refactors once more to
// confirm optimality on a fresh factorization.
constexpr int kFinalCheckUpdates = 30;

double hash_unit(int j) {
  std::uint64_t z = static_cast<std::uint64_t>(j) + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

}  // namespace

DualSimplex::DualSimplex(const Problem& p)
    : n_(p.n), m_(p.m), N_(p.n + p.m), col_start_(p.col_start), row_index_(p.row_index), value_(p.value) {
  if (col_start_.empty()) col_start_.assign(1, 0);
  // CSR copy for row-wise pivot row computation.
  row_start_.assign(m_ + 1, 0);
  for (int k = 0; k < col_start_[n_]; ++k) ++row_start_[row_index_[k] + 1];
  for (int i = 0; i < m_; ++i) row_start_[i + 1] += row_start_[i];
  col_index_.resize(row_index_.size());
  row_value_.resize(row_index_.size());
  std::vector<int> fill(row_start_.begin(), row_start_.end() - 1);
  for (int j = 0; j < n_; ++j)
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
      int pos = fill[row_index_[k]]++;
      col_index_[pos] = j;
      row_value_[pos] = value_[k];
    }

  cost_.assign(N_, 0.0);
  pert_.assign(N_, 0.0);
  lb_.assign(N_, 0.0);
  ub_.assign(N_, 0.0);
  for (int j = 0; j < n_; ++j) {
    cost_[j] = p.cost[j];
    lb_[j] = p.lower[j] <= -kInf ? -kArtificialBound : p.lower[j];
    ub_[j] = p.upper[j] >= kInf ? kArtificialBound : p.upper[j];
  }
  // Row boxes tightened by the activity range implied by column boxes.
  std::vector<double> act_lo(m_, 0.0), act_hi(m_, 0.0);
  for (int j = 0; j < n_; ++j)
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
      double a = value_[k];
      int i = row_index_[k];
      if (a > 0) {
        act_lo[i] += a * lb_[j];
        act_hi[i] += a * ub_[j];
      } else {
        act_lo[i] += a * ub_[j];
        act_hi[i] += a * lb_[j];
      }
    }
  for (int i = 0; i < m_; ++i) {
    double rl = std::max(p.row_lower[i], act_lo[i]);
    double ru = std::min(p.row_upper[i], act_hi[i]);
    if (rl > ru) {
      if (rl - ru > 1e-9 * (1.0 + std::abs(rl))) trivially_infeasible_ = true;
      ru = rl;
    }
    lb_[n_ + i] = -ru;
    ub_[n_ + i] = -rl;
  }
  x_.assign(N_, 0.0);
  d_.assign(N_, 0.0);
  status_.assign(N_, kAtLower);
  head_.assign(m_, 0);
  dse_.assign(m_, 1.0);
  reset_to_logical_basis();
}

void DualSimplex::reset_to_logical_basis() {
  for (int j = 0; j < n_; ++j) {
    status_[j] = cost_[j] >= 0.0 ? kAtLower : kAtUpper;
    x_[j] = status_[j] == kAtLower ? lb_[j] : ub_[j];
  }
  for (int i = 0; i < m_; ++i) {
    status_[n_ + i] = kBasic;
    head_[i] = n_ + i;
  }
  dse_.assign(m_, 1.0);
  factor_dirty_ = true;
  primal_dirty_ = true;
}

void DualSimplex::set_bounds(int j, double lower, double upper) {
  lb_[j] = lower;
  ub_[j] = upper;
  if (status_[j] == kAtLower) x_[j] = lb_[j];
  else if (status_[j] == kAtUpper) x_[j] = ub_[j];
  primal_dirty_ = true;
}

void DualSimplex::set_costs(const std::vector<double>& cost) {
  for (int j = 0; j < n_; ++j) cost_[j] = cost[j];
}

void DualSimplex::set_basis(const std::vector<std::uint8_t>& status) {
  if (static_cast<int>(status.size()) != N_ ||
      std::count(status.begin(), status.end(), kBasic) != m_) {
    reset_to_logical_basis();
    return;
  }
  status_ = status;
  int r = 0;
  for (int j = 0; j < N_; ++j) {
    if (status_[j] == kBasic) head_[r++] = j;
    else x_[j] = status_[j] == kAtLower ? lb_[j] : ub_[j];
  }
  dse_.assign(m_, 1.0);
  factor_dirty_ = true;
  primal_dirty_ = true;
}

void DualSimplex::column(int j, std::vector<double>& out) const {
  std::fill(out.begin(), out.end(), 0.0);
  if (j < n_) {
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) out[row_index_[k]] = value_[k];
  } else {
    out[j - n_] = 1.0;
  }
}

void DualSimplex::add_eta(const std::vector<double>& v, int r) {
  eta_row_.push_back(r);
  double piv = v[r];
  eta_pivot_.push_back(1.0 / piv);
  eta_start_.push_back(static_cast<int>(eta_index_.size()));
  for (int i = 0; i < m_; ++i) {
    if (i == r || std::abs(v[i]) <= kDropTol) continue;
    eta_index_.push_back(i);
    eta_value_.push_back(-v[i] / piv);
  }
}

void DualSimplex::ftran(std::vector<double>& v) const {
  const std::size_t k_end = eta_row_.size();
  for (std::size_t k = 0; k < k_end; ++k) {
    int p = eta_row_[k];
    double xp = v[p];
    if (xp == 0.0) continue;
    v[p] = eta_pivot_[k] * xp;
    int e = k + 1 < k_end ? eta_start_[k + 1] : static_cast<int>(eta_index_.size());
    for (int t = eta_start_[k]; t < e; ++t) v[eta_index_[t]] += eta_value_[t] * xp;
  }
}

void DualSimplex::btran(std::vector<double>& v) const {
  for (std::size_t k = eta_row_.size(); k-- > 0;) {
    int p = eta_row_[k];
    double s = eta_pivot_[k] * v[p];
    int e = k + 1 < eta_row_.size() ? eta_start_[k + 1] : static_cast<int>(eta_index_.size());
    for (int t = eta_start_[k]; t < e; ++t) s += eta_value_[t] * v[eta_index_[t]];
    v[p] = s;
  }
}

void DualSimplex::refactor() {
  std::vector<double> weight_of(N_, -1.0);
  for (int r = 0; r < m_; ++r) weight_of[head_[r]] = dse_[r];

  eta_row_.clear();
  eta_start_.clear();
  eta_index_.clear();
  eta_pivot_.clear();
  eta_value_.clear();

  std::vector<char> taken(m_, 0);
  std::vector<int> structural;
  for (int j = 0; j < N_; ++j) {
    if (status_[j] != kBasic) continue;
    if (j >= n_) {
      taken[j - n_] = 1;
      head_[j - n_] = j;
    } else {
      structural.push_back(j);
    }
  }
  std::stable_sort(structural.begin(), structural.end(), [&](int a, int b) {
    return col_start_[a + 1] - col_start_[a] < col_start_[b + 1] - col_start_[b];
  });
  std::vector<int> row_count(m_, 0);
  for (int j : structural)
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) ++row_count[row_index_[k]];

  std::vector<double> v(m_);
  for (int j : structural) {
    column(j, v);
    ftran(v);
    double vmax = 0.0;
    for (int i = 0; i < m_; ++i)
      if (!taken[i]) vmax = std::max(vmax, std::abs(v[i]));
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) --row_count[row_index_[k]];
    if (vmax < 1e-9) {
      // Dependent column: leave it nonbasic, a logical takes its place below.
      status_[j] = (x_[j] - lb_[j] <= ub_[j] - x_[j]) ? kAtLower : kAtUpper;
      x_[j] = status_[j] == kAtLower ? lb_[j] : ub_[j];
      primal_dirty_ = true;
      continue;
    }
    int best = -1;
    for (int i = 0; i < m_; ++i) {
      if (taken[i] || std::abs(v[i]) < 0.1 * vmax) continue;
      if (best < 0 || row_count[i] < row_count[best] ||
          (row_count[i] == row_count[best] && std::abs(v[i]) > std::abs(v[best])))
        best = i;
    }
    add_eta(v, best);
    taken[best] = 1;
    head_[best] = j;
  }
  for (int i = 0; i < m_; ++i) {
    if (taken[i]) continue;
    status_[n_ + i] = kBasic;
    head_[i] = n_ + i;
    primal_dirty_ = true;
  }
  for (int r = 0; r < m_; ++r) dse_[r] = weight_of[head_[r]] > 0.0 ? weight_of[head_[r]] : 1.0;
  updates_since_refactor_ = 0;
  factor_dirty_ = false;
}

void DualSimplex::compute_primal() {
  std::vector<double> rhs(m_, 0.0);
  for (int j = 0; j < N_; ++j) {
    if (status_[j] == kBasic || x_[j] == 0.0) continue;
    if (j < n_) {
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) rhs[row_index_[k]] -= value_[k] * x_[j];
    } else {
      rhs[j - n_] -= x_[j];
    }
  }
  ftran(rhs);
  for (int r = 0; r < m_; ++r) x_[head_[r]] = rhs[r];
  primal_dirty_ = false;
}

void DualSimplex::compute_duals() {
  std::vector<double> y(m_);
  for (int r = 0; r < m_; ++r) y[r] = working_cost(head_[r]);
  btran(y);
  for (int j = 0; j < N_; ++j) {
    if (status_[j] == kBasic) {
      d_[j] = 0.0;
      continue;
    }
    double dj = working_cost(j);
    if (j < n_) {
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) dj -= y[row_index_[k]] * value_[k];
    } else {
      dj -= y[j - n_];
    }
    d_[j] = dj;
  }
}

bool DualSimplex::fix_dual_infeasibilities() {
  bool flipped = false;
  for (int j = 0; j < N_; ++j) {
    if (status_[j] == kBasic || lb_[j] == ub_[j]) continue;
    if (status_[j] == kAtLower && d_[j] < -kDualTol) {
      status_[j] = kAtUpper;
      x_[j] = ub_[j];
      flipped = true;
    } else if (status_[j] == kAtUpper && d_[j] > kDualTol) {
      status_[j] = kAtLower;
      x_[j] = lb_[j];
      flipped = true;
    }
  }
  if (flipped) primal_dirty_ = true;
  return flipped;
}

void DualSimplex::perturb_costs() {
  for (int j = 0; j < n_; ++j) {
    double mag = 1e-7 * (1.0 + std::abs(cost_[j])) * (0.5 + 0.5 * hash_unit(j));
    pert_[j] = status_[j] == kAtUpper ? -mag : mag;
  }
  perturbed_ = true;
}

void DualSimplex::remove_perturbation() {
  std::fill(pert_.begin(), pert_.end(), 0.0);
  perturbed_ = false;
}

double DualSimplex::dual_objective_bound() const {
  double obj = 0.0, slack = 0.0;
  for (int j = 0; j < n_; ++j) {
    obj += working_cost(j) * x_[j];
    if (perturbed_) slack += std::abs(pert_[j]) * std::max(std::abs(lb_[j]), std::abs(ub_[j]));
  }
  return obj - slack;
}

double DualSimplex::objective() const {
  double obj = 0.0;
  for (int j = 0; j < n_; ++j) obj += cost_[j] * x_[j];
  return obj;
}

std::vector<double> DualSimplex::primal() const { return std::vector<double>(x_.begin(), x_.begin() + n_); }

bool DualSimplex::hit_artificial_bound() const {
  for (int j = 0; j < n_; ++j)
    if (std::abs(x_[j]) >= kArtificialBound - 1.0) return true;
  return false;
}

Status DualSimplex::solve(const Limits& limits) {
  if (trivially_infeasible_) return Status::infeasible;
  if (m_ == 0) {
    // No rows: every column sits at its cost-preferred bound.
    for (int j = 0; j < n_; ++j) {
      status_[j] = cost_[j] >= 0.0 ? kAtLower : kAtUpper;
      x_[j] = status_[j] == kAtLower ? lb_[j] : ub_[j];
    }
    return hit_artificial_bound() ? Status::unbounded : Status::optimal;
  }
  if (factor_dirty_) refactor();
  perturb_costs();
  compute_duals();
  fix_dual_infeasibilities();
  compute_primal();

  std::vector<double> rho(m_), col(m_), flip_delta(m_), tau(m_);
  std::vector<double> alpha(N_, 0.0);
  std::vector<int> touched;
  touched.reserve(N_);
  struct Candidate {
    int j;
    double ratio;
    double abs_alpha;
  };
  std::vector<Candidate> cand;
  std::vector<int> flips;
  std::size_t iterations = 0;
  int trouble = 0;
  int final_checks = 0;

  while (true) {
    if (iterations >= limits.max_iterations) {
      total_iterations_ += iterations;
      return Status::iteration_limit;
    }
    if (updates_since_refactor_ >= kRefactorInterval) {
      refactor();
      compute_primal();
      compute_duals();
      if (fix_dual_infeasibilities()) compute_primal();
    }
    if (limits.cutoff < kInf && iterations % 10 == 0 && dual_objective_bound() > limits.cutoff) {
      total_iterations_ += iterations;
      return Status::cutoff;
    }

    // Leaving row: largest scaled primal infeasibility.
    int r = -1;
    double best_score = 0.0;
    for (int i = 0; i < m_; ++i) {
      int j = head_[i];
      double infeas = 0.0;
      if (x_[j] < lb_[j] - kPrimalTol) infeas = lb_[j] - x_[j];
      else if (x_[j] > ub_[j] + kPrimalTol) infeas = x_[j] - ub_[j];
      if (infeas == 0.0) continue;
      double score = infeas * infeas / dse_[i];
      if (score > best_score) {
        best_score = score;
        r = i;
      }
    }
    if (r < 0) {
      if (perturbed_) {
        remove_perturbation();
        compute_duals();
        if (fix_dual_infeasibilities()) compute_primal();
        continue;
      }
      if (final_checks < 3 && updates_since_refactor_ > kFinalCheckUpdates) {
        ++final_checks;
        refactor();
        compute_primal();
        compute_duals();
        if (fix_dual_infeasibilities()) compute_primal();
        continue;
      }
      total_iterations_ += iterations;
      return hit_artificial_bound() ? Status::unbounded : Status::optimal;
    }

    const int p = head_[r];
    const bool to_lower = x_[p] < lb_[p];
    const double target = to_lower ? lb_[p] : ub_[p];
    const double delta = x_[p] - target;
    const double sgn = delta > 0 ? 1.0 : -1.0;

    std::fill(rho.begin(), rho.end(), 0.0);
    rho[r] = 1.0;
    btran(rho);
    for (int j : touched) alpha[j] = 0.0;
    touched.clear();
    for (int i = 0; i < m_; ++i) {
      double ri = rho[i];
      if (std::abs(ri) <= kDropTol) continue;
      if (status_[n_ + i] != kBasic) {
        alpha[n_ + i] = ri;
        touched.push_back(n_ + i);
      }
      for (int k = row_start_[i]; k < row_start_[i + 1]; ++k) {
        int j = col_index_[k];
        if (status_[j] == kBasic) continue;
        if (alpha[j] == 0.0) touched.push_back(j);
        alpha[j] += ri * row_value_[k];
        if (alpha[j] == 0.0) alpha[j] = 1e-300;  // keep it marked as touched
      }
    }

    cand.clear();
    for (int j : touched) {
      if (lb_[j] == ub_[j]) continue;
      double a = sgn * alpha[j];
      if (std::abs(a) < kPivotTol) continue;
      if (status_[j] == kAtLower && a > 0) cand.push_back({j, std::max(d_[j], 0.0) / a, a});
      else if (status_[j] == kAtUpper && a < 0) cand.push_back({j, std::max(-d_[j], 0.0) / -a, -a});
    }
    if (cand.empty()) {
      total_iterations_ += iterations;
      return Status::infeasible;
    }
    std::sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
      return a.ratio < b.ratio || (a.ratio == b.ratio && a.j < b.j);
    });

    // Bound-flipping ratio test: pass breakpoints while the dual slope stays positive.
    double slope = std::abs(delta);
    std::size_t K = cand.size();
    for (std::size_t i = 0; i < cand.size(); ++i) {
      double range = ub_[cand[i].j] - lb_[cand[i].j];
      double next = slope - cand[i].abs_alpha * range;
      if (next > 0.0 && i + 1 < cand.size()) {
        slope = next;
        continue;
      }
      if (next > kPrimalTol && i + 1 == cand.size()) {
        total_iterations_ += iterations;
        return Status::infeasible;
      }
      K = i;
      break;
    }
    // Harris pass among the remaining breakpoints for a stable pivot.
    double theta_max = kInf;
    for (std::size_t i = K; i < cand.size(); ++i) {
      double dj = std::abs(d_[cand[i].j]);
      theta_max = std::min(theta_max, (dj + kDualTol) / cand[i].abs_alpha);
    }
    std::size_t chosen = K;
    for (std::size_t i = K; i < cand.size() && cand[i].ratio <= theta_max; ++i)
      if (cand[i].abs_alpha > cand[chosen].abs_alpha) chosen = i;
    const int q = cand[chosen].j;
    flips.clear();
    for (std::size_t i = 0; i < K; ++i) flips.push_back(cand[i].j);

    column(q, col);
    ftran(col);
    const double alpha_rq = alpha[q];
    if (std::abs(col[r] - alpha_rq) > 1e-7 * (1.0 + std::abs(col[r])) || std::abs(col[r]) < kPivotTol) {
      if (++trouble <= 3 && updates_since_refactor_ > 0) {
        refactor();
        compute_primal();
        compute_duals();
        if (fix_dual_infeasibilities()) compute_primal();
        continue;
      }
    }
    trouble = 0;

    const double theta_d = d_[q] / alpha_rq;
    for (int j : touched)
      if (status_[j] != kBasic) d_[j] -= theta_d * alpha[j];
    d_[q] = 0.0;
    d_[p] = -theta_d;

    if (!flips.empty()) {
      std::fill(flip_delta.begin(), flip_delta.end(), 0.0);
      for (int j : flips) {
        double nx = status_[j] == kAtLower ? ub_[j] : lb_[j];
        double dx = nx - x_[j];
        status_[j] = status_[j] == kAtLower ? kAtUpper : kAtLower;
        x_[j] = nx;
        if (j < n_) {
          for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) flip_delta[row_index_[k]] += value_[k] * dx;
        } else {
          flip_delta[j - n_] += dx;
        }
      }
      ftran(flip_delta);
      for (int i = 0; i < m_; ++i) x_[head_[i]] -= flip_delta[i];
    }

    const double theta_p = (x_[p] - target) / col[r];
    for (int i = 0; i < m_; ++i)
      if (col[i] != 0.0) x_[head_[i]] -= theta_p * col[i];
    x_[q] += theta_p;

    // Dual steepest-edge weights.
    double w_r = 0.0;
    for (int i = 0; i < m_; ++i) w_r += rho[i] * rho[i];
    tau = rho;
    ftran(tau);
    const double piv = col[r];
    for (int i = 0; i < m_; ++i) {
      if (i == r || col[i] == 0.0) continue;
      double ratio = col[i] / piv;
      dse_[i] = std::max(dse_[i] - 2.0 * ratio * tau[i] + ratio * ratio * w_r, 1e-8);
    }
    dse_[r] = std::max(w_r / (piv * piv), 1e-8);

    status_[p] = to_lower ? kAtLower : kAtUpper;
    x_[p] = target;
    head_[r] = q;
    status_[q] = kBasic;
    add_eta(col, r);
    ++updates_since_refactor_;
    ++iterations;
  }
}

}  // namespace lngopt::lp
