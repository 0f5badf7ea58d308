#include <algorithm>
#include <cmath>
#include <numeric>

#include "lngopt/ttopt.hpp"

namespace lngopt {

MaxvolResult maxvol(const Eigen::MatrixXd& a, double threshold, std::size_t max_swaps) {
  const auto n = static_cast<std::size_t>(a.rows());
  const auto k = static_cast<std::size_t>(a.cols());
  MaxvolResult res;
  if (k == 0) return res;
  if (k >= n) {
    res.rows.resize(n);
    std::iota(res.rows.begin(), res.rows.end(), 0);
    return res;
  }

  // Starting rows from Gaussian elimination with row pivoting.
  Eigen::MatrixXd work = a;
  std::vector<bool> used(n, false);
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = n;
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (!used[i] && std::abs(work(i, c)) > best) {
        best = std::abs(work(i, c));
        piv = i;
      }
    if (piv == n || best <= 1e-12 * scale) {
      res.rank_deficient = true;
      continue;
    }
    used[piv] = true;
    res.rows.push_back(piv);
    for (std::size_t i = 0; i < n; ++i)
      if (!used[i]) work.row(i) -= (work(i, c) / work(piv, c)) * work.row(piv);
  }
  if (res.rank_deficient) {
    // Fill up with the remaining rows of largest residual norm.
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < n; ++i)
      if (!used[i]) rest.push_back(i);
    std::stable_sort(rest.begin(), rest.end(),
                     [&](std::size_t x, std::size_t y) { return work.row(x).norm() > work.row(y).norm(); });
    for (std::size_t i = 0; res.rows.size() < k; ++i) res.rows.push_back(rest[i]);
    return res;
  }

  for (; res.swaps < max_swaps; ++res.swaps) {
    Eigen::MatrixXd sub(k, k);
    for (std::size_t r = 0; r < k; ++r) sub.row(r) = a.row(res.rows[r]);
    // B = A * sub^{-1}; entry (i, j) is the det ratio of swapping row i into slot j.
    const Eigen::MatrixXd b = sub.transpose().partialPivLu().solve(a.transpose()).transpose();
    Eigen::Index bi = 0, bj = 0;
    const double gain = b.cwiseAbs().maxCoeff(&bi, &bj);
    if (!(gain > threshold)) break;
    res.rows[static_cast<std::size_t>(bj)] = static_cast<std::size_t>(bi);
  }
  return res;
}

}  // namespace lngopt
