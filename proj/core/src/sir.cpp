#include "edrdim/sir.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "edrdim/error.hpp"
#include "edrdim/linalg.hpp"

namespace edrdim {

SlicePartition make_slices(const ResponseVector& y, int H) {
  const int n = y.size();
  if (H < 2) throw SliceError("make_slices: need at least two slices");
  if (n < 2 * H) {
    throw SliceError("make_slices: n = " + std::to_string(n) + " is too small for H = " +
                     std::to_string(H) + " slices of at least two samples");
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return y[a] < y[b]; });

  SlicePartition part;
  part.H = H;
  part.assignment.assign(static_cast<std::size_t>(n), 0);
  part.counts.assign(static_cast<std::size_t>(H), n / H);
  for (int h = 0; h < n % H; ++h) ++part.counts[static_cast<std::size_t>(h)];

  int position = 0;
  for (int h = 0; h < H; ++h) {
    for (int k = 0; k < part.counts[static_cast<std::size_t>(h)]; ++k, ++position) {
      part.assignment[static_cast<std::size_t>(order[static_cast<std::size_t>(position)])] = h;
    }
    if (h + 1 < H) part.boundaries.push_back(y[order[static_cast<std::size_t>(position - 1)]]);
  }
  return part;
}

SirModel SirModel::leading(int m_leading) const {
  if (m_leading < 1 || m_leading > m) {
    throw RankError("SirModel::leading: m' = " + std::to_string(m_leading) +
                    " outside [1, " + std::to_string(m) + "]");
  }
  SirModel out;
  out.m = m_leading;
  out.H = H;
  out.root_proportions = root_proportions;
  out.slice_means = slice_means.topRows(m_leading);
  out.between = between.topRows(m_leading);
  out.covariance = covariance.topLeftCorner(m_leading, m_leading);
  return out;
}

SirModel build_sir(const ScoreMatrix& scores, const SlicePartition& part) {
  const int n = scores.size();
  const int m = scores.m();
  const int H = part.H;
  if (part.size() != n) throw ShapeError("build_sir: partition and scores disagree on n");
  for (int h = 0; h < H; ++h) {
    if (part.counts[static_cast<std::size_t>(h)] < 1) {
      throw SliceError("build_sir: slice " + std::to_string(h) + " is empty");
    }
  }

  SirModel sir;
  sir.m = m;
  sir.H = H;
  sir.slice_means = Eigen::MatrixXd::Zero(m, H);
  for (int i = 0; i < n; ++i) {
    sir.slice_means.col(part.assignment[static_cast<std::size_t>(i)]) +=
        scores.scores.row(i).transpose();
  }
  sir.root_proportions.resize(H);
  for (int h = 0; h < H; ++h) {
    const double count = part.counts[static_cast<std::size_t>(h)];
    sir.slice_means.col(h) /= count;
    sir.root_proportions(h) = std::sqrt(count / n);
  }

  // F = G (I - g g^T)
  const Eigen::VectorXd& g = sir.root_proportions;
  const Eigen::MatrixXd centering = Eigen::MatrixXd::Identity(H, H) - g * g.transpose();
  const Eigen::MatrixXd transform = g.asDiagonal() * centering;

  // Explicit loops keep every entry of B and V a function of its own rows
  // only, which makes the leading-block nesting exact.
  sir.between.resize(m, H);
  for (int j = 0; j < m; ++j) {
    for (int h = 0; h < H; ++h) {
      double sum = 0.0;
      for (int l = 0; l < H; ++l) sum += sir.slice_means(j, l) * transform(l, h);
      sir.between(j, h) = sum;
    }
  }
  sir.covariance.resize(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b <= a; ++b) {
      double sum = 0.0;
      for (int h = 0; h < H; ++h) sum += sir.between(a, h) * sir.between(b, h);
      sir.covariance(a, b) = sum;
      sir.covariance(b, a) = sum;
    }
  }
  return sir;
}

Eigen::MatrixXd estimate_edr_directions(const SirModel& sir, const EigenSystem& eig, int K) {
  const int k_max = std::min(sir.m, sir.H - 1);
  if (K < 1 || K > k_max) {
    throw RankError("estimate_edr_directions: K = " + std::to_string(K) + " outside [1, " +
                    std::to_string(k_max) + "]");
  }
  if (sir.m > eig.usable_rank()) {
    throw RankError("estimate_edr_directions: SIR model uses more components than available");
  }
  const auto v = linalg::symmetric_eigen(sir.covariance);
  const Eigen::VectorXd scale = eig.eigenvalues.head(sir.m).cwiseSqrt().cwiseInverse();
  // K x m coefficients times m x T eigenfunctions
  const Eigen::MatrixXd coefficients = v.vectors.leftCols(K).transpose() * scale.asDiagonal();
  return coefficients * eig.eigenfunctions.topRows(sir.m);
}

}  // namespace edrdim
