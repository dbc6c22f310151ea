#pragma once

#include <vector>

#include <Eigen/Dense>

#include "edrdim/fdata.hpp"
#include "edrdim/fpca.hpp"

namespace edrdim {

inline constexpr int kDefaultSlices = 8;

/// Contiguous equal-count slices of the response in stable sorted order.
struct SlicePartition {
  int H = 0;
  std::vector<int> assignment;      // slice index of each sample, in sample order
  std::vector<int> counts;          // n_h
  std::vector<double> boundaries;   // largest response in slices 0..H-2

  [[nodiscard]] int size() const noexcept { return static_cast<int>(assignment.size()); }
};

/// Slice h receives floor(n/H) samples, plus one for the first n mod H slices.
/// Ties keep their original order. Throws SliceError when H < 2 or n < 2H.
SlicePartition make_slices(const ResponseVector& y, int H);

/// Sliced inverse regression on standardized scores.
///
/// With p_h = n_h / n, g = (p_1^{1/2}, ..., p_H^{1/2}), G = diag(g) and
/// J_g = I - g g^T, the model holds
///   slice_means (M):   m x H, column h is the mean score vector of slice h
///   between     (B):   M G J_g
///   covariance  (V):   B B^T, the between-slice covariance of the scores.
/// Row j of M and B depends on score column j only, so the model for the first
/// m' < m components is the leading block of this one.
struct SirModel {
  int m = 0;
  int H = 0;
  Eigen::VectorXd root_proportions;  // g
  Eigen::MatrixXd slice_means;       // M
  Eigen::MatrixXd between;           // B
  Eigen::MatrixXd covariance;        // V

  /// The model restricted to the first `m_leading` score components.
  [[nodiscard]] SirModel leading(int m_leading) const;
};

SirModel build_sir(const ScoreMatrix& scores, const SlicePartition& part);

/// beta_k(t) = sum_j omega_j^{-1/2} b_kj psi_j(t) for the top K eigenvectors b_k
/// of V, returned as K rows on the eigenfunction grid.
/// Throws RankError unless 1 <= K <= min(m, H - 1).
Eigen::MatrixXd estimate_edr_directions(const SirModel& sir, const EigenSystem& eig, int K);

}  // namespace edrdim
