#pragma once

#include <Eigen/Dense>

#include "edrdim/fdata.hpp"

namespace edrdim {

/// Sample eigenvalues and eigenfunctions of the covariance operator
/// Gamma = n^{-1} sum (X_i - Xbar) (x) (X_i - Xbar).
///
/// `eigenvalues` holds r = min(n - 1, T) values in nonincreasing order,
/// clamped at zero. Only usable components (eigenvalue above
/// kUsableRelTol times the leading one) carry an eigenfunction, so
/// `eigenfunctions` is usable_rank() x T. Each eigenfunction is orthonormal
/// in the grid's quadrature and signed so its largest-magnitude entry is positive.
struct EigenSystem {
  static constexpr double kUsableRelTol = 1e-12;

  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenfunctions;

  [[nodiscard]] int rank() const noexcept { return static_cast<int>(eigenvalues.size()); }
  [[nodiscard]] int usable_rank() const noexcept {
    return static_cast<int>(eigenfunctions.rows());
  }
};

/// Standardized principal component scores eta_ij, one row per curve and
/// one column per retained component.
struct ScoreMatrix {
  Eigen::MatrixXd scores;

  [[nodiscard]] int size() const noexcept { return static_cast<int>(scores.rows()); }
  [[nodiscard]] int m() const noexcept { return static_cast<int>(scores.cols()); }
};

Eigen::VectorXd sample_mean(const CurveSet& curves);

/// Solves the quadrature-weighted eigenproblem W^{1/2} C W^{1/2} v = omega v.
/// When the grid is longer than the sample, the equivalent n x n Gram problem
/// Xc W Xc^T / n is solved instead and eigenfunctions are recovered from it.
/// Throws DegenerateError when the curves have zero total variance.
EigenSystem eigensystem(const CurveSet& curves);

/// eta_ij = omega_j^{-1/2} <psi_j, X_i - Xbar> for j < m.
/// Throws RankError unless 1 <= m <= eig.usable_rank().
ScoreMatrix pc_scores(const CurveSet& curves, const EigenSystem& eig, int m);

}  // namespace edrdim
