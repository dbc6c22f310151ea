#pragma once

#include <Eigen/Dense>

namespace edrdim::linalg {

/// Eigenpairs of a symmetric matrix, eigenvalues in nonincreasing order.
struct SymmetricEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // column j pairs with values(j)
};

// Backed by LAPACK dsyevd. Only the lower triangle of `a` is read.
// Throws NumericalError when the solver does not converge or `a` is not finite.
SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& a);
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a);

/// Moore-Penrose inverse through the SVD. Singular values at or below
/// tolerance_factor * machine-epsilon * sigma_max are treated as zero.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a, double tolerance_factor);

}  // namespace edrdim::linalg
