#include "edrdim/linalg.hpp"

#include <limits>
#include <mutex>

#include <cblas.h>
#include <lapacke.h>

#include "edrdim/error.hpp"

namespace edrdim::linalg {
namespace {

// Replicate-level parallelism lives above this layer; a threaded BLAS underneath
// would oversubscribe and could change reduction order between runs.
void pin_blas_threads() {
  static std::once_flag once;
  std::call_once(once, [] { openblas_set_num_threads(1); });
}

SymmetricEigen solve(const Eigen::MatrixXd& a, bool want_vectors) {
  if (a.rows() != a.cols()) throw ShapeError("symmetric_eigen: matrix must be square");
  if (!a.allFinite()) throw NumericalError("symmetric_eigen: non-finite input");
  const auto n = static_cast<lapack_int>(a.rows());
  SymmetricEigen out;
  if (n == 0) return out;
  pin_blas_threads();

  Eigen::MatrixXd work = a;
  Eigen::VectorXd ascending(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'L', n,
                                         work.data(), n, ascending.data());
  if (info != 0) {
    throw NumericalError("symmetric_eigen: LAPACK dsyevd failed with info=" +
                         std::to_string(info));
  }
  out.values = ascending.reverse();
  if (want_vectors) out.vectors = work.rowwise().reverse();
  return out;
}

}  // namespace

SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& a) { return solve(a, true); }

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a) {
  return solve(a, false).values;
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a, double tolerance_factor) {
  if (!a.allFinite()) throw NumericalError("pseudo_inverse: non-finite input");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("pseudo_inverse: SVD failed");
  const Eigen::VectorXd& sigma = svd.singularValues();
  if (sigma.size() == 0) return Eigen::MatrixXd::Zero(a.cols(), a.rows());
  const double cutoff =
      tolerance_factor * std::numeric_limits<double>::epsilon() * sigma.maxCoeff();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff) inv(i) = 1.0 / sigma(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace edrdim::linalg
