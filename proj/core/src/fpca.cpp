#include "edrdim/fpca.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "edrdim/error.hpp"
#include "edrdim/linalg.hpp"

namespace edrdim {
namespace {

void fix_signs(Eigen::MatrixXd& functions) {
  for (Eigen::Index j = 0; j < functions.rows(); ++j) {
    Eigen::Index arg = 0;
    functions.row(j).cwiseAbs().maxCoeff(&arg);
    if (functions(j, arg) < 0) functions.row(j) *= -1.0;
  }
}

Eigen::MatrixXd centered(const CurveSet& curves) {
  return curves.values().rowwise() - sample_mean(curves).transpose();
}

}  // namespace

// Averaging offsets from the first curve keeps identical curves exact.
Eigen::VectorXd sample_mean(const CurveSet& curves) {
  const Eigen::RowVectorXd pivot = curves.values().row(0);
  return (pivot + (curves.values().rowwise() - pivot).colwise().mean()).transpose();
}

EigenSystem eigensystem(const CurveSet& curves) {
  const Eigen::Index n = curves.size();
  const Eigen::Index grid_size = curves.grid_size();
  const Eigen::VectorXd& w = curves.grid().weights();
  const Eigen::MatrixXd xc = centered(curves);
  const Eigen::Index rank = std::min(n - 1, grid_size);

  Eigen::VectorXd values;
  Eigen::MatrixXd functions;  // rows are eigenfunctions on the grid

  if (grid_size <= n) {
    const Eigen::VectorXd root_w = w.cwiseSqrt();
    Eigen::MatrixXd xs = xc * root_w.asDiagonal();
    Eigen::MatrixXd cov = (xs.transpose() * xs) / static_cast<double>(n);
    const auto eig = linalg::symmetric_eigen(cov);
    values = eig.values.head(rank);
    functions = (root_w.cwiseInverse().asDiagonal() * eig.vectors.leftCols(rank)).transpose();
  } else {
    Eigen::MatrixXd gram = (xc * w.asDiagonal() * xc.transpose()) / static_cast<double>(n);
    const auto eig = linalg::symmetric_eigen(gram);
    values = eig.values.head(rank);
    // psi_j = Xc^T u_j / sqrt(n d_j), defined only where d_j is usable.
    Eigen::Index usable = 0;
    const double top = std::max(values(0), 0.0);
    while (usable < rank && values(usable) > EigenSystem::kUsableRelTol * top) ++usable;
    functions = (xc.transpose() * eig.vectors.leftCols(usable)).transpose();
    for (Eigen::Index j = 0; j < usable; ++j) {
      functions.row(j) /= std::sqrt(static_cast<double>(n) * values(j));
    }
  }

  if (!(values.size() > 0 && values(0) > 0)) {
    throw DegenerateError("eigensystem: curves have zero total variance");
  }
  const double top = values(0);
  values = values.cwiseMax(0.0);

  Eigen::Index usable = 0;
  while (usable < values.size() && values(usable) > EigenSystem::kUsableRelTol * top) ++usable;

  EigenSystem out;
  out.eigenvalues = std::move(values);
  out.eigenfunctions = functions.topRows(usable);
  fix_signs(out.eigenfunctions);
  return out;
}

ScoreMatrix pc_scores(const CurveSet& curves, const EigenSystem& eig, int m) {
  if (m < 1 || m > eig.usable_rank()) {
    throw RankError("pc_scores: m = " + std::to_string(m) + " outside the usable range [1, " +
                    std::to_string(eig.usable_rank()) + "]");
  }
  if (eig.eigenfunctions.cols() != curves.grid_size()) {
    throw ShapeError("pc_scores: eigenfunctions and curves use different grids");
  }
  const Eigen::VectorXd& w = curves.grid().weights();
  Eigen::MatrixXd projections =
      centered(curves) * (w.asDiagonal() * eig.eigenfunctions.topRows(m).transpose());
  const Eigen::VectorXd scale = eig.eigenvalues.head(m).cwiseSqrt().cwiseInverse();
  return ScoreMatrix{projections * scale.asDiagonal()};
}

}  // namespace edrdim
