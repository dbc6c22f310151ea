#include "edrdim/dimtest.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "edrdim/error.hpp"
#include "edrdim/linalg.hpp"
#include "edrdim/stats.hpp"

namespace edrdim {
namespace {

double trailing_sum(const Eigen::VectorXd& descending, int k0) {
  double sum = 0.0;
  for (Eigen::Index j = k0; j < descending.size(); ++j) sum += std::max(descending(j), 0.0);
  return sum;
}

void check_k0(const SirModel& sir, int k0) {
  if (k0 < 0 || k0 >= sir.m) {
    throw DomainError("k0 = " + std::to_string(k0) + " must satisfy 0 <= k0 < m = " +
                      std::to_string(sir.m));
  }
}

void check_alpha(double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw DomainError("alpha must lie in (0, 1)");
}

TestResult chi2_result(Method method, const SirModel& sir, int k0, double statistic,
                       double alpha) {
  TestResult r;
  r.method = method;
  r.k0 = k0;
  r.truncation = sir.m;
  r.statistic = statistic;
  r.df = degrees_of_freedom(sir.m, sir.H, k0);
  r.alpha = alpha;
  r.p_value = stats::chi2_survival(statistic, *r.df);
  r.reject = r.p_value < alpha;
  return r;
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::chi2:
      return "chi2";
    case Method::adjusted_chi2:
      return "adjusted_chi2";
    case Method::adaptive_neyman:
      return "adaptive_neyman";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "chi2") return Method::chi2;
  if (name == "adjusted_chi2" || name == "adjusted") return Method::adjusted_chi2;
  if (name == "adaptive_neyman" || name == "neyman") return Method::adaptive_neyman;
  throw DomainError("unknown method '" + std::string(name) + "'");
}

int degrees_of_freedom(int m, int H, int k0) {
  const int df = (m - k0) * (H - k0 - 1);
  if (m - k0 <= 0 || H - k0 - 1 <= 0) {
    throw DomainError("degrees of freedom (m - k0)(H - k0 - 1) must be positive; m = " +
                      std::to_string(m) + ", H = " + std::to_string(H) +
                      ", k0 = " + std::to_string(k0));
  }
  return df;
}

double chi2_statistic(const SirModel& sir, int n, int k0) {
  check_k0(sir, k0);
  return n * trailing_sum(linalg::symmetric_eigenvalues(sir.covariance), k0);
}

TestResult chi2_test(const SirModel& sir, int n, int k0, double alpha) {
  check_alpha(alpha);
  degrees_of_freedom(sir.m, sir.H, k0);
  return chi2_result(Method::chi2, sir, k0, chi2_statistic(sir, n, k0), alpha);
}

Eigen::VectorXd tau_hat(const ScoreMatrix& scores, const SlicePartition& part,
                        const SirModel& sir, int k0) {
  check_k0(sir, k0);
  if (scores.m() < sir.m || scores.size() != part.size()) {
    throw ShapeError("tau_hat: scores do not match the SIR model");
  }
  for (int h = 0; h < part.H; ++h) {
    if (part.counts[static_cast<std::size_t>(h)] < 2) {
      throw SliceError("tau_hat: slice " + std::to_string(h) + " has fewer than two samples");
    }
  }
  const auto eig = linalg::symmetric_eigen(sir.covariance);
  const Eigen::MatrixXd trailing = eig.vectors.rightCols(sir.m - k0);

  Eigen::VectorXd tau = Eigen::VectorXd::Zero(part.H);
  for (int i = 0; i < scores.size(); ++i) {
    const int h = part.assignment[static_cast<std::size_t>(i)];
    const Eigen::VectorXd centered =
        scores.scores.row(i).head(sir.m).transpose() - sir.slice_means.col(h);
    tau(h) += (trailing.transpose() * centered).squaredNorm();
  }
  for (int h = 0; h < part.H; ++h) {
    tau(h) /= static_cast<double>(sir.m - k0) * part.counts[static_cast<std::size_t>(h)];
    if (!(tau(h) > 1e-12)) {
      throw DegenerateError("tau_hat: slice " + std::to_string(h) +
                            " has no dispersion in the trailing eigenspace");
    }
  }
  return tau;
}

double adjusted_chi2_statistic(const SirModel& sir, int n, int k0, const Eigen::VectorXd& tau) {
  check_k0(sir, k0);
  if (tau.size() != sir.H) throw ShapeError("adjusted_chi2_statistic: need one tau per slice");
  const Eigen::VectorXd& g = sir.root_proportions;
  const Eigen::VectorXd root_tau = tau.cwiseSqrt();
  const Eigen::MatrixXd centering =
      Eigen::MatrixXd::Identity(sir.H, sir.H) - g * g.transpose();
  const Eigen::MatrixXd sandwich = root_tau.asDiagonal() * centering * root_tau.asDiagonal();
  const Eigen::MatrixXd inverse =
      linalg::pseudo_inverse(sandwich, static_cast<double>(std::max(sir.H, sir.m)));
  const Eigen::MatrixXd w = sir.between * root_tau.asDiagonal() * inverse;
  const Eigen::MatrixXd sigma = w * w.transpose();
  return n * trailing_sum(linalg::symmetric_eigenvalues(sigma), k0);
}

TestResult adjusted_chi2_test(const ScoreMatrix& scores, const SlicePartition& part,
                              const SirModel& sir, int n, int k0, double alpha) {
  check_alpha(alpha);
  degrees_of_freedom(sir.m, sir.H, k0);
  const Eigen::VectorXd tau = tau_hat(scores, part, sir, k0);
  return chi2_result(Method::adjusted_chi2, sir, k0,
                     adjusted_chi2_statistic(sir, n, k0, tau), alpha);
}

}  // namespace edrdim
