#include <gtest/gtest.h>

#include <cmath>

#include "edrdim/error.hpp"
#include "edrdim/fpca.hpp"
#include "edrdim/simlab.hpp"
#include "edrdim/stats.hpp"
#include "test_support.hpp"

using namespace edrdim;
using edrdim::testing::gaussian_matrix;
using edrdim::testing::random_curves;

TEST(SampleMean, OppositeCurvesCancel) {
  Eigen::MatrixXd v(2, 5);
  v.row(0) << 1, -2, 3, 0.5, 7;
  v.row(1) = -v.row(0);
  EXPECT_TRUE(sample_mean(CurveSet(Grid::uniform(0, 1, 5), v)).isZero(0.0));
}

TEST(SampleMean, IdenticalCurvesReturnTheCurve) {
  Eigen::RowVectorXd c(4);
  c << 0.1, 0.2, 0.3, 0.7;
  const Eigen::MatrixXd v = c.replicate(6, 1);
  const Eigen::VectorXd mean = sample_mean(CurveSet(Grid::uniform(0, 1, 4), v));
  for (int t = 0; t < 4; ++t) EXPECT_EQ(mean(t), c(t));
}

TEST(SampleMean, MatchesReverseOrderResummation) {
  const CurveSet curves = random_curves(5, 11, 21);
  const Eigen::VectorXd mean = sample_mean(curves);
  for (int t = 0; t < 11; ++t) {
    long double acc = 0.0L;
    for (int i = 4; i >= 0; --i) acc += curves.values()(i, t);
    EXPECT_NEAR(mean(t), static_cast<double>(acc / 5.0L), 1e-14);
  }
}

TEST(Eigensystem, RankOneSample) {
  const Grid grid = Grid::uniform(0.0, 1.0, 21);
  Eigen::VectorXd f(21);
  for (int t = 0; t < 21; ++t) f(t) = std::sin(3.0 * grid.points()(t)) + 0.2;
  Eigen::VectorXd a(6);
  a << -2, -1, 0, 0.5, 1, 3;
  const CurveSet curves(grid, a * f.transpose());
  const EigenSystem eig = eigensystem(curves);
  EXPECT_EQ(eig.usable_rank(), 1);
  EXPECT_NEAR(eig.eigenvalues(1), 0.0, 1e-12 * eig.eigenvalues(0));
  const Eigen::VectorXd psi = eig.eigenfunctions.row(0).transpose();
  const double cosine = inner_product(psi, f, grid) /
                        std::sqrt(inner_product(f, f, grid) * inner_product(psi, psi, grid));
  EXPECT_NEAR(std::abs(cosine), 1.0, 1e-12);

  // With one component the scores are the centered loadings rescaled to unit variance.
  const ScoreMatrix s = pc_scores(curves, eig, 1);
  Eigen::VectorXd expected = a.array() - a.mean();
  expected /= std::sqrt(expected.squaredNorm() / 6.0);
  const double sign = s.scores(0, 0) * expected(0) > 0 ? 1.0 : -1.0;
  EXPECT_LT((s.scores.col(0) - sign * expected).norm(), 1e-10);
  EXPECT_THROW(pc_scores(curves, eig, 2), RankError);
}

TEST(Eigensystem, ZeroVarianceIsDegenerate) {
  const Eigen::MatrixXd v = Eigen::MatrixXd::Constant(4, 5, 2.0);
  EXPECT_THROW(eigensystem(CurveSet(Grid::uniform(0, 1, 5), v)), DegenerateError);
}

TEST(Eigensystem, GramDualityOracleOnUnitWeights) {
  const Eigen::MatrixXd x = gaussian_matrix(4, 6, 31);
  const EigenSystem eig = eigensystem(MultivariateSet(x).as_curves());
  const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
  const Eigen::MatrixXd gram = xc * xc.transpose() / 4.0;
  const Eigen::VectorXd oracle =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram).eigenvalues().reverse();
  ASSERT_EQ(eig.rank(), 3);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(eig.eigenvalues(j), oracle(j), 1e-10);
}

TEST(Eigensystem, WideAndTallRoutesAgree) {
  // Same 8 curves on a 7-point grid (primal) and a 40-point grid (dual)
  // built by appending zero columns, which leave the covariance spectrum unchanged.
  const Eigen::MatrixXd core = gaussian_matrix(8, 7, 41);
  Eigen::MatrixXd wide = Eigen::MatrixXd::Zero(8, 40);
  wide.leftCols(7) = core;
  const EigenSystem a = eigensystem(MultivariateSet(core).as_curves());
  const EigenSystem b = eigensystem(MultivariateSet(wide).as_curves());
  for (int j = 0; j < 7; ++j) EXPECT_NEAR(a.eigenvalues(j), b.eigenvalues(j), 1e-10);
  EXPECT_EQ(a.usable_rank(), b.usable_rank());
}

class EigensystemInvariants : public ::testing::TestWithParam<std::pair<int, int>> {};

TEST_P(EigensystemInvariants, OrthonormalParsevalReconstruction) {
  const auto [n, T] = GetParam();
  const CurveSet curves(Grid::trapezoid([&] {
                          std::vector<double> t(T);
                          for (int i = 0; i < T; ++i) t[i] = i * 0.1 + 0.01 * (i % 3);
                          return t;
                        }()),
                        gaussian_matrix(n, T, 7 + n));
  const EigenSystem eig = eigensystem(curves);
  const Grid& grid = curves.grid();
  const Eigen::VectorXd& w = grid.weights();

  for (int j = 1; j < eig.rank(); ++j) EXPECT_GE(eig.eigenvalues(j - 1), eig.eigenvalues(j));
  EXPECT_LE(eig.rank(), std::min(n - 1, T));

  const Eigen::MatrixXd gram = eig.eigenfunctions * w.asDiagonal() * eig.eigenfunctions.transpose();
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff(),
            1e-8);

  const Eigen::MatrixXd xc = curves.values().rowwise() - sample_mean(curves).transpose();
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += inner_product(xc.row(i).transpose(), xc.row(i).transpose(), grid);
  total /= n;
  EXPECT_NEAR(eig.eigenvalues.sum(), total, 1e-8 * total);

  const Eigen::MatrixXd c = xc.transpose() * xc / n;
  const int r = eig.usable_rank();
  const Eigen::MatrixXd rebuilt = eig.eigenfunctions.transpose() *
                                  eig.eigenvalues.head(r).asDiagonal() * eig.eigenfunctions;
  // Quadrature norm of C - rebuilt relative to that of C.
  const Eigen::VectorXd rw = w.cwiseSqrt();
  const double err = (rw.asDiagonal() * (c - rebuilt) * rw.asDiagonal()).norm();
  const double ref = (rw.asDiagonal() * c * rw.asDiagonal()).norm();
  EXPECT_LT(err, 1e-8 * ref);

  for (int j = 0; j < r; ++j) {
    Eigen::Index at = 0;
    eig.eigenfunctions.row(j).cwiseAbs().maxCoeff(&at);
    EXPECT_GT(eig.eigenfunctions(j, at), 0.0);
  }

  const ScoreMatrix s = pc_scores(curves, eig, r);
  EXPECT_LT(s.scores.colwise().mean().cwiseAbs().maxCoeff(), 1e-10);
  const Eigen::MatrixXd cov = s.scores.transpose() * s.scores / n;
  EXPECT_LT((cov - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff(), 1e-8);
}

INSTANTIATE_TEST_SUITE_P(Shapes, EigensystemInvariants,
                         ::testing::Values(std::pair{30, 9}, std::pair{9, 30}, std::pair{12, 12},
                                           std::pair{3, 50}));

TEST(PcScores, InvariantToAddingAConstantCurve) {
  const CurveSet curves = random_curves(25, 15, 12);
  Eigen::RowVectorXd shift(15);
  for (int t = 0; t < 15; ++t) shift(t) = 5.0 + std::cos(t);
  const CurveSet shifted(curves.grid(), curves.values().rowwise() + shift);
  const ScoreMatrix a = pc_scores(curves, eigensystem(curves), 6);
  const ScoreMatrix b = pc_scores(shifted, eigensystem(shifted), 6);
  EXPECT_LT((a.scores - b.scores).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(PcScores, RejectsBadTruncation) {
  const CurveSet curves = random_curves(6, 10, 2);
  const EigenSystem eig = eigensystem(curves);
  EXPECT_THROW(pc_scores(curves, eig, 0), RankError);
  EXPECT_THROW(pc_scores(curves, eig, eig.usable_rank() + 1), RankError);
}

TEST(Eigensystem, LeadingEigenvalueOfGenerator) {
  simlab::ProcessSpec proc;
  const auto sample = simlab::generate_functional(1, proc, 500, 2024);
  const EigenSystem eig = eigensystem(sample.curves);
  EXPECT_NEAR(simlab::ProcessSpec::eigenvalue(1), 20.0 / std::pow(2.5, 3), 1e-15);
  EXPECT_NEAR(eig.eigenvalues(0), 1.28, 0.2);
}

TEST(PcScores, GaussianKurtosisNearThree) {
  simlab::ProcessSpec proc;
  proc.J = 30;
  proc.T = 101;
  Eigen::VectorXd total = Eigen::VectorXd::Zero(7);
  constexpr int reps = 50;
  for (int rep = 0; rep < reps; ++rep) {
    const auto sample = simlab::generate_functional(1, proc, 200, 900 + rep);
    const ScoreMatrix s = pc_scores(sample.curves, eigensystem(sample.curves), 7);
    for (int j = 0; j < 7; ++j) {
      const Eigen::VectorXd col = s.scores.col(j);
      total(j) += stats::kurtosis(std::span<const double>(col.data(), col.size()));
    }
  }
  for (int j = 0; j < 7; ++j) EXPECT_NEAR(total(j) / reps, 3.0, 0.7) << "column " << j;
}
