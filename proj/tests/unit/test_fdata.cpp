#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "edrdim/error.hpp"
#include "edrdim/fdata.hpp"
#include "test_support.hpp"

using namespace edrdim;

namespace {

Eigen::VectorXd sample(const Grid& grid, double (*f)(double)) {
  Eigen::VectorXd v(grid.size());
  for (int i = 0; i < grid.size(); ++i) v(i) = f(grid.points()(i));
  return v;
}

double root2_cos2pi(double t) { return std::sqrt(2.0) * std::cos(2.0 * std::numbers::pi * t); }
double root2_sin4pi(double t) { return std::sqrt(2.0) * std::sin(4.0 * std::numbers::pi * t); }

}  // namespace

TEST(Grid, TrapezoidWeightsOnThreePoints) {
  std::istringstream in("0,0.5,1\n0,0,0\n0,0,0\n0,0,0\n");
  const CurveSet curves = read_curve_csv(in);
  EXPECT_EQ(curves.grid_size(), 3);
  EXPECT_EQ(curves.size(), 3);
  EXPECT_DOUBLE_EQ(curves.grid().weights()(0), 0.25);
  EXPECT_DOUBLE_EQ(curves.grid().weights()(1), 0.5);
  EXPECT_DOUBLE_EQ(curves.grid().weights()(2), 0.25);
}

TEST(Grid, WeightsSumToSpanOnIrregularGrid) {
  const Grid grid = Grid::trapezoid({-1.0, -0.3, 0.0, 0.25, 2.0, 7.5});
  EXPECT_NEAR(grid.weights().sum(), 8.5, 8.5 * 1e-12);
  EXPECT_TRUE((grid.weights().array() > 0).all());
}

TEST(Grid, RejectsBadPoints) {
  EXPECT_THROW(Grid::trapezoid({0.0, 1.0, 0.5}), GridError);
  EXPECT_THROW(Grid::trapezoid({0.0, 0.0, 1.0}), GridError);
  EXPECT_THROW(Grid::trapezoid({0.0}), GridError);
  EXPECT_THROW(Grid::trapezoid({0.0, NAN}), GridError);
}

TEST(Grid, UnitGridGivesDotProduct) {
  const Grid grid = Grid::unit(4);
  Eigen::VectorXd a(4), b(4);
  a << 1, 2, 3, 4;
  b << -1, 0.5, 2, 1;
  EXPECT_DOUBLE_EQ(inner_product(a, b, grid), a.dot(b));
  EXPECT_DOUBLE_EQ(grid.points()(0), 1.0);
}

TEST(CurveCsv, HeaderOutOfOrderIsGridError) {
  std::istringstream in("0,1,0.5\n1,2,3\n1,2,3\n");
  EXPECT_THROW(read_curve_csv(in), GridError);
}

TEST(CurveCsv, RaggedRowIsParseError) {
  std::istringstream in("0,0.5,1\n1,2,3\n1,2\n");
  EXPECT_THROW(read_curve_csv(in), ParseError);
}

TEST(CurveCsv, GarbageIsParseError) {
  std::istringstream in("0,0.5,1\n1,abc,3\n1,2,3\n");
  EXPECT_THROW(read_curve_csv(in), ParseError);
}

TEST(CurveCsv, CountMismatchIsShapeError) {
  const auto dir = std::filesystem::temp_directory_path() / "edrdim_fdata_mismatch";
  std::filesystem::create_directories(dir);
  { std::ofstream(dir / "x.csv") << "0,1\n1,2\n3,4\n5,6\n"; }
  { std::ofstream(dir / "y.txt") << "1\n2\n"; }
  EXPECT_THROW(load_curves(dir / "x.csv", dir / "y.txt"), ShapeError);
  std::filesystem::remove_all(dir);
}

TEST(CurveCsv, RoundTripIsBitIdentical) {
  const CurveSet curves(Grid::trapezoid({0.0, 0.1, 0.35, 1.0}),
                        edrdim::testing::gaussian_matrix(5, 4, 17) * 1e3);
  std::ostringstream first;
  write_curve_csv(first, curves);
  std::istringstream in(first.str());
  const CurveSet back = read_curve_csv(in);
  EXPECT_EQ(back.values(), curves.values());
  EXPECT_EQ(back.grid(), curves.grid());
  std::ostringstream second;
  write_curve_csv(second, back);
  EXPECT_EQ(first.str(), second.str());
}

TEST(Response, RoundTripAndTrailingNewline) {
  std::istringstream in("1.5\n-2\n3e-7");
  const ResponseVector y = read_response(in);
  ASSERT_EQ(y.size(), 3);
  EXPECT_DOUBLE_EQ(y[2], 3e-7);
  std::ostringstream out;
  write_response(out, y);
  std::istringstream again(out.str());
  EXPECT_EQ(read_response(again).values(), y.values());
}

TEST(Multivariate, RoundTripAndGrid) {
  const MultivariateSet x(edrdim::testing::gaussian_matrix(6, 3, 4));
  std::ostringstream out;
  write_multivariate_csv(out, x);
  std::istringstream in(out.str());
  const MultivariateSet back = read_multivariate_csv(in);
  EXPECT_EQ(back.values(), x.values());
  const CurveSet curves = back.as_curves();
  EXPECT_EQ(curves.grid().rule(), Grid::Rule::unit);
  EXPECT_TRUE((curves.grid().weights().array() == 1.0).all());
}

TEST(InnerProduct, ConstantOneOnUnitInterval) {
  const Grid grid = Grid::uniform(0.0, 1.0, 11);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(11);
  EXPECT_DOUBLE_EQ(inner_product(one, one, grid), 1.0);
}

TEST(InnerProduct, CosineNormAgainstFineRiemannSum) {
  // Independent oracle: midpoint Riemann sum over 10^6 cells.
  constexpr int cells = 1'000'000;
  double riemann = 0.0;
  for (int i = 0; i < cells; ++i) {
    const double v = root2_cos2pi((i + 0.5) / cells);
    riemann += v * v / cells;
  }
  const Grid grid = Grid::uniform(0.0, 1.0, 501);
  const Eigen::VectorXd c = sample(grid, root2_cos2pi);
  const double quad = inner_product(c, c, grid);
  EXPECT_NEAR(quad, 1.0, 1e-6);
  EXPECT_NEAR(quad, riemann, 1e-6);
}

TEST(InnerProduct, FourierModesOrthogonal) {
  const Grid grid = Grid::uniform(0.0, 1.0, 501);
  EXPECT_NEAR(inner_product(sample(grid, root2_cos2pi), sample(grid, root2_sin4pi), grid), 0.0,
              1e-6);
}

TEST(InnerProduct, LengthMismatchIsShapeError) {
  const Grid grid = Grid::uniform(0.0, 1.0, 5);
  const std::vector<double> a(5, 1.0), b(4, 1.0);
  EXPECT_THROW(inner_product(a, b, grid), ShapeError);
}

TEST(InnerProduct, SymmetricBilinearAndPositive) {
  const Grid grid = Grid::trapezoid({0.0, 0.2, 0.3, 0.7, 0.9, 1.4, 2.0});
  const Eigen::MatrixXd r = edrdim::testing::gaussian_matrix(300, 7, 99);
  for (int i = 0; i + 2 < r.rows(); i += 3) {
    const Eigen::VectorXd a = r.row(i), b = r.row(i + 1), c = r.row(i + 2);
    const double alpha = a(0) * 3.0;
    const double scale = (std::abs(alpha) + 1.0) * (a.norm() + b.norm() + 1.0) * c.norm();
    EXPECT_GE(inner_product(a, a, grid), -1e-12);
    EXPECT_DOUBLE_EQ(inner_product(a, b, grid), inner_product(b, a, grid));
    const Eigen::VectorXd combo = alpha * a + b;
    EXPECT_NEAR(inner_product(combo, c, grid),
                alpha * inner_product(a, c, grid) + inner_product(b, c, grid), 1e-10 * scale);
  }
}

TEST(CurveSet, RejectsNonFiniteAndShape) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(3, 4);
  EXPECT_THROW(CurveSet(Grid::uniform(0, 1, 5), v), ShapeError);
  v(1, 2) = INFINITY;
  EXPECT_THROW(CurveSet(Grid::uniform(0, 1, 4), v), ValidationError);
  EXPECT_THROW(CurveSet(Grid::uniform(0, 1, 4), Eigen::MatrixXd::Zero(1, 4)), ValidationError);
}
