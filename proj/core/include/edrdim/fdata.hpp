#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace edrdim {

/// Ordered observation times with one quadrature weight per point.
///
/// Functional data use trapezoid weights, so that the weighted sum of a
/// product approximates the L2 inner product on [t_0, t_{T-1}]. Multivariate
/// data use the index grid {1, ..., p} with unit weights, which turns the
/// same inner product into the ordinary dot product.
class Grid {
 public:
  enum class Rule { trapezoid, unit };

  /// Throws GridError unless the points are strictly increasing, finite and at least two.
  static Grid trapezoid(std::vector<double> points);
  static Grid uniform(double start, double stop, int size);
  static Grid unit(int size);

  [[nodiscard]] int size() const noexcept { return static_cast<int>(points_.size()); }
  [[nodiscard]] const Eigen::VectorXd& points() const noexcept { return points_; }
  [[nodiscard]] const Eigen::VectorXd& weights() const noexcept { return weights_; }
  [[nodiscard]] Rule rule() const noexcept { return rule_; }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.rule_ == b.rule_ && a.points_ == b.points_ && a.weights_ == b.weights_;
  }

 private:
  Grid(Eigen::VectorXd points, Eigen::VectorXd weights, Rule rule);

  Eigen::VectorXd points_;
  Eigen::VectorXd weights_;
  Rule rule_;
};

/// n curves sampled on one shared grid; row i holds X_i.
class CurveSet {
 public:
  CurveSet(Grid grid, Eigen::MatrixXd values);

  [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
  [[nodiscard]] const Eigen::MatrixXd& values() const noexcept { return values_; }
  [[nodiscard]] int size() const noexcept { return static_cast<int>(values_.rows()); }
  [[nodiscard]] int grid_size() const noexcept { return static_cast<int>(values_.cols()); }

 private:
  Grid grid_;
  Eigen::MatrixXd values_;
};

class ResponseVector {
 public:
  explicit ResponseVector(Eigen::VectorXd y);

  [[nodiscard]] const Eigen::VectorXd& values() const noexcept { return y_; }
  [[nodiscard]] int size() const noexcept { return static_cast<int>(y_.size()); }
  [[nodiscard]] double operator[](int i) const { return y_(i); }

 private:
  Eigen::VectorXd y_;
};

/// n x p predictor matrix. Analysed as a CurveSet on Grid::unit(p).
class MultivariateSet {
 public:
  explicit MultivariateSet(Eigen::MatrixXd values);

  [[nodiscard]] const Eigen::MatrixXd& values() const noexcept { return values_; }
  [[nodiscard]] int size() const noexcept { return static_cast<int>(values_.rows()); }
  [[nodiscard]] int dimension() const noexcept { return static_cast<int>(values_.cols()); }
  [[nodiscard]] CurveSet as_curves() const;

 private:
  Eigen::MatrixXd values_;
};

/// Quadrature inner product sum_t w_t a_t b_t. Throws ShapeError on length mismatch.
double inner_product(std::span<const double> a, std::span<const double> b, const Grid& grid);
double inner_product(const Eigen::Ref<const Eigen::VectorXd>& a,
                     const Eigen::Ref<const Eigen::VectorXd>& b, const Grid& grid);

// File ingestion. Curve CSV: header row of grid times, then one curve per row.
// Response file: one value per line. Multivariate CSV: n rows of p values, no header.
std::pair<CurveSet, ResponseVector> load_curves(const std::filesystem::path& curve_file,
                                                const std::filesystem::path& response_file);
CurveSet read_curve_csv(std::istream& in);
ResponseVector read_response(std::istream& in);
MultivariateSet read_multivariate_csv(std::istream& in);
MultivariateSet load_multivariate(const std::filesystem::path& path);
ResponseVector load_response(const std::filesystem::path& path);

// Writers use the shortest representation that round-trips every double.
void write_curve_csv(std::ostream& out, const CurveSet& curves);
void write_response(std::ostream& out, const ResponseVector& y);
void write_multivariate_csv(std::ostream& out, const MultivariateSet& x);

}  // namespace edrdim
