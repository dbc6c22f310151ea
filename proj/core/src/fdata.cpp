#include "edrdim/fdata.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "edrdim/error.hpp"

namespace edrdim {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view token, int line_no) {
  token = trim(token);
  double value = 0.0;
  const auto* begin = token.data();
  const auto* end = token.data() + token.size();
  if (!token.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (token.empty() || ec != std::errc{} || ptr != end) {
    throw ParseError("line " + std::to_string(line_no) + ": cannot parse '" + std::string(token) +
                     "' as a number");
  }
  if (!std::isfinite(value)) {
    throw ParseError("line " + std::to_string(line_no) + ": non-finite value");
  }
  return value;
}

std::vector<double> parse_row(std::string_view line, int line_no) {
  std::vector<double> row;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    row.push_back(parse_double(line.substr(start, comma - start), line_no));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return row;
}

// Reads all non-blank lines as numeric rows; every row must share the first row's arity.
std::vector<std::vector<double>> read_rows(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto row = parse_row(line, line_no);
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(rows.front().size()) + " fields, found " +
                       std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows, std::size_t first) {
  const auto n = static_cast<Eigen::Index>(rows.size() - first);
  const auto cols = rows.empty() ? Eigen::Index{0} : static_cast<Eigen::Index>(rows[0].size());
  Eigen::MatrixXd m(n, cols);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rows[first + i][j];
  }
  return m;
}

void write_number(std::ostream& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, ptr - buf);
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return in;
}

}  // namespace

Grid::Grid(Eigen::VectorXd points, Eigen::VectorXd weights, Rule rule)
    : points_(std::move(points)), weights_(std::move(weights)), rule_(rule) {}

Grid Grid::trapezoid(std::vector<double> points) {
  const auto size = static_cast<Eigen::Index>(points.size());
  if (size < 2) throw GridError("a grid needs at least two points");
  for (Eigen::Index i = 0; i < size; ++i) {
    if (!std::isfinite(points[i])) throw GridError("grid points must be finite");
    if (i > 0 && !(points[i] > points[i - 1])) {
      throw GridError("grid points must be strictly increasing (position " + std::to_string(i) +
                      ")");
    }
  }
  Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(points.data(), size);
  Eigen::VectorXd w(size);
  w(0) = 0.5 * (t(1) - t(0));
  w(size - 1) = 0.5 * (t(size - 1) - t(size - 2));
  for (Eigen::Index i = 1; i + 1 < size; ++i) w(i) = 0.5 * (t(i + 1) - t(i - 1));
  return Grid(std::move(t), std::move(w), Rule::trapezoid);
}

Grid Grid::uniform(double start, double stop, int size) {
  if (size < 2) throw GridError("a grid needs at least two points");
  std::vector<double> t(size);
  const double step = (stop - start) / (size - 1);
  for (int i = 0; i < size; ++i) t[i] = start + step * i;
  t.back() = stop;
  return trapezoid(std::move(t));
}

Grid Grid::unit(int size) {
  if (size < 2) throw GridError("a grid needs at least two points");
  return Grid(Eigen::VectorXd::LinSpaced(size, 1.0, static_cast<double>(size)),
              Eigen::VectorXd::Ones(size), Rule::unit);
}

CurveSet::CurveSet(Grid grid, Eigen::MatrixXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.rows() < 2) throw ShapeError("a curve set needs at least two curves");
  if (values_.cols() != grid_.size()) {
    throw ShapeError("curve length " + std::to_string(values_.cols()) +
                     " does not match grid size " + std::to_string(grid_.size()));
  }
  if (!values_.allFinite()) throw ParseError("curve values must be finite");
}

ResponseVector::ResponseVector(Eigen::VectorXd y) : y_(std::move(y)) {
  if (!y_.allFinite()) throw ParseError("response values must be finite");
}

MultivariateSet::MultivariateSet(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.cols() < 2) throw ShapeError("multivariate data need p >= 2");
  if (values_.rows() < 2) throw ShapeError("multivariate data need n >= 2");
  if (!values_.allFinite()) throw ParseError("multivariate values must be finite");
}

CurveSet MultivariateSet::as_curves() const {
  return CurveSet(Grid::unit(dimension()), values_);
}

double inner_product(std::span<const double> a, std::span<const double> b, const Grid& grid) {
  const auto size = static_cast<std::size_t>(grid.size());
  if (a.size() != size || b.size() != size) {
    throw ShapeError("inner_product: operands must have the grid's length");
  }
  const auto& w = grid.weights();
  double sum = 0.0;
  for (std::size_t t = 0; t < size; ++t) sum += w(static_cast<Eigen::Index>(t)) * (a[t] * b[t]);
  return sum;
}

double inner_product(const Eigen::Ref<const Eigen::VectorXd>& a,
                     const Eigen::Ref<const Eigen::VectorXd>& b, const Grid& grid) {
  if (a.size() != grid.size() || b.size() != grid.size()) {
    throw ShapeError("inner_product: operands must have the grid's length");
  }
  return (grid.weights().array() * (a.array() * b.array())).sum();
}

CurveSet read_curve_csv(std::istream& in) {
  const auto rows = read_rows(in);
  if (rows.empty()) throw ParseError("curve file is empty");
  auto grid = Grid::trapezoid(rows.front());
  if (rows.size() < 3) throw ShapeError("curve file needs at least two curves");
  return CurveSet(std::move(grid), to_matrix(rows, 1));
}

ResponseVector read_response(std::istream& in) {
  const auto rows = read_rows(in);
  if (!rows.empty() && rows.front().size() != 1) {
    throw ParseError("response file must hold one value per line");
  }
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) y(static_cast<Eigen::Index>(i)) = rows[i][0];
  return ResponseVector(std::move(y));
}

MultivariateSet read_multivariate_csv(std::istream& in) {
  const auto rows = read_rows(in);
  if (rows.empty()) throw ParseError("multivariate file is empty");
  return MultivariateSet(to_matrix(rows, 0));
}

std::pair<CurveSet, ResponseVector> load_curves(const std::filesystem::path& curve_file,
                                                const std::filesystem::path& response_file) {
  auto curve_in = open_or_throw(curve_file);
  auto curves = read_curve_csv(curve_in);
  auto y = load_response(response_file);
  if (y.size() != curves.size()) {
    throw ShapeError("curve file has " + std::to_string(curves.size()) +
                     " rows but response file has " + std::to_string(y.size()));
  }
  return {std::move(curves), std::move(y)};
}

MultivariateSet load_multivariate(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_multivariate_csv(in);
}

ResponseVector load_response(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_response(in);
}

void write_curve_csv(std::ostream& out, const CurveSet& curves) {
  const auto& t = curves.grid().points();
  for (Eigen::Index j = 0; j < t.size(); ++j) {
    if (j > 0) out << ',';
    write_number(out, t(j));
  }
  out << '\n';
  const auto& x = curves.values();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (j > 0) out << ',';
      write_number(out, x(i, j));
    }
    out << '\n';
  }
}

void write_response(std::ostream& out, const ResponseVector& y) {
  for (Eigen::Index i = 0; i < y.values().size(); ++i) {
    write_number(out, y.values()(i));
    out << '\n';
  }
}

void write_multivariate_csv(std::ostream& out, const MultivariateSet& x) {
  const auto& v = x.values();
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      if (j > 0) out << ',';
      write_number(out, v(i, j));
    }
    out << '\n';
  }
}

}  // namespace edrdim
