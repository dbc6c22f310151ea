#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "edrdim/error.hpp"
#include "edrdim/simlab.hpp"

namespace edrdim::simlab {
namespace {

constexpr std::uint64_t kModel5BasisSeed = 20100415;

int cos_index(int l) { return 2 * l - 2; }
int sin_index(int l) { return 2 * l - 1; }

void set_cos(Eigen::MatrixXd& c, int row, int l, double value) {
  if (cos_index(l) < c.cols()) c(row, cos_index(l)) = value;
}
void set_sin(Eigen::MatrixXd& c, int row, int l, double value) {
  if (sin_index(l) < c.cols()) c(row, sin_index(l)) = value;
}

void check_model(int model, int lo, int hi) {
  if (model < lo || model > hi) {
    throw DomainError("model " + std::to_string(model) + " outside " + std::to_string(lo) + ".." +
                      std::to_string(hi));
  }
}

}  // namespace

std::string_view to_string(ScoreLaw law) {
  return law == ScoreLaw::gaussian ? "normal" : "t";
}

ScoreLaw parse_score_law(std::string_view name) {
  if (name == "normal" || name == "gaussian") return ScoreLaw::gaussian;
  if (name == "t" || name == "student_t") return ScoreLaw::student_t;
  throw DomainError("unknown score law '" + std::string(name) + "'");
}

double ProcessSpec::eigenvalue(int k) { return 20.0 * std::pow(k + 1.5, -3.0); }

void ProcessSpec::validate() const {
  if (J < 8) throw DomainError("ProcessSpec: J must be at least 8");
  if (T < 2 * J + 1) throw DomainError("ProcessSpec: T must be at least 2J + 1");
  if (law == ScoreLaw::student_t && !(nu > 2)) {
    throw DomainError("ProcessSpec: Student-t scores need nu > 2");
  }
}

int true_dimension(int model) {
  check_model(model, 1, 5);
  constexpr int dims[] = {1, 2, 3, 2, 2};
  return dims[model - 1];
}

Eigen::MatrixXd fourier_basis(const Grid& grid, int J) {
  const auto& t = grid.points();
  Eigen::MatrixXd phi(J, t.size());
  for (int k = 0; k < J; ++k) {
    const int l = k / 2 + 1;
    const Eigen::ArrayXd arg = 2.0 * std::numbers::pi * l * t.array();
    const Eigen::ArrayXd mode = k % 2 == 0 ? Eigen::ArrayXd(arg.cos()) : Eigen::ArrayXd(arg.sin());
    phi.row(k) = std::numbers::sqrt2 * mode.matrix().transpose();
  }
  return phi;
}

Eigen::MatrixXd beta_coefficients(int J) {
  if (J < 8) throw DomainError("beta_coefficients: J must be at least 8");
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(4, J);
  const int l_max = (J + 1) / 2;

  set_cos(c, 0, 1, 0.9);
  set_cos(c, 0, 2, 1.2);
  set_cos(c, 0, 4, -0.5);

  set_sin(c, 1, 1, -0.4);
  set_sin(c, 1, 2, 1.5);
  set_sin(c, 1, 3, -0.3);
  set_sin(c, 1, 4, 0.2);

  set_cos(c, 2, 1, 1.0);
  set_sin(c, 2, 2, 1.0);
  set_cos(c, 2, 3, 0.5);
  set_sin(c, 2, 4, 0.5);

  set_cos(c, 3, 1, 0.45);
  set_cos(c, 3, 2, 0.6);
  set_sin(c, 3, 3, -3.0);
  set_sin(c, 3, 4, 1.2);

  for (int l = 5; l <= l_max; ++l) {
    const double odd_cube = std::pow(2.0 * l - 1.0, 3.0);
    const double even_cube = std::pow(2.0 * l, 3.0);
    const double sign = (l % 2 == 0) ? 1.0 : -1.0;
    set_cos(c, 0, l, 1.0 / odd_cube);
    set_sin(c, 1, l, sign / even_cube);
    if (l % 2 == 1) set_cos(c, 2, l, 1.0 / odd_cube);
    if (l % 2 == 0 && l >= 6) set_sin(c, 2, l, 1.0 / even_cube);
    set_sin(c, 3, l, sign / even_cube);
  }
  return c;
}

Eigen::MatrixXd beta_curves(const Grid& grid, int J) {
  return beta_coefficients(J) * fourier_basis(grid, J);
}

Eigen::MatrixXd population_directions(int model, int m, int J) {
  check_model(model, 1, 4);
  if (m < 1 || m > J) throw DomainError("population_directions: m outside [1, J]");
  const Eigen::MatrixXd c = beta_coefficients(J);
  std::vector<int> rows;
  switch (model) {
    case 1: rows = {0}; break;
    case 2: rows = {0, 1}; break;
    case 3: rows = {0, 1, 2}; break;
    default: rows = {0, 3}; break;
  }
  Eigen::MatrixXd b(static_cast<Eigen::Index>(rows.size()), m);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int j = 0; j < m; ++j) {
      b(static_cast<Eigen::Index>(r), j) = c(rows[r], j) * std::sqrt(ProcessSpec::eigenvalue(j + 1));
    }
  }
  return b;
}

int population_rank(int model, int m, int J) {
  const Eigen::MatrixXd b = population_directions(model, m, J);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > 1e-10 * s(0)) ++rank;
  }
  return rank;
}

double model_response(int model, std::span<const double> x, double noise) {
  check_model(model, 1, 5);
  if (x.size() < (model == 5 ? 5u : 4u)) throw ShapeError("model_response: too few projections");
  switch (model) {
    case 1:
      return 1.0 + 2.0 * std::sin(x[0]) + noise;
    case 2:
      return x[0] * (2.0 * x[1] + 1.0) + noise;
    case 3:
      return 5.0 * x[0] * (2.0 * x[1] + 1.0) / (1.0 + x[2] * x[2]) + noise;
    case 4:
      return x[0] * (2.0 * x[3] + 1.0) + noise;
    default: {
      const double denom = x[1] + x[2] + x[3] + x[4] + 1.5;
      return (x[0] + x[1]) / (denom * denom) + noise;
    }
  }
}

FunctionalSample generate_functional(int model, const ProcessSpec& proc, int n, Engine& engine) {
  check_model(model, 1, 4);
  proc.validate();
  if (n < 2) throw DomainError("generate_functional: n must be at least 2");

  const Grid grid = Grid::uniform(0.0, 1.0, proc.T);
  const Eigen::MatrixXd basis = fourier_basis(grid, proc.J);
  const Eigen::MatrixXd beta = beta_coefficients(proc.J);
  Eigen::VectorXd root_omega(proc.J);
  for (int k = 0; k < proc.J; ++k) root_omega(k) = std::sqrt(ProcessSpec::eigenvalue(k + 1));

  std::normal_distribution<double> normal(0.0, 1.0);
  std::chi_squared_distribution<double> mixing(proc.nu);

  Eigen::MatrixXd xi(n, proc.J);
  Eigen::VectorXd y(n);
  Eigen::VectorXd eta(proc.J);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < proc.J; ++k) eta(k) = normal(engine);
    if (proc.law == ScoreLaw::student_t) {
      const double tau = mixing(engine);
      eta /= std::sqrt(tau / (proc.nu - 2.0));
    }
    xi.row(i) = eta.cwiseProduct(root_omega).transpose();
    const Eigen::Vector4d projections = beta * xi.row(i).transpose();
    const double noise = kNoiseSd * normal(engine);
    y(i) = model_response(model, std::span<const double>(projections.data(), 4), noise);
  }
  return {CurveSet(grid, xi * basis), ResponseVector(std::move(y))};
}

FunctionalSample generate_functional(int model, const ProcessSpec& proc, int n,
                                     std::uint64_t seed) {
  auto engine = substream(seed, {});
  return generate_functional(model, proc, n, engine);
}

const Eigen::MatrixXd& model5_basis() {
  static const Eigen::MatrixXd basis = [] {
    auto engine = substream(kModel5BasisSeed, {});
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd g(kModel5SignalDim, kModel5Components);
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = normal(engine);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(g.rows(), g.cols());
    const Eigen::MatrixXd r = qr.matrixQR().topRows(g.cols()).triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      if (r(j, j) < 0) q.col(j) *= -1.0;
    }
    return q;
  }();
  return basis;
}

Eigen::Vector<double, 5> model5_signal_variances() {
  return Eigen::Vector<double, 5>{3.0, 2.8, 2.6, 2.4, 2.2};
}

MultivariateSample generate_model5(int n, int p, Engine& engine) {
  if (p < kModel5SignalDim) throw DomainError("generate_model5: p must be at least 10");
  if (n < 2) throw DomainError("generate_model5: n must be at least 2");
  const Eigen::MatrixXd& psi = model5_basis();
  const Eigen::Vector<double, 5> sd = model5_signal_variances().cwiseSqrt();
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::MatrixXd w(n, p);
  Eigen::VectorXd y(n);
  Eigen::Vector<double, 5> xi;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < kModel5Components; ++k) xi(k) = sd(k) * normal(engine);
    const Eigen::VectorXd signal = psi * xi;
    for (int j = 0; j < p; ++j) {
      w(i, j) = (j < kModel5SignalDim ? signal(j) : 0.0) + normal(engine);
    }
    const double noise = kNoiseSd * normal(engine);
    y(i) = model_response(5, std::span<const double>(signal.data(), 5), noise);
  }
  return {MultivariateSet(std::move(w)), ResponseVector(std::move(y))};
}

MultivariateSample generate_model5(int n, int p, std::uint64_t seed) {
  auto engine = substream(seed, {});
  return generate_model5(n, p, engine);
}

}  // namespace edrdim::simlab
