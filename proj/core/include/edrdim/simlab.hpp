#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "edrdim/dimtest.hpp"
#include "edrdim/fdata.hpp"
#include "edrdim/random.hpp"

namespace edrdim::simlab {

enum class ScoreLaw { gaussian, student_t };

std::string_view to_string(ScoreLaw law);
/// "normal" / "gaussian" or "t" / "student_t".
ScoreLaw parse_score_law(std::string_view name);

/// Truncated Karhunen-Loeve process on [0, 1]:
///   X(t) = sum_{k<=J} omega_k^{1/2} eta_k phi_k(t),  omega_k = 20 (k + 1.5)^{-3},
/// with phi_{2l-1} = sqrt(2) cos(2 l pi t) and phi_{2l} = sqrt(2) sin(2 l pi t).
/// Student-t scores share one chi-squared(nu) divisor per curve,
/// eta_k = z_k / sqrt(tau / (nu - 2)), so they are uncorrelated but dependent.
struct ProcessSpec {
  ScoreLaw law = ScoreLaw::gaussian;
  double nu = 5.0;
  int J = 100;
  int T = 501;

  static double eigenvalue(int k);
  /// Throws DomainError unless J >= 8, T >= 2J + 1 and nu > 2 for Student-t scores.
  void validate() const;
};

inline constexpr double kNoiseSd = 0.5;
inline constexpr int kModel5SignalDim = 10;
inline constexpr int kModel5Components = 5;

/// True EDR dimension of models 1..5.
int true_dimension(int model);

/// J x T matrix of the Fourier modes phi_k sampled on `grid`.
Eigen::MatrixXd fourier_basis(const Grid& grid, int J);

/// 4 x J coefficients of beta_1..beta_4 on the Fourier modes, tails truncated at J.
Eigen::MatrixXd beta_coefficients(int J);

/// 4 x T curves beta_1..beta_4 sampled on `grid`.
Eigen::MatrixXd beta_curves(const Grid& grid, int J);

/// EDR coefficient vectors b_k = (c_k1 omega_1^{1/2}, ..., c_km omega_m^{1/2}) of a
/// functional model (1..4), one row per direction, restricted to the first m components.
Eigen::MatrixXd population_directions(int model, int m, int J = 100);

/// Rank of population_directions(model, m): K_(m) for the functional models.
int population_rank(int model, int m, int J = 100);

/// Link functions. `projections` holds <beta_1, X>, ..., <beta_4, X> (functional
/// models) or the first five coordinates of the true X (model 5).
double model_response(int model, std::span<const double> projections, double noise);

struct FunctionalSample {
  CurveSet curves;
  ResponseVector y;
};

FunctionalSample generate_functional(int model, const ProcessSpec& proc, int n, Engine& engine);
FunctionalSample generate_functional(int model, const ProcessSpec& proc, int n,
                                     std::uint64_t seed);

struct MultivariateSample {
  MultivariateSet w;
  ResponseVector y;
};

/// 10 x 5 orthonormal columns psi_1..psi_5, drawn once from a fixed seed.
const Eigen::MatrixXd& model5_basis();
Eigen::Vector<double, 5> model5_signal_variances();

/// W = X + U with X = (sum_k xi_k psi_k, 0_{p-10}), xi_k ~ N(0, omega_k), U ~ N(0, I_p).
MultivariateSample generate_model5(int n, int p, Engine& engine);
MultivariateSample generate_model5(int n, int p, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Monte Carlo tables

enum class Task { reject, correct_dimension };

struct Scenario {
  int model = 1;
  ScoreLaw law = ScoreLaw::gaussian;
  int n = 200;
  int p = 0;  // model 5 only

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// One testing procedure. For the chi-squared variants an empty `m` means
/// "all components", which on multivariate data is Li's test with m = p.
struct Procedure {
  Method method = Method::chi2;
  std::optional<int> m = 5;
  int neyman_offset = kDefaultNeymanOffset;

  [[nodiscard]] std::string label() const;
};

struct Setting {
  Scenario scenario;
  Procedure procedure;
  Task task = Task::reject;
  int k0 = 1;
  int H = kDefaultSlices;
  double alpha = 0.05;
  int table = 0;  // 0 when not part of a preset table
};

struct McReport {
  Setting setting;
  int replicates = 0;
  int count = 0;
  double frequency = 0.0;
  double monte_carlo_se = 0.0;
  std::uint64_t seed = 0;
  int critical_replicates = 0;
};

struct McOptions {
  int replicates = 1000;
  std::uint64_t master_seed = 1;
  int workers = 0;
  int critical_replicates = kDefaultCriticalReplicates;
  int J = 100;
  int T = 501;
};

/// Replicate r of a scenario always uses the stream (master_seed, scenario key, r),
/// so every procedure in one call sees the same data sets and the results do
/// not depend on the worker count or on which other rows are requested.
std::vector<McReport> run_table(const std::vector<Setting>& settings, const McOptions& options);

/// Stable identifier of a scenario for stream derivation.
std::uint64_t scenario_key(const Scenario& scenario);

/// Preset layouts. Tables 1-3 use the procedures chi2/adjusted at m = 5, 7, 30
/// plus adaptive Neyman; table 1 rejects H0: K <= 1, tables 2-4 count correct
/// dimension estimates, table 5 rejects H0: K <= 2 under model 5.
std::vector<Procedure> table_procedures(int table);
std::vector<Scenario> table_rows(int table);
std::vector<Setting> table_settings(int table, const std::vector<Scenario>& rows);

/// Parses "model=1,dist=normal,n=200[,p=100]"; several rows separated by ';'.
std::vector<Scenario> parse_rows(std::string_view text);

// ---------------------------------------------------------------------------
// Null-profile of the statistics under model 4

struct ProfileRow {
  int m = 0;
  double mean_statistic = 0.0;           // mean of T_{k0,(m)}
  double mean_adjusted_statistic = 0.0;  // mean of T*_{k0,(m)}
  double reference = 0.0;                // (m - k0)(H - k0 - 1)
};

struct ProfileOptions {
  int n = 500;
  int k0 = 2;
  int m_min = 4;
  int m_max = 12;
  int H = kDefaultSlices;
  int replicates = 1000;
  std::uint64_t seed = 1;
  int workers = 0;
  int J = 100;
  int T = 501;
};

std::vector<ProfileRow> statistic_profile(const ProfileOptions& options);

// ---------------------------------------------------------------------------
// Stochastic bound for trailing eigenvalue sums of partially Gaussian matrices

/// sum_{j > r} lambda_j(Z Z^T) for a p x q matrix Z.
double trailing_eigen_sum(const Eigen::MatrixXd& z, int r);

struct DominanceRow {
  double level = 0.0;             // chi-squared quantile level
  double threshold = 0.0;         // chi-squared quantile at `level`
  double empirical_survival = 0.0;
  double bound_survival = 0.0;    // 1 - level
  double tolerance = 0.0;         // 3 Monte Carlo standard errors
  bool holds = false;
};

struct DominanceReport {
  int p = 0;
  int q = 0;
  int r = 0;
  int replicates = 0;
  std::uint64_t seed = 0;
  double z1_scale = 2.0;
  int df = 0;
  std::vector<DominanceRow> rows;
  bool holds = false;
};

/// Z = [Z1 | Z2] with Z1 (p x r) i.i.d. N(0, z1_scale^2) and Z2 (p x (q - r))
/// i.i.d. N(0, 1). Checks the empirical survival function of the trailing
/// sum against chi-squared((p - r)(q - r)) at the levels 0.5, 0.8, 0.9, 0.95, 0.99.
DominanceReport proposition1_check(int p, int q, int r, int replicates, std::uint64_t seed,
                                   double z1_scale = 2.0, int workers = 0);

}  // namespace edrdim::simlab
