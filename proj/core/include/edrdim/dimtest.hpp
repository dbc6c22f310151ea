#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "edrdim/fdata.hpp"
#include "edrdim/fpca.hpp"
#include "edrdim/sir.hpp"

namespace edrdim {

enum class Method { chi2, adjusted_chi2, adaptive_neyman };

std::string_view to_string(Method method);
/// Accepts "chi2", "adjusted_chi2" / "adjusted" and "adaptive_neyman" / "neyman".
Method parse_method(std::string_view name);

/// Outcome of one test of H0: K <= k0.
///
/// The chi-squared variants report `df` and an asymptotic p-value; the
/// adaptive Neyman test reports the simulated critical value and the
/// attained level of the statistic under the simulated bound process.
struct TestResult {
  Method method = Method::chi2;
  int k0 = 0;
  int truncation = 0;  // m for the chi-squared variants, N for adaptive Neyman
  double statistic = 0.0;
  std::optional<int> df;
  std::optional<double> critical_value;
  std::optional<int> argmax_m;
  double alpha = 0.05;
  double p_value = 1.0;
  bool reject = false;
};

/// Simulated 1 - alpha quantile of
///   B = max_{k0 < m <= N} (X_(m) - (m - k0) d) / sqrt(2 (m - k0) d),
/// where X_(m) is a partial sum of m - k0 i.i.d. chi-squared(d) draws and d = H - k0 - 1.
struct NeymanCriticalTable {
  int H = 0;
  int k0 = 0;
  int N = 0;
  double alpha = 0.05;
  int replicates = 0;
  std::uint64_t seed = 0;
  double u_alpha = 0.0;
  std::vector<double> sorted_maxima;

  /// Fraction of simulated maxima at or above `statistic`.
  [[nodiscard]] double attained_level(double statistic) const;
};

struct DimensionEstimate {
  int k_hat = 0;
  std::vector<TestResult> trace;
  bool capped = false;
};

inline constexpr int kDefaultNeymanOffset = 30;
inline constexpr int kDefaultCriticalReplicates = 100'000;
inline constexpr int kMinCriticalReplicates = 10'000;

/// (m - k0)(H - k0 - 1)
int degrees_of_freedom(int m, int H, int k0);

/// n * sum_{j > k0} lambda_j(V), eigenvalues clamped at zero. Throws DomainError unless 0 <= k0 < m.
double chi2_statistic(const SirModel& sir, int n, int k0);
TestResult chi2_test(const SirModel& sir, int n, int k0, double alpha);

/// Per-slice conditional second moment estimates, computed on the span of the
/// m - k0 trailing eigenvectors of V.
Eigen::VectorXd tau_hat(const ScoreMatrix& scores, const SlicePartition& part,
                        const SirModel& sir, int k0);

/// n * sum_{j > k0} lambda_j(W W^T) with W = B L (L J_g L)^-, L = diag(tau^{1/2}).
double adjusted_chi2_statistic(const SirModel& sir, int n, int k0, const Eigen::VectorXd& tau);
TestResult adjusted_chi2_test(const ScoreMatrix& scores, const SlicePartition& part,
                              const SirModel& sir, int n, int k0, double alpha);

struct NeymanStatistic {
  double value = 0.0;
  int argmax_m = 0;
};

/// max over m = k0+1..N of (T_{k0,(m)} - df_m) / sqrt(2 df_m), where `sir` is
/// built on the first N score components and T_{k0,(m)} uses its leading m x m block.
NeymanStatistic neyman_statistic(const SirModel& sir, int n, int k0);
NeymanStatistic neyman_statistic(const ScoreMatrix& scores, const SlicePartition& part, int n,
                                 int k0, int N);

/// Replicate i draws from the stream (seed, i), so the table does not depend on `workers`.
NeymanCriticalTable simulate_neyman_critical(int H, int k0, int N, double alpha, int replicates,
                                             std::uint64_t seed, int workers = 0);

TestResult neyman_test(const SirModel& sir, int n, int k0, double alpha,
                       const NeymanCriticalTable& crit);
TestResult neyman_test(const ScoreMatrix& scores, const SlicePartition& part, int n, int k0, int N,
                       double alpha, const NeymanCriticalTable& crit);

/// Thread-safe memo of critical tables keyed by (H, k0, N, alpha). Every key
/// is simulated with the same seed, so values do not depend on request order.
class NeymanCriticalCache {
 public:
  NeymanCriticalCache(std::uint64_t seed, int replicates, int workers = 0);

  std::shared_ptr<const NeymanCriticalTable> get(int H, int k0, int N, double alpha);

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] int replicates() const noexcept { return replicates_; }

 private:
  std::uint64_t seed_;
  int replicates_;
  int workers_;
  std::mutex mutex_;
  std::map<std::tuple<int, int, int, double>, std::shared_ptr<const NeymanCriticalTable>> tables_;
};

struct EstimationConfig {
  Method method = Method::adaptive_neyman;
  int H = kDefaultSlices;
  int m = 5;
  std::optional<int> N;  // fixed N; otherwise N = k0 + neyman_offset at each step
  int neyman_offset = kDefaultNeymanOffset;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int critical_replicates = kDefaultCriticalReplicates;
  int workers = 0;
};

/// Score columns the configuration can consume at most.
int required_components(const EstimationConfig& config);

/// Sequential testing of H0: K <= k0 for k0 = 0, 1, ... up to the first
/// non-rejection. When every admissible k0 rejects, k_hat is one past the
/// last admissible k0 and `capped` is set. Admissible k0 satisfy
/// k0 <= H - 2 and k0 < m (chi-squared variants) or k0 < N (Neyman).
/// For adaptive Neyman, N is capped at the number of score columns supplied.
DimensionEstimate estimate_dimension(const ScoreMatrix& scores, const SlicePartition& part,
                                     const EstimationConfig& config,
                                     NeymanCriticalCache* cache = nullptr);

/// Full pipeline: FPCA, slicing, then the sequential procedure.
DimensionEstimate estimate_dimension(const CurveSet& curves, const ResponseVector& y,
                                     const EstimationConfig& config);

}  // namespace edrdim
