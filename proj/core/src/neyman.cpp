#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "edrdim/dimtest.hpp"
#include "edrdim/error.hpp"
#include "edrdim/linalg.hpp"
#include "edrdim/parallel.hpp"
#include "edrdim/random.hpp"
#include "edrdim/stats.hpp"

namespace edrdim {

double NeymanCriticalTable::attained_level(double statistic) const {
  if (sorted_maxima.empty()) return 1.0;
  const auto first = std::lower_bound(sorted_maxima.begin(), sorted_maxima.end(), statistic);
  return static_cast<double>(sorted_maxima.end() - first) /
         static_cast<double>(sorted_maxima.size());
}

NeymanStatistic neyman_statistic(const SirModel& sir, int n, int k0) {
  const int N = sir.m;
  if (k0 < 0 || N <= k0) {
    throw DomainError("neyman_statistic: need N > k0 >= 0 (N = " + std::to_string(N) +
                      ", k0 = " + std::to_string(k0) + ")");
  }
  const int d = sir.H - k0 - 1;
  if (d <= 0) throw DomainError("neyman_statistic: need H > k0 + 1");

  NeymanStatistic best{-std::numeric_limits<double>::infinity(), k0 + 1};
  for (int m = k0 + 1; m <= N; ++m) {
    const Eigen::VectorXd lambda =
        linalg::symmetric_eigenvalues(sir.covariance.topLeftCorner(m, m));
    double trailing = 0.0;
    for (Eigen::Index j = k0; j < lambda.size(); ++j) trailing += std::max(lambda(j), 0.0);
    const double df = static_cast<double>((m - k0) * d);
    const double standardized = (n * trailing - df) / std::sqrt(2.0 * df);
    if (standardized > best.value) best = {standardized, m};
  }
  return best;
}

NeymanStatistic neyman_statistic(const ScoreMatrix& scores, const SlicePartition& part, int n,
                                 int k0, int N) {
  if (N > scores.m()) {
    throw RankError("neyman_statistic: N = " + std::to_string(N) + " exceeds the " +
                    std::to_string(scores.m()) + " available score columns");
  }
  if (N <= k0) throw DomainError("neyman_statistic: need N > k0");
  return neyman_statistic(build_sir(ScoreMatrix{scores.scores.leftCols(N)}, part), n, k0);
}

NeymanCriticalTable simulate_neyman_critical(int H, int k0, int N, double alpha, int replicates,
                                             std::uint64_t seed, int workers) {
  const int d = H - k0 - 1;
  if (k0 < 0 || d <= 0) throw DomainError("simulate_neyman_critical: need H > k0 + 1 >= 1");
  if (N <= k0) throw DomainError("simulate_neyman_critical: need N > k0");
  if (!(alpha > 0 && alpha < 1)) throw DomainError("simulate_neyman_critical: alpha in (0, 1)");
  if (replicates < kMinCriticalReplicates) {
    throw DomainError("simulate_neyman_critical: at least " +
                      std::to_string(kMinCriticalReplicates) + " replicates required");
  }

  NeymanCriticalTable table;
  table.H = H;
  table.k0 = k0;
  table.N = N;
  table.alpha = alpha;
  table.replicates = replicates;
  table.seed = seed;
  table.sorted_maxima.assign(static_cast<std::size_t>(replicates), 0.0);

  std::vector<double> scale(static_cast<std::size_t>(N - k0));
  for (int j = 1; j <= N - k0; ++j) scale[static_cast<std::size_t>(j - 1)] = std::sqrt(2.0 * j * d);

  parallel_for(static_cast<std::size_t>(replicates), resolve_workers(workers), [&](std::size_t i) {
    auto engine = substream(seed, {i});
    std::chi_squared_distribution<double> chi2(d);
    double partial = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 1; j <= N - k0; ++j) {
      partial += chi2(engine);
      best = std::max(best, (partial - static_cast<double>(j) * d) /
                                scale[static_cast<std::size_t>(j - 1)]);
    }
    table.sorted_maxima[i] = best;
  });

  std::sort(table.sorted_maxima.begin(), table.sorted_maxima.end());
  table.u_alpha = stats::quantile_type7(table.sorted_maxima, 1.0 - alpha);
  return table;
}

TestResult neyman_test(const SirModel& sir, int n, int k0, double alpha,
                       const NeymanCriticalTable& crit) {
  if (crit.H != sir.H || crit.k0 != k0 || crit.N != sir.m || crit.alpha != alpha) {
    throw DomainError("neyman_test: critical table (H, k0, N, alpha) does not match the test");
  }
  const auto u = neyman_statistic(sir, n, k0);
  TestResult r;
  r.method = Method::adaptive_neyman;
  r.k0 = k0;
  r.truncation = sir.m;
  r.statistic = u.value;
  r.critical_value = crit.u_alpha;
  r.argmax_m = u.argmax_m;
  r.alpha = alpha;
  r.p_value = crit.attained_level(u.value);
  r.reject = u.value > crit.u_alpha;
  return r;
}

TestResult neyman_test(const ScoreMatrix& scores, const SlicePartition& part, int n, int k0, int N,
                       double alpha, const NeymanCriticalTable& crit) {
  if (N > scores.m()) {
    throw RankError("neyman_test: N = " + std::to_string(N) + " exceeds the " +
                    std::to_string(scores.m()) + " available score columns");
  }
  return neyman_test(build_sir(ScoreMatrix{scores.scores.leftCols(N)}, part), n, k0, alpha, crit);
}

NeymanCriticalCache::NeymanCriticalCache(std::uint64_t seed, int replicates, int workers)
    : seed_(seed), replicates_(replicates), workers_(workers) {}

std::shared_ptr<const NeymanCriticalTable> NeymanCriticalCache::get(int H, int k0, int N,
                                                                    double alpha) {
  std::lock_guard lock(mutex_);
  auto& slot = tables_[{H, k0, N, alpha}];
  if (!slot) {
    slot = std::make_shared<const NeymanCriticalTable>(
        simulate_neyman_critical(H, k0, N, alpha, replicates_, seed_, workers_));
  }
  return slot;
}

}  // namespace edrdim
