#include <algorithm>
#include <optional>
#include <string>

#include "edrdim/dimtest.hpp"
#include "edrdim/error.hpp"

namespace edrdim {
namespace {

// N used at step k0, or nothing when no admissible N exists.
std::optional<int> neyman_truncation(const EstimationConfig& config, int k0, int available) {
  const int wanted = config.N ? *config.N : k0 + config.neyman_offset;
  const int N = std::min(wanted, available);
  if (N <= k0) return std::nullopt;
  return N;
}

}  // namespace

int required_components(const EstimationConfig& config) {
  if (config.method != Method::adaptive_neyman) return config.m;
  if (config.N) return *config.N;
  return (config.H - 2) + config.neyman_offset;
}

DimensionEstimate estimate_dimension(const ScoreMatrix& scores, const SlicePartition& part,
                                     const EstimationConfig& config, NeymanCriticalCache* cache) {
  const int n = scores.size();
  const int H = part.H;
  if (H != config.H) throw DomainError("estimate_dimension: partition H differs from config H");
  if (!(config.alpha > 0 && config.alpha < 1)) throw DomainError("alpha must lie in (0, 1)");
  if (H < 2) throw DomainError("estimate_dimension: need H >= 2");

  DimensionEstimate estimate;

  if (config.method == Method::adaptive_neyman) {
    std::optional<NeymanCriticalCache> own;
    if (!cache) {
      own.emplace(config.seed, config.critical_replicates, config.workers);
      cache = &*own;
    }
    const int available = scores.m();
    const int widest = std::min(available, required_components(config));
    if (widest < 1) throw RankError("estimate_dimension: no score components available");
    const SirModel full = build_sir(ScoreMatrix{scores.scores.leftCols(widest)}, part);
    for (int k0 = 0;; ++k0) {
      const auto N = neyman_truncation(config, k0, widest);
      if (k0 > H - 2 || !N) {
        estimate.k_hat = k0;
        estimate.capped = true;
        return estimate;
      }
      const auto crit = cache->get(H, k0, *N, config.alpha);
      estimate.trace.push_back(neyman_test(full.leading(*N), n, k0, config.alpha, *crit));
      if (!estimate.trace.back().reject) {
        estimate.k_hat = k0;
        return estimate;
      }
    }
  }

  const int m = config.m;
  if (m < 1 || m > scores.m()) {
    throw RankError("estimate_dimension: m = " + std::to_string(m) + " but only " +
                    std::to_string(scores.m()) + " score columns are available");
  }
  const ScoreMatrix used{scores.scores.leftCols(m)};
  const SirModel sir = build_sir(used, part);
  const int last = std::min(m - 1, H - 2);
  for (int k0 = 0;; ++k0) {
    if (k0 > last) {
      estimate.k_hat = k0;
      estimate.capped = true;
      return estimate;
    }
    estimate.trace.push_back(config.method == Method::chi2
                                 ? chi2_test(sir, n, k0, config.alpha)
                                 : adjusted_chi2_test(used, part, sir, n, k0, config.alpha));
    if (!estimate.trace.back().reject) {
      estimate.k_hat = k0;
      return estimate;
    }
  }
}

DimensionEstimate estimate_dimension(const CurveSet& curves, const ResponseVector& y,
                                     const EstimationConfig& config) {
  if (y.size() != curves.size()) {
    throw ShapeError("estimate_dimension: curves and response differ in length");
  }
  const EigenSystem eig = eigensystem(curves);
  const int wanted = required_components(config);
  int columns = std::min(wanted, eig.usable_rank());
  if (config.method != Method::adaptive_neyman && columns < config.m) {
    throw RankError("estimate_dimension: m = " + std::to_string(config.m) +
                    " exceeds the usable rank " + std::to_string(eig.usable_rank()));
  }
  const ScoreMatrix scores = pc_scores(curves, eig, columns);
  const SlicePartition part = make_slices(y, config.H);
  return estimate_dimension(scores, part, config);
}

}  // namespace edrdim
