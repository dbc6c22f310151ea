// Reproduction checks against the published simulation results. Prints one
// PASS/FAIL line per criterion and exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>
#include <optional>
#include <random>

#include "cli.hpp"
#include "edrdim/dimtest.hpp"
#include "edrdim/fpca.hpp"
#include "edrdim/parallel.hpp"
#include "edrdim/random.hpp"
#include "edrdim/simlab.hpp"
#include "edrdim/sir.hpp"
#include "edrdim/stats.hpp"

using namespace edrdim;
using namespace edrdim::simlab;

namespace {

constexpr int kReps = 1000;
constexpr std::uint64_t kSeed = 20100415;

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* pattern, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol; }

Setting setting(Scenario sc, Method method, std::optional<int> m, Task task, int k0 = 1) {
  Setting s;
  s.scenario = sc;
  s.procedure = {method, m};
  s.task = task;
  s.k0 = k0;
  return s;
}

std::vector<McReport> run(const std::vector<Setting>& settings) {
  McOptions o;
  o.replicates = kReps;
  o.master_seed = kSeed;
  return run_table(settings, o);
}

std::string cli_output(std::vector<std::string> args) {
  args.insert(args.begin(), "edrdim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  if (cli::run(static_cast<int>(argv.size()), argv.data(), out, err) != 0) return "error: " + err.str();
  return out.str();
}

void size_and_power() {
  const Scenario m1{1, ScoreLaw::gaussian, 500, 0};
  const Scenario m2{2, ScoreLaw::gaussian, 500, 0};
  const Scenario m2t{2, ScoreLaw::student_t, 500, 0};
  const auto r = run({setting(m1, Method::chi2, 5, Task::reject),
                      setting(m2, Method::chi2, 5, Task::reject),
                      setting(m2t, Method::adjusted_chi2, 5, Task::reject)});
  report(1, "size, model 1 normal n=500 chi2 m=5", within(r[0].frequency, 0.052, 0.025),
         fmt("rejection frequency %.3f, target 0.052 +/- 0.025", r[0].frequency));
  report(2, "power, model 2 normal n=500 chi2 m=5", r[1].frequency >= 0.99,
         fmt("rejection frequency %.3f, target >= 0.99", r[1].frequency));
  report(3, "elliptical adjustment, model 2 t(5) n=500 adjusted m=5",
         within(r[2].frequency, 0.969, 0.04),
         fmt("rejection frequency %.3f, target 0.969 +/- 0.04", r[2].frequency));
}

void dimension_estimates() {
  const Scenario m1{1, ScoreLaw::gaussian, 200, 0};
  const Scenario m4{4, ScoreLaw::gaussian, 500, 0};
  const Scenario m5{5, ScoreLaw::gaussian, 500, 100};
  const auto r = run({setting(m1, Method::chi2, 5, Task::correct_dimension),
                      setting(m1, Method::adaptive_neyman, std::nullopt, Task::correct_dimension),
                      setting(m4, Method::chi2, 5, Task::correct_dimension),
                      setting(m4, Method::chi2, 7, Task::correct_dimension),
                      setting(m4, Method::adaptive_neyman, std::nullopt, Task::correct_dimension),
                      setting(m5, Method::chi2, std::nullopt, Task::correct_dimension),
                      setting(m5, Method::adaptive_neyman, std::nullopt, Task::correct_dimension)});
  report(4, "correct dimension, model 1 normal n=200",
         within(r[0].frequency, 0.960, 0.03) && within(r[1].frequency, 0.956, 0.03),
         fmt("chi2 m=5 %.3f (0.960 +/- 0.03), neyman %.3f (0.956 +/- 0.03)", r[0].frequency,
             r[1].frequency));
  report(5, "truncation sensitivity, model 4 n=500",
         r[2].frequency <= 0.10 && within(r[3].frequency, 0.913, 0.04) &&
             within(r[4].frequency, 0.885, 0.04),
         fmt("chi2 m=5 %.3f (<= 0.10), m=7 %.3f (0.913 +/- 0.04), neyman %.3f (0.885 +/- 0.04)",
             r[2].frequency, r[3].frequency, r[4].frequency));
  report(6, "high-dimensional, model 5 p=100 n=500",
         r[5].frequency <= 0.40 && r[6].frequency >= 0.90,
         fmt("Li chi2 m=p %.3f (<= 0.40), neyman %.3f (>= 0.90)", r[5].frequency,
             r[6].frequency));
}

void profile() {
  ProfileOptions o;
  o.replicates = kReps;
  o.seed = kSeed;
  const auto rows = statistic_profile(o);
  bool ok = true;
  std::string detail;
  for (const auto& row : rows) {
    const bool below = row.m <= 5;
    auto fits = [&](double mean) {
      return below ? mean < row.reference : std::abs(mean - row.reference) <= 0.1 * row.reference;
    };
    ok = ok && fits(row.mean_statistic) && fits(row.mean_adjusted_statistic);
    detail += fmt("m=%g T=%.2f T*=%.2f line=%g; ", row.m, row.mean_statistic,
                  row.mean_adjusted_statistic, row.reference);
  }
  report(7, "profile of mean statistics, model 4 k0=2", ok, detail);
}

void properties() {
  // Null law of T for model 1, k0 = 1, m = 5 against chi-squared(24).
  const Scenario sc{1, ScoreLaw::gaussian, 500, 0};
  const std::uint64_t key = scenario_key(sc);
  std::vector<double> t(kReps);
  std::vector<double> collapse_error(kReps);
  parallel_for(t.size(), resolve_workers(), [&](std::size_t rep) {
    auto engine = substream(kSeed + 1, {key, rep});
    const auto sample = generate_functional(1, ProcessSpec{}, sc.n, engine);
    const EigenSystem eig = eigensystem(sample.curves);
    const ScoreMatrix scores = pc_scores(sample.curves, eig, 5);
    const SirModel sir = build_sir(scores, make_slices(sample.y, 8));
    t[rep] = chi2_statistic(sir, sc.n, 1);
    const double collapsed = adjusted_chi2_statistic(sir, sc.n, 1, Eigen::VectorXd::Ones(8));
    collapse_error[rep] = std::abs(collapsed - t[rep]) / std::max(1.0, t[rep]);
  });
  const double d = stats::ks_statistic(t, [](double x) { return stats::chi2_cdf(x, 24); });
  const double p = stats::ks_pvalue(d, t.size());
  const double mean_t = stats::mean(t);
  double worst_collapse = 0.0;
  for (double e : collapse_error) worst_collapse = std::max(worst_collapse, e);

  // SIR invariants on randomized inputs.
  double worst_bg = 0.0, worst_nest = 0.0, worst_norm = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto engine = substream(kSeed + 2, {static_cast<std::uint64_t>(trial)});
    const int H = std::uniform_int_distribution<int>(2, 12)(engine);
    const int n = std::uniform_int_distribution<int>(2 * H, 150)(engine);
    const int m = std::uniform_int_distribution<int>(1, 12)(engine);
    std::normal_distribution<double> z;
    ScoreMatrix s{Eigen::MatrixXd(n, m)};
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) s.scores(i, j) = z(engine) * (1.0 + j);
      y(i) = z(engine);
    }
    const SirModel sir = build_sir(s, make_slices(ResponseVector(y), H));
    worst_bg = std::max(worst_bg, (sir.between * sir.root_proportions).cwiseAbs().maxCoeff());
    worst_norm = std::max(worst_norm, std::abs(sir.root_proportions.norm() - 1.0));
    for (int k = 1; k < m; ++k) {
      const SirModel sub = build_sir(ScoreMatrix{s.scores.leftCols(k)}, make_slices(ResponseVector(y), H));
      worst_nest = std::max(worst_nest,
                            (sub.covariance - sir.covariance.topLeftCorner(k, k)).cwiseAbs().maxCoeff());
    }
  }

  const auto prop_a = proposition1_check(3, 4, 1, 100'000, kSeed + 3);
  const auto prop_b = proposition1_check(6, 7, 2, 100'000, kSeed + 4);

  const bool ok = p > 0.01 && std::abs(mean_t - 24.0) <= 0.05 * 24.0 && worst_collapse <= 1e-12 &&
                  worst_bg <= 1e-10 && worst_norm <= 1e-12 && worst_nest == 0.0 && prop_a.holds &&
                  prop_b.holds;
  std::string detail = fmt("KS p=%.3f mean T=%.2f (df 24); identity collapse max rel err %.1e; ",
                           p, mean_t, worst_collapse);
  detail += fmt("max |Bg|=%.1e, max nesting diff %.1e; ", worst_bg, worst_nest);
  detail += std::string("dominance (3,4,1) ") + (prop_a.holds ? "holds" : "violated") +
            ", (6,7,2) " + (prop_b.holds ? "holds" : "violated");
  report(8, "property suite", ok, detail);
}

void determinism() {
  const std::vector<std::vector<std::string>> invocations{
      {"simulate-table", "--table", "1", "--rows", "model=2,dist=t,n=200", "--reps", "40",
       "--seed", "5", "--critical-reps", "20000", "--format", "csv"},
      {"simulate-table", "--table", "4", "--rows", "model=5,dist=normal,n=200,p=20", "--reps",
       "40", "--seed", "5", "--critical-reps", "20000"},
      {"simulate-table", "--table", "fig2", "--n", "200", "--reps", "20", "--seed", "5"},
      {"simulate-table", "--table", "prop1", "--reps", "20000", "--seed", "5"}};
  bool ok = true;
  for (auto args : invocations) {
    args.push_back("--threads");
    args.push_back("1");
    const std::string one = cli_output(args);
    args.back() = "4";
    const std::string four = cli_output(args);
    args.back() = "16";
    const std::string sixteen = cli_output(args);
    ok = ok && one.rfind("error", 0) != 0 && one == four && one == sixteen;
  }
  report(9, "determinism across 1, 4 and 16 workers", ok,
         ok ? "4 simulate-table invocations byte-identical" : "outputs differ or failed");
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  size_and_power();
  dimension_estimates();
  profile();
  properties();
  determinism();
  const double minutes =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60.0;
  std::printf("%d of 9 criteria failed; %.1f min on %d worker(s)\n", failures, minutes,
              resolve_workers());
  return failures == 0 ? 0 : 1;
}
