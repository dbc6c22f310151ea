#include <algorithm>
#include <charconv>
#include <climits>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "edrdim/error.hpp"
#include "edrdim/fpca.hpp"
#include "edrdim/linalg.hpp"
#include "edrdim/parallel.hpp"
#include "edrdim/simlab.hpp"
#include "edrdim/stats.hpp"

namespace edrdim::simlab {
namespace {

constexpr int kAllComponents = INT_MAX;
constexpr std::uint64_t kProfileStream = 0x50524f46494c45ULL;  // "PROFILE"

struct Draw {
  CurveSet curves;
  ResponseVector y;
};

Draw draw(const Scenario& s, const McOptions& options, Engine& engine) {
  if (s.model == 5) {
    auto sample = generate_model5(s.n, s.p, engine);
    return {sample.w.as_curves(), std::move(sample.y)};
  }
  ProcessSpec proc;
  proc.law = s.law;
  proc.J = options.J;
  proc.T = options.T;
  auto sample = generate_functional(s.model, proc, s.n, engine);
  return {std::move(sample.curves), std::move(sample.y)};
}

int columns_needed(const Setting& s) {
  const auto& proc = s.procedure;
  if (proc.method != Method::adaptive_neyman) return proc.m ? *proc.m : kAllComponents;
  if (s.task == Task::reject) return s.k0 + proc.neyman_offset;
  return (s.H - 2) + proc.neyman_offset;
}

bool evaluate(const Setting& s, const ScoreMatrix& scores, const SlicePartition& part,
              NeymanCriticalCache& cache) {
  const auto& proc = s.procedure;
  const int n = scores.size();
  const int m = proc.m ? *proc.m : scores.m();

  if (s.task == Task::correct_dimension) {
    EstimationConfig config;
    config.method = proc.method;
    config.H = s.H;
    config.m = m;
    config.neyman_offset = proc.neyman_offset;
    config.alpha = s.alpha;
    return estimate_dimension(scores, part, config, &cache).k_hat ==
           true_dimension(s.scenario.model);
  }

  if (proc.method == Method::adaptive_neyman) {
    const int N = std::min(s.k0 + proc.neyman_offset, scores.m());
    const auto crit = cache.get(s.H, s.k0, N, s.alpha);
    return neyman_test(scores, part, n, s.k0, N, s.alpha, *crit).reject;
  }
  if (m > scores.m()) {
    throw RankError("run_table: m = " + std::to_string(m) + " exceeds the usable rank " +
                    std::to_string(scores.m()));
  }
  const ScoreMatrix used{scores.scores.leftCols(m)};
  const SirModel sir = build_sir(used, part);
  return proc.method == Method::chi2 ? chi2_test(sir, n, s.k0, s.alpha).reject
                                     : adjusted_chi2_test(used, part, sir, n, s.k0, s.alpha).reject;
}

int parse_int(std::string_view text, std::string_view key) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError("row field '" + std::string(key) + "' needs an integer, got '" +
                     std::string(text) + "'");
  }
  return value;
}

Scenario parse_row(std::string_view text) {
  Scenario s;
  bool have_model = false;
  bool have_n = false;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto field = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("row field '" + std::string(field) + "' is not key=value");
    }
    const auto key = field.substr(0, eq);
    const auto value = field.substr(eq + 1);
    if (key == "model") {
      s.model = parse_int(value, key);
      have_model = true;
    } else if (key == "dist" || key == "law") {
      s.law = parse_score_law(value);
    } else if (key == "n") {
      s.n = parse_int(value, key);
      have_n = true;
    } else if (key == "p") {
      s.p = parse_int(value, key);
    } else {
      throw ParseError("unknown row field '" + std::string(key) + "'");
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (!have_model || !have_n) throw ParseError("a row needs model= and n=");
  if (s.model < 1 || s.model > 5) throw DomainError("row model must be 1..5");
  if (s.model == 5 && s.p < kModel5SignalDim) throw DomainError("model 5 rows need p >= 10");
  if (s.model != 5 && s.p != 0) throw DomainError("p= applies to model 5 only");
  if (s.model == 5 && s.law != ScoreLaw::gaussian) {
    throw DomainError("model 5 has Gaussian signal only");
  }
  return s;
}

}  // namespace

std::string Procedure::label() const {
  if (method == Method::adaptive_neyman) {
    return "adaptive_neyman(N=k0+" + std::to_string(neyman_offset) + ")";
  }
  return std::string(to_string(method)) + "(m=" + (m ? std::to_string(*m) : "p") + ")";
}

std::uint64_t scenario_key(const Scenario& s) {
  return (static_cast<std::uint64_t>(s.model) << 56) |
         (static_cast<std::uint64_t>(s.law == ScoreLaw::student_t) << 48) |
         (static_cast<std::uint64_t>(s.n) << 20) | static_cast<std::uint64_t>(s.p);
}

std::vector<McReport> run_table(const std::vector<Setting>& settings, const McOptions& options) {
  if (options.replicates < 1) throw DomainError("run_table: replicates must be positive");
  const int workers = resolve_workers(options.workers);
  NeymanCriticalCache cache(options.master_seed, options.critical_replicates, workers);

  std::vector<Scenario> scenarios;
  std::vector<std::size_t> group_of(settings.size());
  for (std::size_t i = 0; i < settings.size(); ++i) {
    const auto it = std::find(scenarios.begin(), scenarios.end(), settings[i].scenario);
    group_of[i] = static_cast<std::size_t>(it - scenarios.begin());
    if (it == scenarios.end()) scenarios.push_back(settings[i].scenario);
  }

  std::vector<int> counts(settings.size(), 0);
  const auto reps = static_cast<std::size_t>(options.replicates);

  for (std::size_t g = 0; g < scenarios.size(); ++g) {
    std::vector<std::size_t> members;
    int needed = 1;
    for (std::size_t i = 0; i < settings.size(); ++i) {
      if (group_of[i] != g) continue;
      members.push_back(i);
      needed = std::max(needed, columns_needed(settings[i]));
    }
    const Scenario scenario = scenarios[g];
    const std::uint64_t key = scenario_key(scenario);
    std::vector<unsigned char> hits(reps * members.size(), 0);

    parallel_for(reps, workers, [&](std::size_t rep) {
      auto engine = substream(options.master_seed, {key, rep});
      const Draw data = draw(scenario, options, engine);
      const EigenSystem eig = eigensystem(data.curves);
      const ScoreMatrix scores =
          pc_scores(data.curves, eig, std::min(needed, eig.usable_rank()));
      std::map<int, SlicePartition> partitions;
      for (std::size_t k = 0; k < members.size(); ++k) {
        const Setting& s = settings[members[k]];
        auto [it, fresh] = partitions.try_emplace(s.H);
        if (fresh) it->second = make_slices(data.y, s.H);
        hits[rep * members.size() + k] = evaluate(s, scores, it->second, cache) ? 1 : 0;
      }
    });

    for (std::size_t rep = 0; rep < reps; ++rep) {
      for (std::size_t k = 0; k < members.size(); ++k) {
        counts[members[k]] += hits[rep * members.size() + k];
      }
    }
  }

  std::vector<McReport> reports;
  reports.reserve(settings.size());
  for (std::size_t i = 0; i < settings.size(); ++i) {
    McReport r;
    r.setting = settings[i];
    r.replicates = options.replicates;
    r.count = counts[i];
    r.frequency = static_cast<double>(r.count) / options.replicates;
    r.monte_carlo_se = std::sqrt(r.frequency * (1.0 - r.frequency) / options.replicates);
    r.seed = options.master_seed;
    r.critical_replicates = options.critical_replicates;
    reports.push_back(r);
  }
  return reports;
}

std::vector<Procedure> table_procedures(int table) {
  switch (table) {
    case 1:
    case 2:
    case 3: {
      std::vector<Procedure> out;
      for (int m : {5, 7, 30}) {
        out.push_back({Method::chi2, m});
        out.push_back({Method::adjusted_chi2, m});
      }
      out.push_back({Method::adaptive_neyman, std::nullopt});
      return out;
    }
    case 4:
    case 5:
      return {{Method::chi2, std::nullopt}, {Method::adaptive_neyman, std::nullopt}};
    default:
      throw DomainError("unknown table " + std::to_string(table) + " (expected 1..5)");
  }
}

std::vector<Scenario> table_rows(int table) {
  std::vector<Scenario> rows;
  switch (table) {
    case 1:
    case 2:
      for (int n : {200, 500}) {
        for (int model : {1, 2, 3}) {
          for (auto law : {ScoreLaw::gaussian, ScoreLaw::student_t}) rows.push_back({model, law, n, 0});
        }
      }
      return rows;
    case 3:
      return {{4, ScoreLaw::gaussian, 200, 0}, {4, ScoreLaw::gaussian, 500, 0}};
    case 4:
    case 5:
      for (int n : {200, 500}) {
        for (int p : {15, 20, 40, 100}) rows.push_back({5, ScoreLaw::gaussian, n, p});
      }
      return rows;
    default:
      throw DomainError("unknown table " + std::to_string(table) + " (expected 1..5)");
  }
}

std::vector<Setting> table_settings(int table, const std::vector<Scenario>& rows) {
  const auto procedures = table_procedures(table);
  std::vector<Setting> out;
  for (const auto& row : rows) {
    if ((table == 3 && row.model != 4) || ((table == 4 || table == 5) && row.model != 5) ||
        ((table == 1 || table == 2) && (row.model < 1 || row.model > 3))) {
      throw DomainError("row model " + std::to_string(row.model) + " does not belong to table " +
                        std::to_string(table));
    }
    for (const auto& proc : procedures) {
      Setting s;
      s.scenario = row;
      s.procedure = proc;
      s.task = (table == 1 || table == 5) ? Task::reject : Task::correct_dimension;
      s.k0 = table == 5 ? 2 : 1;
      s.table = table;
      out.push_back(s);
    }
  }
  return out;
}

std::vector<Scenario> parse_rows(std::string_view text) {
  std::vector<Scenario> rows;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find(';', start);
    if (end == std::string_view::npos) end = text.size();
    const auto piece = text.substr(start, end - start);
    if (!piece.empty()) rows.push_back(parse_row(piece));
    start = end + 1;
  }
  if (rows.empty()) throw ParseError("no rows given");
  return rows;
}

std::vector<ProfileRow> statistic_profile(const ProfileOptions& o) {
  if (o.m_min <= o.k0 || o.m_max < o.m_min) {
    throw DomainError("statistic_profile: need k0 < m_min <= m_max");
  }
  if (o.H <= o.k0 + 1) throw DomainError("statistic_profile: need H > k0 + 1");
  if (o.replicates < 1) throw DomainError("statistic_profile: replicates must be positive");

  const int width = o.m_max - o.m_min + 1;
  const auto reps = static_cast<std::size_t>(o.replicates);
  std::vector<double> plain(reps * width);
  std::vector<double> adjusted(reps * width);
  ProcessSpec proc;
  proc.J = o.J;
  proc.T = o.T;

  parallel_for(reps, resolve_workers(o.workers), [&](std::size_t rep) {
    auto engine = substream(o.seed, {kProfileStream, rep});
    const auto sample = generate_functional(4, proc, o.n, engine);
    const EigenSystem eig = eigensystem(sample.curves);
    const ScoreMatrix scores = pc_scores(sample.curves, eig, o.m_max);
    const SlicePartition part = make_slices(sample.y, o.H);
    const SirModel full = build_sir(scores, part);
    for (int m = o.m_min; m <= o.m_max; ++m) {
      const SirModel sir = full.leading(m);
      const ScoreMatrix used{scores.scores.leftCols(m)};
      const auto slot = rep * width + static_cast<std::size_t>(m - o.m_min);
      plain[slot] = chi2_statistic(sir, o.n, o.k0);
      adjusted[slot] =
          adjusted_chi2_statistic(sir, o.n, o.k0, tau_hat(used, part, sir, o.k0));
    }
  });

  std::vector<ProfileRow> rows;
  for (int m = o.m_min; m <= o.m_max; ++m) {
    ProfileRow row;
    row.m = m;
    double sum_plain = 0.0;
    double sum_adjusted = 0.0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      sum_plain += plain[rep * width + static_cast<std::size_t>(m - o.m_min)];
      sum_adjusted += adjusted[rep * width + static_cast<std::size_t>(m - o.m_min)];
    }
    row.mean_statistic = sum_plain / o.replicates;
    row.mean_adjusted_statistic = sum_adjusted / o.replicates;
    row.reference = static_cast<double>((m - o.k0) * (o.H - o.k0 - 1));
    rows.push_back(row);
  }
  return rows;
}

double trailing_eigen_sum(const Eigen::MatrixXd& z, int r) {
  const Eigen::VectorXd lambda = linalg::symmetric_eigenvalues(z * z.transpose());
  double sum = 0.0;
  for (Eigen::Index j = r; j < lambda.size(); ++j) sum += std::max(lambda(j), 0.0);
  return sum;
}

DominanceReport proposition1_check(int p, int q, int r, int replicates, std::uint64_t seed,
                                   double z1_scale, int workers) {
  if (r < 0 || r >= std::min(p, q)) throw DomainError("proposition1_check: need 0 <= r < min(p, q)");
  if (replicates < 1) throw DomainError("proposition1_check: replicates must be positive");

  DominanceReport report;
  report.p = p;
  report.q = q;
  report.r = r;
  report.replicates = replicates;
  report.seed = seed;
  report.z1_scale = z1_scale;
  report.df = (p - r) * (q - r);

  std::vector<double> values(static_cast<std::size_t>(replicates));
  parallel_for(values.size(), resolve_workers(workers), [&](std::size_t i) {
    auto engine = substream(seed, {i});
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd z(p, q);
    for (int j = 0; j < q; ++j) {
      const double scale = j < r ? z1_scale : 1.0;
      for (int k = 0; k < p; ++k) z(k, j) = scale * normal(engine);
    }
    values[i] = trailing_eigen_sum(z, r);
  });

  report.holds = true;
  for (double level : {0.5, 0.8, 0.9, 0.95, 0.99}) {
    DominanceRow row;
    row.level = level;
    row.threshold = stats::chi2_quantile(level, report.df);
    const auto above = std::count_if(values.begin(), values.end(),
                                     [&](double v) { return v > row.threshold; });
    row.empirical_survival = static_cast<double>(above) / replicates;
    row.bound_survival = 1.0 - level;
    row.tolerance = 3.0 * std::sqrt(level * (1.0 - level) / replicates);
    row.holds = row.empirical_survival <= row.bound_survival + row.tolerance;
    report.holds = report.holds && row.holds;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace edrdim::simlab
