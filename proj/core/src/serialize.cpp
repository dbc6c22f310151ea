#include "edrdim/serialize.hpp"

#include <charconv>
#include <fstream>
#include <ostream>

#include "edrdim/error.hpp"
#include "edrdim/linalg.hpp"

namespace edrdim {
namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, ptr - buf);
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      put(out, m(i, j));
    }
    out << '\n';
  }
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

nlohmann::json to_json(const TestResult& r) {
  nlohmann::json j;
  j["method"] = std::string(to_string(r.method));
  j["k0"] = r.k0;
  j[r.method == Method::adaptive_neyman ? "N" : "m"] = r.truncation;
  j["statistic"] = r.statistic;
  j["df"] = r.df ? nlohmann::json(*r.df) : nlohmann::json(nullptr);
  if (r.critical_value) j["critical_value"] = *r.critical_value;
  if (r.argmax_m) j["argmax_m"] = *r.argmax_m;
  j["alpha"] = r.alpha;
  j["p_value"] = r.p_value;
  j["reject"] = r.reject;
  return j;
}

nlohmann::json to_json(const DimensionEstimate& e) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& r : e.trace) trace.push_back(to_json(r));
  return {{"k_hat", e.k_hat}, {"capped", e.capped}, {"trace", std::move(trace)}};
}

nlohmann::json to_json(const NeymanCriticalTable& t) {
  return {{"H", t.H},           {"k0", t.k0},
          {"N", t.N},           {"alpha", t.alpha},
          {"replicates", t.replicates}, {"seed", t.seed},
          {"u_alpha", t.u_alpha}};
}

nlohmann::json to_json(const SirModel& sir) {
  nlohmann::json means = nlohmann::json::array();
  for (Eigen::Index i = 0; i < sir.slice_means.rows(); ++i) {
    means.push_back(to_vector(sir.slice_means.row(i).transpose()));
  }
  return {{"m", sir.m},
          {"H", sir.H},
          {"g_hat", to_vector(sir.root_proportions)},
          {"M_hat", std::move(means)},
          {"eigenvalues", to_vector(linalg::symmetric_eigenvalues(sir.covariance))}};
}

nlohmann::json to_json(const simlab::McReport& r) {
  const auto& s = r.setting;
  return {{"table", s.table},
          {"model", s.scenario.model},
          {"dist", std::string(simlab::to_string(s.scenario.law))},
          {"n", s.scenario.n},
          {"p", s.scenario.p},
          {"task", s.task == simlab::Task::reject ? "reject" : "correct_dimension"},
          {"k0", s.k0},
          {"H", s.H},
          {"alpha", s.alpha},
          {"procedure", s.procedure.label()},
          {"replicates", r.replicates},
          {"count", r.count},
          {"frequency", r.frequency},
          {"se", r.monte_carlo_se},
          {"seed", r.seed},
          {"critical_replicates", r.critical_replicates}};
}

nlohmann::json to_json(const simlab::ProfileRow& row) {
  return {{"m", row.m},
          {"mean_T", row.mean_statistic},
          {"mean_T_adjusted", row.mean_adjusted_statistic},
          {"reference", row.reference}};
}

nlohmann::json to_json(const simlab::DominanceReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"level", row.level},
                    {"threshold", row.threshold},
                    {"empirical_survival", row.empirical_survival},
                    {"bound_survival", row.bound_survival},
                    {"tolerance", row.tolerance},
                    {"holds", row.holds}});
  }
  return {{"p", r.p},   {"q", r.q},   {"r", r.r},       {"replicates", r.replicates},
          {"seed", r.seed}, {"z1_scale", r.z1_scale}, {"df", r.df}, {"rows", std::move(rows)},
          {"holds", r.holds}};
}

void write_trace_csv(std::ostream& out, const DimensionEstimate& e) {
  out << "method,k0,truncation,statistic,df,critical_value,p_value,reject,k_hat,capped\n";
  for (const auto& r : e.trace) {
    out << to_string(r.method) << ',' << r.k0 << ',' << r.truncation << ',';
    put(out, r.statistic);
    out << ',';
    if (r.df) out << *r.df;
    out << ',';
    if (r.critical_value) put(out, *r.critical_value);
    out << ',';
    put(out, r.p_value);
    out << ',' << (r.reject ? "true" : "false") << ',' << e.k_hat << ','
        << (e.capped ? "true" : "false") << '\n';
  }
}

void write_reports_csv(std::ostream& out, const std::vector<simlab::McReport>& reports) {
  out << "table,model,dist,n,p,task,k0,H,alpha,procedure,replicates,count,frequency,se,seed\n";
  for (const auto& r : reports) {
    const auto& s = r.setting;
    out << s.table << ',' << s.scenario.model << ',' << simlab::to_string(s.scenario.law) << ','
        << s.scenario.n << ',' << s.scenario.p << ','
        << (s.task == simlab::Task::reject ? "reject" : "correct_dimension") << ',' << s.k0 << ','
        << s.H << ',';
    put(out, s.alpha);
    out << ',' << s.procedure.label() << ',' << r.replicates << ',' << r.count << ',';
    put(out, r.frequency);
    out << ',';
    put(out, r.monte_carlo_se);
    out << ',' << r.seed << '\n';
  }
}

void write_profile_csv(std::ostream& out, const std::vector<simlab::ProfileRow>& rows) {
  out << "m,mean_T,mean_T_adjusted,reference\n";
  for (const auto& row : rows) {
    out << row.m << ',';
    put(out, row.mean_statistic);
    out << ',';
    put(out, row.mean_adjusted_statistic);
    out << ',';
    put(out, row.reference);
    out << '\n';
  }
}

void dump_fpca(const std::string& prefix, const EigenSystem& eig, const ScoreMatrix& scores) {
  write_matrix_csv(prefix + "_eigenvalues.csv", eig.eigenvalues);
  write_matrix_csv(prefix + "_eigenfunctions.csv", eig.eigenfunctions);
  write_matrix_csv(prefix + "_scores.csv", scores.scores);
}

}  // namespace edrdim
