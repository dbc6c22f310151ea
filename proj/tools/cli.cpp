#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#ifdef EDRDIM_CLI11_PACKAGE
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif
#include <nlohmann/json.hpp>

#include "edrdim/dimtest.hpp"
#include "edrdim/error.hpp"
#include "edrdim/fdata.hpp"
#include "edrdim/fpca.hpp"
#include "edrdim/serialize.hpp"
#include "edrdim/simlab.hpp"
#include "edrdim/sir.hpp"
#include "edrdim/version.hpp"

namespace edrdim::cli {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

// Every knob that can change a result. Worker counts are deliberately absent:
// they never change output.
struct RunConfig {
  std::string command;
  std::string method = "adaptive_neyman";
  int H = kDefaultSlices;
  int m = 5;
  std::optional<int> N;
  int neyman_offset = kDefaultNeymanOffset;
  int k0 = 0;
  int K = 1;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  int replicates = 0;
  int critical_replicates = kDefaultCriticalReplicates;
  std::string curves;
  std::string matrix;
  std::string response;
  std::string out;
  std::string format = "json";
  std::string dump_fpca;
  std::string table;
  std::string rows;
  int n = 500;
  int m_min = 4;
  int m_max = 12;
  int p = 3;
  int q = 4;
  int r = 1;
  double z1_scale = 2.0;
  int threads = 0;
};

nlohmann::json provenance(const RunConfig& c) {
  nlohmann::json j;
  j["command"] = c.command;
  j["format"] = c.format;
  const auto& cmd = c.command;
  const bool data_command = cmd == "estimate-dim" || cmd == "test" || cmd == "inspect" ||
                            cmd == "edr-directions";
  if (data_command) {
    j["curves"] = c.curves;
    j["matrix"] = c.matrix;
    j["response"] = c.response;
    j["H"] = c.H;
  }
  if (cmd == "estimate-dim" || cmd == "test") {
    j["method"] = c.method;
    j["alpha"] = c.alpha;
    if (c.method == "adaptive_neyman") {
      j["N"] = c.N ? nlohmann::json(*c.N) : nlohmann::json(nullptr);
      j["neyman_offset"] = c.neyman_offset;
      j["seed"] = c.seed;
      j["critical_replicates"] = c.critical_replicates;
    } else {
      j["m"] = c.m;
    }
    if (cmd == "test") j["k0"] = c.k0;
  }
  if (cmd == "inspect" || cmd == "edr-directions") j["m"] = c.m;
  if (cmd == "edr-directions") j["K"] = c.K;
  if (cmd == "neyman-critical") {
    j["H"] = c.H;
    j["k0"] = c.k0;
    j["N"] = c.N ? *c.N : c.k0 + c.neyman_offset;
    j["alpha"] = c.alpha;
    j["replicates"] = c.critical_replicates;
    j["seed"] = c.seed;
  }
  if (cmd == "simulate-table") {
    j["table"] = c.table;
    j["seed"] = c.seed;
    j["replicates"] = c.replicates;
    if (c.table == "fig2") {
      j["n"] = c.n;
      j["k0"] = c.k0;
      j["H"] = c.H;
      j["m_min"] = c.m_min;
      j["m_max"] = c.m_max;
    } else if (c.table == "prop1") {
      j["p"] = c.p;
      j["q"] = c.q;
      j["r"] = c.r;
      j["z1_scale"] = c.z1_scale;
    } else {
      j["rows"] = c.rows;
      j["critical_replicates"] = c.critical_replicates;
    }
  }
  if (!c.dump_fpca.empty()) j["dump_fpca"] = c.dump_fpca;
  return j;
}

std::string json_document(const RunConfig& c, nlohmann::json result) {
  nlohmann::json doc;
  doc["version"] = kVersion;
  doc["config"] = provenance(c);
  doc["result"] = std::move(result);
  return doc.dump(2) + "\n";
}

std::string csv_preamble(const RunConfig& c) {
  return std::string("# edrdim ") + kVersion + "\n# config " + provenance(c).dump() + "\n";
}

void emit(const RunConfig& c, const std::string& text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(c.out, std::ios::binary);
  if (!file) throw ParseError("cannot write " + c.out);
  file << text;
}

std::string number(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

struct Data {
  CurveSet curves;
  ResponseVector y;
};

Data load(const RunConfig& c) {
  if (c.curves.empty() == c.matrix.empty()) {
    throw ValidationError("give exactly one of --curves or --matrix");
  }
  if (c.response.empty()) throw ValidationError("--response is required");
  if (!c.curves.empty()) {
    auto [curves, y] = load_curves(c.curves, c.response);
    return {std::move(curves), std::move(y)};
  }
  auto x = load_multivariate(c.matrix);
  auto y = load_response(c.response);
  if (y.size() != x.size()) {
    throw ShapeError("matrix has " + std::to_string(x.size()) + " rows but response has " +
                     std::to_string(y.size()));
  }
  return {x.as_curves(), std::move(y)};
}

EstimationConfig estimation_config(const RunConfig& c) {
  EstimationConfig config;
  config.method = parse_method(c.method);
  config.H = c.H;
  config.m = c.m;
  config.N = c.N;
  config.neyman_offset = c.neyman_offset;
  config.alpha = c.alpha;
  config.seed = c.seed;
  config.critical_replicates = c.critical_replicates;
  config.workers = c.threads;
  return config;
}

void check_format(const RunConfig& c) {
  if (c.format != "json" && c.format != "csv") {
    throw ValidationError("--format must be json or csv");
  }
}

// Scores wide enough for `config`, plus the slices.
struct Prepared {
  EigenSystem eig;
  ScoreMatrix scores;
  SlicePartition part;
};

// columns < 0 asks for every usable component, up to -columns.
Prepared prepare(const RunConfig& c, const Data& data, int columns) {
  EigenSystem eig = eigensystem(data.curves);
  if (columns < 0) columns = std::min(-columns, eig.usable_rank());
  if (columns > eig.usable_rank()) {
    throw RankError("requested " + std::to_string(columns) +
                    " components but the usable rank is " + std::to_string(eig.usable_rank()));
  }
  ScoreMatrix scores = pc_scores(data.curves, eig, columns);
  SlicePartition part = make_slices(data.y, c.H);
  if (!c.dump_fpca.empty()) dump_fpca(c.dump_fpca, eig, scores);
  return {std::move(eig), std::move(scores), std::move(part)};
}

void run_estimate(const RunConfig& c, std::ostream& out) {
  const Data data = load(c);
  const EstimationConfig config = estimation_config(c);
  const int columns =
      config.method == Method::adaptive_neyman ? -required_components(config) : config.m;
  const Prepared prep = prepare(c, data, columns);
  const DimensionEstimate estimate = estimate_dimension(prep.scores, prep.part, config);
  if (c.format == "json") {
    emit(c, json_document(c, to_json(estimate)), out);
  } else {
    std::ostringstream csv;
    csv << csv_preamble(c);
    write_trace_csv(csv, estimate);
    emit(c, csv.str(), out);
  }
}

void run_test(const RunConfig& c, std::ostream& out) {
  const Data data = load(c);
  const Method method = parse_method(c.method);
  TestResult result;
  if (method == Method::adaptive_neyman) {
    const int N = c.N ? *c.N : c.k0 + c.neyman_offset;
    const Prepared prep = prepare(c, data, N);
    const auto crit =
        simulate_neyman_critical(c.H, c.k0, N, c.alpha, c.critical_replicates, c.seed, c.threads);
    result = neyman_test(prep.scores, prep.part, prep.scores.size(), c.k0, N, c.alpha, crit);
  } else {
    const Prepared prep = prepare(c, data, c.m);
    const SirModel sir = build_sir(prep.scores, prep.part);
    const int n = prep.scores.size();
    result = method == Method::chi2
                 ? chi2_test(sir, n, c.k0, c.alpha)
                 : adjusted_chi2_test(prep.scores, prep.part, sir, n, c.k0, c.alpha);
  }
  if (c.format == "json") {
    emit(c, json_document(c, to_json(result)), out);
  } else {
    DimensionEstimate single;
    single.k_hat = result.reject ? c.k0 + 1 : c.k0;
    single.trace.push_back(result);
    std::ostringstream csv;
    csv << csv_preamble(c);
    write_trace_csv(csv, single);
    emit(c, csv.str(), out);
  }
}

void run_neyman_critical(const RunConfig& c, std::ostream& out) {
  const int N = c.N ? *c.N : c.k0 + c.neyman_offset;
  const auto table =
      simulate_neyman_critical(c.H, c.k0, N, c.alpha, c.critical_replicates, c.seed, c.threads);
  if (c.format == "json") {
    emit(c, json_document(c, to_json(table)), out);
  } else {
    std::ostringstream csv;
    csv << csv_preamble(c) << "H,k0,N,alpha,replicates,seed,u_alpha\n"
        << table.H << ',' << table.k0 << ',' << table.N << ',' << number(table.alpha) << ','
        << table.replicates << ',' << table.seed << ',' << number(table.u_alpha) << '\n';
    emit(c, csv.str(), out);
  }
}

void run_simulate(const RunConfig& c, std::ostream& out) {
  if (c.table == "fig2") {
    simlab::ProfileOptions o;
    o.n = c.n;
    o.k0 = c.k0;
    o.m_min = c.m_min;
    o.m_max = c.m_max;
    o.H = c.H;
    o.replicates = c.replicates;
    o.seed = c.seed;
    o.workers = c.threads;
    const auto rows = simlab::statistic_profile(o);
    if (c.format == "json") {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& row : rows) arr.push_back(to_json(row));
      emit(c, json_document(c, std::move(arr)), out);
    } else {
      std::ostringstream csv;
      csv << csv_preamble(c);
      write_profile_csv(csv, rows);
      emit(c, csv.str(), out);
    }
    return;
  }
  if (c.table == "prop1") {
    const auto report =
        simlab::proposition1_check(c.p, c.q, c.r, c.replicates, c.seed, c.z1_scale, c.threads);
    if (c.format == "json") {
      emit(c, json_document(c, to_json(report)), out);
    } else {
      std::ostringstream csv;
      csv << csv_preamble(c)
          << "level,threshold,empirical_survival,bound_survival,tolerance,holds\n";
      for (const auto& row : report.rows) {
        csv << number(row.level) << ',' << number(row.threshold) << ','
            << number(row.empirical_survival) << ',' << number(row.bound_survival) << ','
            << number(row.tolerance) << ',' << (row.holds ? "true" : "false") << '\n';
      }
      emit(c, csv.str(), out);
    }
    return;
  }

  int table = 0;
  const auto [ptr, ec] = std::from_chars(c.table.data(), c.table.data() + c.table.size(), table);
  if (ec != std::errc{} || ptr != c.table.data() + c.table.size()) {
    throw ValidationError("--table must be 1..5, fig2 or prop1");
  }
  const auto rows = c.rows.empty() ? simlab::table_rows(table) : simlab::parse_rows(c.rows);
  simlab::McOptions options;
  options.replicates = c.replicates;
  options.master_seed = c.seed;
  options.workers = c.threads;
  options.critical_replicates = c.critical_replicates;
  const auto reports = simlab::run_table(simlab::table_settings(table, rows), options);
  if (c.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    emit(c, json_document(c, std::move(arr)), out);
  } else {
    std::ostringstream csv;
    csv << csv_preamble(c);
    write_reports_csv(csv, reports);
    emit(c, csv.str(), out);
  }
}

void run_directions(const RunConfig& c, std::ostream& out) {
  const Data data = load(c);
  const Prepared prep = prepare(c, data, c.m);
  const SirModel sir = build_sir(prep.scores, prep.part);
  const Eigen::MatrixXd directions = estimate_edr_directions(sir, prep.eig, c.K);
  const Eigen::VectorXd& t = data.curves.grid().points();
  if (c.format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index k = 0; k < directions.rows(); ++k) {
      rows.push_back(std::vector<double>(directions.row(k).begin(), directions.row(k).end()));
    }
    nlohmann::json result{{"grid", std::vector<double>(t.data(), t.data() + t.size())},
                          {"directions", std::move(rows)}};
    emit(c, json_document(c, std::move(result)), out);
  } else {
    std::ostringstream csv;
    csv << csv_preamble(c);
    for (Eigen::Index i = 0; i < t.size(); ++i) csv << (i ? "," : "") << number(t[i]);
    csv << '\n';
    for (Eigen::Index k = 0; k < directions.rows(); ++k) {
      for (Eigen::Index i = 0; i < directions.cols(); ++i) {
        csv << (i ? "," : "") << number(directions(k, i));
      }
      csv << '\n';
    }
    emit(c, csv.str(), out);
  }
}

void run_inspect(const RunConfig& c, std::ostream& out) {
  const Data data = load(c);
  const Prepared prep = prepare(c, data, c.m);
  const SirModel sir = build_sir(prep.scores, prep.part);
  nlohmann::json result = to_json(sir);
  const Eigen::VectorXd& omega = prep.eig.eigenvalues;
  result["fpca_eigenvalues"] = std::vector<double>(omega.data(), omega.data() + c.m);
  result["slice_counts"] = prep.part.counts;
  if (c.format != "json") throw ValidationError("inspect only writes json");
  emit(c, json_document(c, std::move(result)), out);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  int n_fixed = 0;
  CLI::App app{"Estimate the dimension of the effective dimension reduction space", "edrdim"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", c.format, "Output format: json or csv")->capture_default_str();
    sub->add_option("--out", c.out, "Write output to this path instead of stdout");
    sub->add_option("--threads", c.threads, "Worker threads (0 = all; EDRDIM_THREADS caps)");
  };
  auto add_data = [&](CLI::App* sub) {
    sub->add_option("--curves", c.curves, "Curve CSV: header of grid times, one curve per row");
    sub->add_option("--matrix", c.matrix, "Multivariate CSV without header");
    sub->add_option("--response", c.response, "Response file, one value per line");
    sub->add_option("--H", c.H, "Number of slices")->capture_default_str();
    sub->add_option("--dump-fpca", c.dump_fpca,
                    "Write <prefix>_eigenvalues/_eigenfunctions/_scores.csv");
  };
  auto add_method = [&](CLI::App* sub) {
    sub->add_option("--method", c.method, "chi2, adjusted_chi2 or neyman")->capture_default_str();
    sub->add_option("--m", c.m, "Truncation for the chi-squared tests")->capture_default_str();
    sub->add_option("--N", n_fixed, "Fixed Neyman truncation (default k0 + 30)");
    sub->add_option("--alpha", c.alpha, "Nominal level")->capture_default_str();
    sub->add_option("--seed", c.seed, "Seed for simulated critical values")->capture_default_str();
    sub->add_option("--reps", c.critical_replicates, "Critical value replicates")
        ->capture_default_str();
  };

  auto* estimate = app.add_subcommand("estimate-dim", "Sequential estimate of the dimension K");
  add_common(estimate);
  add_data(estimate);
  add_method(estimate);

  auto* test = app.add_subcommand("test", "Single test of H0: K <= k0");
  add_common(test);
  add_data(test);
  add_method(test);
  test->add_option("--k0", c.k0, "Null dimension")->required();

  auto* critical = app.add_subcommand("neyman-critical", "Simulate the adaptive Neyman critical value");
  add_common(critical);
  critical->add_option("--H", c.H, "Number of slices")->capture_default_str();
  critical->add_option("--k0", c.k0, "Null dimension")->capture_default_str();
  critical->add_option("--N", n_fixed, "Largest truncation (default k0 + 30)");
  critical->add_option("--alpha", c.alpha, "Level")->capture_default_str();
  critical->add_option("--reps", c.critical_replicates, "Replicates")->capture_default_str();
  critical->add_option("--seed", c.seed, "Seed")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate-table", "Monte Carlo tables, profile and bound check");
  add_common(simulate);
  simulate->add_option("--table", c.table, "1..5, fig2 or prop1")->required();
  simulate->add_option("--rows", c.rows, "Rows like \"model=1,dist=normal,n=200\", ';'-separated");
  simulate->add_option("--reps", c.replicates, "Monte Carlo replicates");
  simulate->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  simulate->add_option("--critical-reps", c.critical_replicates, "Neyman critical replicates")
      ->capture_default_str();
  simulate->add_option("--n", c.n, "Sample size (fig2)")->capture_default_str();
  simulate->add_option("--k0", c.k0, "Null dimension (fig2, default 2)");
  simulate->add_option("--H", c.H, "Number of slices (fig2)")->capture_default_str();
  simulate->add_option("--m-min", c.m_min, "Smallest m (fig2)")->capture_default_str();
  simulate->add_option("--m-max", c.m_max, "Largest m (fig2)")->capture_default_str();
  simulate->add_option("--p", c.p, "Rows of Z (prop1)")->capture_default_str();
  simulate->add_option("--q", c.q, "Columns of Z (prop1)")->capture_default_str();
  simulate->add_option("--r", c.r, "Columns in the non-Gaussian block (prop1)")
      ->capture_default_str();
  simulate->add_option("--z1-scale", c.z1_scale, "Scale of the first block (prop1)")
      ->capture_default_str();

  auto* directions = app.add_subcommand("edr-directions", "Estimated EDR direction curves");
  add_common(directions);
  add_data(directions);
  directions->add_option("--K", c.K, "Number of directions")->required();
  directions->add_option("--m", c.m, "Truncation")->capture_default_str();

  auto* inspect = app.add_subcommand("inspect", "Dump the SIR model as JSON");
  add_common(inspect);
  add_data(inspect);
  inspect->add_option("--m", c.m, "Truncation")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n" << app.help();
    return kExitValidation;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    c.command = sub->get_name();
    if (const auto* opt = sub->get_option_no_throw("--N"); opt && opt->count() > 0) c.N = n_fixed;
    check_format(c);
    if (c.command == "estimate-dim" || c.command == "test") c.method = std::string(to_string(parse_method(c.method)));
    if (c.command == "simulate-table") {
      if (sub->count("--reps") == 0) c.replicates = c.table == "prop1" ? 100'000 : 1000;
      if (c.table == "fig2" && sub->count("--k0") == 0) c.k0 = 2;
    }

    if (c.command == "estimate-dim") run_estimate(c, out);
    else if (c.command == "test") run_test(c, out);
    else if (c.command == "neyman-critical") run_neyman_critical(c, out);
    else if (c.command == "simulate-table") run_simulate(c, out);
    else if (c.command == "edr-directions") run_directions(c, out);
    else run_inspect(c, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace edrdim::cli
