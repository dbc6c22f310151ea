#pragma once

#include <iosfwd>
#include <vector>

#include <nlohmann/json.hpp>

#include "edrdim/dimtest.hpp"
#include "edrdim/fpca.hpp"
#include "edrdim/simlab.hpp"
#include "edrdim/sir.hpp"

namespace edrdim {

// Field names are part of the external interface: method, k0, statistic, df,
// p_value, reject, k_hat, capped.
nlohmann::json to_json(const TestResult& result);
nlohmann::json to_json(const DimensionEstimate& estimate);
nlohmann::json to_json(const NeymanCriticalTable& table);
/// m, H, g_hat, M_hat (row-major, m rows) and the eigenvalues of V.
nlohmann::json to_json(const SirModel& sir);
nlohmann::json to_json(const simlab::McReport& report);
nlohmann::json to_json(const simlab::ProfileRow& row);
nlohmann::json to_json(const simlab::DominanceReport& report);

void write_trace_csv(std::ostream& out, const DimensionEstimate& estimate);
void write_reports_csv(std::ostream& out, const std::vector<simlab::McReport>& reports);
void write_profile_csv(std::ostream& out, const std::vector<simlab::ProfileRow>& rows);

/// Eigenvalues, eigenfunctions and scores as three CSV files <prefix>_{eigenvalues,eigenfunctions,scores}.csv.
void dump_fpca(const std::string& prefix, const EigenSystem& eig, const ScoreMatrix& scores);

}  // namespace edrdim
