#pragma once

// File formats: trial CSV, behavior / model / certificate JSON, and the
// figure-data CSV tables.

#include "shadowcert/behaviors.hpp"
#include "shadowcert/finitedata.hpp"
#include "shadowcert/frontier.hpp"
#include "shadowcert/npa.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace shadowcert {

const char* version();

inline constexpr const char* kCertificateAssumptions = "iid,uniform-settings";

/// 9 significant digits, the CSV number format.
std::string format_number(double v);

// ---------------------------------------------------------------------------
// Generic CSV

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws `ParseError` when absent.
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

/// Comma-separated, no quoting. Blank lines are skipped; every row must
/// have as many fields as the header.
CsvTable read_csv(std::istream& in);
void write_csv(std::ostream& out, const CsvTable& table);

// ---------------------------------------------------------------------------
// Trials

void write_trials_csv(std::ostream& out, const TrialBatch& batch);
/// Header `x,y,a,b`; throws `ParseError` on malformed rows.
TrialBatch read_trials_csv(std::istream& in);

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const Behavior& p);
Behavior behavior_from_json(const nlohmann::json& j);

/// {"weights": [...], "responses": [party][lambda][input][output]}
nlohmann::json to_json(const LhvModel& m);
LhvModel lhv_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FiniteDataCertificate& c);
nlohmann::json to_json(const CertificateRecord<double>& c);

/// Variables, entry map and constraint blocks of a moment problem.
nlohmann::json problem_dump(const MomentProblem& p);

// ---------------------------------------------------------------------------
// Figure tables

CsvTable frontier_table(const std::vector<CertificateRecord<double>>& rows);
CsvTable werner_table(const std::vector<WernerRecord<double>>& rows);

/// Columns alpha,s,primal,dual,gap,max_residual,min_eig,status,certified.
CsvTable scan_table(const std::vector<ScanRow>& rows);

struct ScanCsvRow {
  double alpha, s, primal, dual, gap, max_residual, min_eig;
  std::string status;
  bool certified;
};
std::vector<ScanCsvRow> parse_scan_table(const CsvTable& t);

}  // namespace shadowcert
