#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "expsel/diagnostics.hpp"
#include "expsel/estimators.hpp"
#include "expsel/selection.hpp"
#include "expsel/simulation.hpp"
#include "expsel/tau_estimation.hpp"

namespace expsel {

inline constexpr int kSchemaVersion = 1;

enum class ReportFormat { csv, json };

std::string_view to_string(ReportFormat f);
ReportFormat report_format_from_string(std::string_view s);

/// Shortest decimal string that parses back to the same double; "inf",
/// "-inf" and "nan" for non-finite values.
std::string format_double(double v);
/// Inverse of format_double. Throws ParseError on malformed input.
double parse_double(std::string_view s);

/// Rendered reports. CSV: one row per subset (selection), per replication
/// and method (simulation), or per coefficient (fit); a single row for tau
/// estimates and diagnostics. JSON: an object mirroring the structure, with
/// "schema_version" and "kind" at the top level.
std::string render(const SelectionReport& r, ReportFormat f);
std::string render(const ReplicationSummary& r, ReportFormat f);
std::string render(const TauEstimate& t, ReportFormat f);
std::string render(const Diagnostics& d, ReportFormat f);
/// `names` label the data columns (intercept row first when present).
std::string render(const FitResult& fit, const std::vector<std::string>& names, ReportFormat f);

/// Mean metrics per method, one CSV row each.
std::string render_summary_table(const ReplicationSummary& r);

/// Writes `text` to `path`, or to stdout when path is empty or "-".
/// Throws IoError.
void write_text(const std::string& path, std::string_view text);

template <class Report>
void write_report(const Report& r, ReportFormat f, const std::string& path) {
  write_text(path, render(r, f));
}

SelectionReport selection_from_json(std::string_view text);
ReplicationSummary summary_from_json(std::string_view text);
TauEstimate tau_from_json(std::string_view text);
Diagnostics diagnostics_from_json(std::string_view text);
FitResult fit_from_json(std::string_view text);

/// One parsed row of a selection CSV.
struct SelectionRow {
  ModelSubset subset;
  /// "ok" or "skipped".
  std::string status;
  std::optional<double> score;
  bool chosen = false;
  bool tie = false;
  std::optional<double> intercept;
  /// Coefficients on subset.columns().
  Vector beta;
  std::string reason;
};

std::vector<SelectionRow> selection_rows_from_csv(std::string_view text, std::size_t p);
std::vector<ReplicationRecord> records_from_csv(std::string_view text, std::size_t p);

}  // namespace expsel
