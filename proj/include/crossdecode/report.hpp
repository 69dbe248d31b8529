#pragma once

// CSV reports with a '#'-prefixed metadata header. Numbers are written in
// shortest round-trip form, so summary rows can be recomputed exactly from the
// data rows and reruns with equal inputs produce identical bytes.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crossdecode/eval.hpp"
#include "crossdecode/stats.hpp"
#include "crossdecode/types.hpp"

namespace crossdecode {

inline constexpr std::string_view kReportBanner = "# crossdecode report v1";

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Columns: run_id,mode,fold,accuracy; then AVG and STD rows; confusion matrix as comment lines.
std::string format_eval_report(const EvalReport& report, const RunConfig& config, std::string_view run_id,
                               const Metadata& extra = {});

/// Long format: statistic,group_a,group_b,value.
std::string format_stats_report(const StatsReport& report, const Metadata& extra = {});

struct AccuracyColumn {
  std::string file;
  std::string column;
  std::vector<double> values;
};

/// Reads one numeric column from a report or plain CSV. Lines starting with '#'
/// are skipped, the first remaining line is the header, and rows whose first
/// field is AVG or STD are footers. Without an explicit column the "accuracy"
/// column is used, or the only column if there is just one.
/// Throws IoError if unreadable, and InputError naming file and column for
/// ragged rows or a missing, empty or non-numeric column.
AccuracyColumn read_accuracy_column(const std::filesystem::path& path, std::optional<std::string> column = {});

/// Parses "path[:column]".
std::pair<std::filesystem::path, std::optional<std::string>> parse_group_spec(std::string_view spec);

/// One eval report reduced to (run id, mode, mean accuracy).
struct ReportRow {
  std::string run_id;
  EvalMode mode;
  double accuracy;
};

ReportRow read_eval_summary(const std::filesystem::path& path);

/// Table with one row per run id and one column per mode, plus AVG and STD footers.
std::string format_table(const std::vector<ReportRow>& rows);

/// Writes text to a file, throwing IoError on failure.
void write_text(const std::filesystem::path& path, std::string_view text);

/// Shortest round-trip decimal form.
std::string format_number(double value);

}  // namespace crossdecode
