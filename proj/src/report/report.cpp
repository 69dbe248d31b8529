#include "crossdecode/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "crossdecode/errors.hpp"

namespace crossdecode {
namespace {

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

void check_field(std::string_view value, std::string_view what) {
  if (value.find_first_of(",\n\r") != std::string_view::npos)
    throw ConfigError(fmt::format("{} '{}' must not contain commas or line breaks", what, value));
}

void append_metadata(std::string& out, const Metadata& meta) {
  for (const auto& [key, value] : meta) {
    check_field(value, key);
    out += fmt::format("# {}: {}\n", key, value);
  }
}

struct CsvFile {
  Metadata meta;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> row_lines;
};

CsvFile read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open {} for reading", path.string()));
  CsvFile csv;
  std::string line;
  int line_no = 0;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::uint64_t line_offset = offset;
    offset += line.size() + 1;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      const auto colon = view.find(':');
      if (colon != std::string_view::npos)
        csv.meta.emplace_back(std::string(trim(view.substr(1, colon - 1))), std::string(trim(view.substr(colon + 1))));
      continue;
    }
    auto fields = split(view, ',');
    for (auto& f : fields) f = std::string(trim(f));
    if (csv.header.empty()) {
      csv.header = std::move(fields);
      continue;
    }
    if (fields.size() != csv.header.size())
      throw InputError(fmt::format("{} line {} (byte {}): ragged row with {} fields, header has {}", path.string(),
                                   line_no, line_offset, fields.size(), csv.header.size()));
    csv.rows.push_back(std::move(fields));
    csv.row_lines.push_back(line_no);
  }
  if (in.bad()) throw IoError(fmt::format("read from {} failed", path.string()));
  if (csv.header.empty()) throw InputError(fmt::format("{}: no header row", path.string()));
  return csv;
}

bool is_footer(const std::vector<std::string>& row) {
  return !row.empty() && (row.front() == "AVG" || row.front() == "STD");
}

std::string meta_value(const CsvFile& csv, std::string_view key, const std::filesystem::path& path) {
  for (const auto& [k, v] : csv.meta)
    if (k == key) return v;
  throw InputError(fmt::format("{}: missing '# {}:' header line", path.string(), key));
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string format_eval_report(const EvalReport& report, const RunConfig& config, std::string_view run_id,
                               const Metadata& extra) {
  check_field(run_id, "run id");
  const std::string_view mode = mode_name(report.mode);
  std::string out(kReportBanner);
  out += '\n';
  append_metadata(out, {{"kind", "eval"},
                        {"mode", std::string(mode)},
                        {"run_id", std::string(run_id)},
                        {"source_paradigm", report.source_paradigm},
                        {"target_paradigm", report.target_paradigm},
                        {"seed", std::to_string(report.seed)},
                        {"config", config.canonical()},
                        {"config_hash", fmt::format("{:016x}", config.hash())},
                        {"evaluated_trials", std::to_string(report.evaluated_trials())},
                        {"pooled_accuracy", format_number(report.pooled_accuracy())}});
  append_metadata(out, extra);
  out += "run_id,mode,fold,accuracy\n";
  for (std::size_t i = 0; i < report.accuracies.size(); ++i)
    out += fmt::format("{},{},{},{}\n", run_id, mode, i, format_number(report.accuracies[i]));
  out += fmt::format("AVG,{},,{}\n", mode, format_number(report.mean));
  out += fmt::format("STD,{},,{}\n", mode, format_number(report.std));
  out += "# confusion: rows are true classes, columns predicted classes\n";
  for (Eigen::Index r = 0; r < report.confusion.rows(); ++r) {
    out += fmt::format("# confusion_row_{}:", r);
    for (Eigen::Index c = 0; c < report.confusion.cols(); ++c) out += fmt::format("{}{}", c == 0 ? " " : ",", report.confusion(r, c));
    out += '\n';
  }
  return out;
}

std::string format_stats_report(const StatsReport& report, const Metadata& extra) {
  std::string out(kReportBanner);
  out += '\n';
  append_metadata(out, {{"kind", "stats"},
                        {"bootstrap_resamples", std::to_string(report.resamples)},
                        {"seed", std::to_string(report.seed)},
                        {"alpha", format_number(report.alpha)}});
  append_metadata(out, extra);
  out += "statistic,group_a,group_b,value\n";
  out += fmt::format("H,,,{}\n", format_number(report.kw.h));
  out += fmt::format("df,,,{}\n", report.kw.df);
  out += fmt::format("p,,,{}\n", format_number(report.kw.p));
  out += fmt::format("significant,,,{}\n", report.kw.p < report.alpha ? 1 : 0);
  for (const auto& g : report.groups) {
    check_field(g.name, "group name");
    out += fmt::format("n,{},,{}\n", g.name, g.n);
    out += fmt::format("mean,{},,{}\n", g.name, format_number(g.summary.mean));
    out += fmt::format("std,{},,{}\n", g.name, format_number(g.summary.std));
  }
  for (std::size_t i = 0; i < report.groups.size(); ++i) {
    for (std::size_t j = i + 1; j < report.groups.size(); ++j) {
      const double p = report.pairwise_p[i][j];
      const std::string value = p < 0.0 ? "NA" : format_number(p);
      out += fmt::format("bootstrap_p,{},{},{}\n", report.groups[i].name, report.groups[j].name, value);
    }
  }
  return out;
}

std::pair<std::filesystem::path, std::optional<std::string>> parse_group_spec(std::string_view spec) {
  const auto colon = spec.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == spec.size())
    return {std::filesystem::path(std::string(spec)), std::nullopt};
  return {std::filesystem::path(std::string(spec.substr(0, colon))), std::string(spec.substr(colon + 1))};
}

AccuracyColumn read_accuracy_column(const std::filesystem::path& path, std::optional<std::string> column) {
  const CsvFile csv = read_csv(path);
  std::string name;
  if (column) {
    name = *column;
  } else if (std::find(csv.header.begin(), csv.header.end(), "accuracy") != csv.header.end()) {
    name = "accuracy";
  } else if (csv.header.size() == 1) {
    name = csv.header.front();
  } else {
    throw InputError(fmt::format("{}: no 'accuracy' column and {} columns to choose from; use {}:COLUMN",
                                 path.string(), csv.header.size(), path.string()));
  }
  const auto it = std::find(csv.header.begin(), csv.header.end(), name);
  if (it == csv.header.end()) throw InputError(fmt::format("{}: column '{}' not found", path.string(), name));
  const auto col = static_cast<std::size_t>(it - csv.header.begin());

  AccuracyColumn out{path.string(), name, {}};
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    if (is_footer(row)) continue;
    const auto v = parse_number(row[col]);
    if (!v || !std::isfinite(*v))
      throw InputError(fmt::format("{} column '{}' line {}: '{}' is not a finite number", path.string(), name,
                                   csv.row_lines[r], row[col]));
    out.values.push_back(*v);
  }
  if (out.values.empty()) throw InputError(fmt::format("{} column '{}' is empty", path.string(), name));
  return out;
}

ReportRow read_eval_summary(const std::filesystem::path& path) {
  const CsvFile csv = read_csv(path);
  if (meta_value(csv, "kind", path) != "eval")
    throw InputError(fmt::format("{}: not an eval report", path.string()));
  const EvalMode mode = parse_mode(meta_value(csv, "mode", path));
  const std::string run_id = meta_value(csv, "run_id", path);
  const auto acc_col = std::find(csv.header.begin(), csv.header.end(), "accuracy");
  if (acc_col == csv.header.end()) throw InputError(fmt::format("{}: no 'accuracy' column", path.string()));
  const auto col = static_cast<std::size_t>(acc_col - csv.header.begin());
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    if (csv.rows[r].front() != "AVG") continue;
    const auto v = parse_number(csv.rows[r][col]);
    if (!v) throw InputError(fmt::format("{} line {}: AVG value is not a number", path.string(), csv.row_lines[r]));
    return {run_id, mode, *v};
  }
  throw InputError(fmt::format("{}: no AVG row", path.string()));
}

std::string format_table(const std::vector<ReportRow>& rows) {
  const std::vector<EvalMode> all_modes{EvalMode::cv, EvalMode::transfer_full, EvalMode::transfer_few};
  std::vector<EvalMode> modes;
  for (EvalMode m : all_modes)
    if (std::any_of(rows.begin(), rows.end(), [&](const ReportRow& r) { return r.mode == m; })) modes.push_back(m);

  std::vector<std::string> run_ids;
  std::map<std::pair<std::string, EvalMode>, double> cells;
  for (const auto& r : rows) {
    check_field(r.run_id, "run id");
    if (std::find(run_ids.begin(), run_ids.end(), r.run_id) == run_ids.end()) run_ids.push_back(r.run_id);
    if (!cells.emplace(std::make_pair(r.run_id, r.mode), r.accuracy).second)
      throw InputError(fmt::format("duplicate report for run '{}' mode '{}'", r.run_id, mode_name(r.mode)));
  }

  std::string out(kReportBanner);
  out += "\n# kind: table\nrun_id";
  for (EvalMode m : modes) out += fmt::format(",{}", mode_name(m));
  out += '\n';
  for (const auto& id : run_ids) {
    out += id;
    for (EvalMode m : modes) {
      const auto it = cells.find({id, m});
      out += ',';
      if (it != cells.end()) out += format_number(it->second);
    }
    out += '\n';
  }
  for (const bool is_std : {false, true}) {
    out += is_std ? "STD" : "AVG";
    for (EvalMode m : modes) {
      std::vector<double> column;
      for (const auto& id : run_ids)
        if (const auto it = cells.find({id, m}); it != cells.end()) column.push_back(it->second);
      out += ',';
      if (column.size() >= 2) {
        const Summary s = summarize(column);
        out += format_number(is_std ? s.std : s.mean);
      }
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open {} for writing", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError(fmt::format("write to {} failed", path.string()));
}

}  // namespace crossdecode
