#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "crossdecode/errors.hpp"
#include "crossdecode/report.hpp"
#include "crossdecode/stats.hpp"
#include "support.hpp"

namespace cd = crossdecode;
using cd::testing::TempDir;

namespace {

cd::EvalReport sample_report(cd::EvalMode mode = cd::EvalMode::cv) {
  cd::EvalReport r;
  r.mode = mode;
  r.accuracies = {40.0, 60.0, 50.0, 100.0 / 3.0};
  r.mean = std::accumulate(r.accuracies.begin(), r.accuracies.end(), 0.0) / 4.0;
  r.std = cd::summarize(r.accuracies).std;
  r.confusion = Eigen::MatrixXi::Zero(2, 2);
  r.confusion << 5, 3, 2, 4;
  r.seed = 17;
  r.source_paradigm = "imagined";
  r.target_paradigm = "imagined";
  return r;
}

void write_file(const std::filesystem::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

TEST(Report, NumbersRoundTripExactly) {
  for (double v : {0.1, 1.0 / 3.0, 26.742857142857142, 1e-300, 100.0})
    EXPECT_EQ(std::stod(cd::format_number(v)), v);
  EXPECT_EQ(cd::format_number(100.0), "100");
}

TEST(Report, EvalReportFootersRecomputeFromRows) {
  const auto r = sample_report();
  TempDir dir("report");
  cd::write_text(dir / "r.csv", cd::format_eval_report(r, cd::RunConfig{}, "subject-1"));
  const auto col = cd::read_accuracy_column(dir / "r.csv");
  ASSERT_EQ(col.values, r.accuracies);
  const auto s = cd::summarize(col.values);
  const auto summary = cd::read_eval_summary(dir / "r.csv");
  EXPECT_NEAR(summary.accuracy, s.mean, 1e-9);
  EXPECT_EQ(summary.run_id, "subject-1");
  EXPECT_EQ(summary.mode, cd::EvalMode::cv);

  const std::string text = cd::testing::slurp(dir / "r.csv");
  EXPECT_EQ(text.rfind(std::string(cd::kReportBanner), 0), 0u);
  EXPECT_NE(text.find("STD,cv,," + cd::format_number(s.std) + "\n"), std::string::npos);
  EXPECT_NE(text.find("# config_hash: " + hex16(cd::RunConfig{}.hash()) + "\n"), std::string::npos);
  EXPECT_NE(text.find("# evaluated_trials: 14\n"), std::string::npos);
  EXPECT_NE(text.find("# confusion_row_0: 5,3\n"), std::string::npos);
  EXPECT_NE(text.find("# confusion_row_1: 2,4\n"), std::string::npos);
}

TEST(Report, EvalReportIsStable) {
  const auto r = sample_report();
  EXPECT_EQ(cd::format_eval_report(r, cd::RunConfig{}, "x"), cd::format_eval_report(r, cd::RunConfig{}, "x"));
  EXPECT_THROW(cd::format_eval_report(r, cd::RunConfig{}, "a,b"), cd::ConfigError);
}

TEST(Report, StatsReportLongFormat) {
  const std::vector<std::vector<double>> groups{{1, 2, 3, 4}, {2, 3, 4, 5}, {9, 8, 7, 6, 5}};
  const std::vector<std::string> names{"a", "b", "c"};
  const auto stats = cd::run_stats(groups, names, 500, 3);
  const std::string text = cd::format_stats_report(stats, {{"notes", "hello"}});
  EXPECT_NE(text.find("statistic,group_a,group_b,value\n"), std::string::npos);
  EXPECT_NE(text.find("H,,," + cd::format_number(stats.kw.h) + "\n"), std::string::npos);
  EXPECT_NE(text.find("df,,,2\n"), std::string::npos);
  EXPECT_NE(text.find("bootstrap_p,a,b," + cd::format_number(stats.pairwise_p[0][1]) + "\n"), std::string::npos);
  EXPECT_NE(text.find("bootstrap_p,a,c,NA\n"), std::string::npos);
  EXPECT_NE(text.find("# notes: hello\n"), std::string::npos);
}

TEST(Report, ReadsPlainColumnsAndSkipsFooters) {
  TempDir dir("columns");
  write_file(dir / "t.csv", "subject,cv,other\n1,30.0,1\n2,35.5,2\nAVG,32.75,1.5\n");
  EXPECT_EQ(cd::read_accuracy_column(dir / "t.csv", std::string("cv")).values, (std::vector<double>{30.0, 35.5}));
  write_file(dir / "single.csv", "acc\n1\n2\n3\n");
  EXPECT_EQ(cd::read_accuracy_column(dir / "single.csv").values, (std::vector<double>{1, 2, 3}));
  EXPECT_THROW(cd::read_accuracy_column(dir / "t.csv"), cd::InputError);  // ambiguous
}

TEST(Report, ColumnErrorsNameFileAndColumn) {
  TempDir dir("column-errors");
  write_file(dir / "ragged.csv", "a,b\n1,2\n3\n");
  write_file(dir / "empty.csv", "a,b\n");
  write_file(dir / "text.csv", "a,b\n1,x\n");
  auto message = [](const std::filesystem::path& p, std::optional<std::string> col) -> std::string {
    try {
      cd::read_accuracy_column(p, std::move(col));
    } catch (const cd::InputError& e) {
      return e.what();
    }
    return "";
  };
  const auto ragged = message(dir / "ragged.csv", std::string("b"));
  EXPECT_NE(ragged.find("ragged.csv"), std::string::npos);
  EXPECT_NE(ragged.find("line 3"), std::string::npos);
  const auto empty = message(dir / "empty.csv", std::string("b"));
  EXPECT_NE(empty.find("empty.csv"), std::string::npos);
  EXPECT_NE(empty.find("'b'"), std::string::npos);
  const auto text = message(dir / "text.csv", std::string("b"));
  EXPECT_NE(text.find("'b'"), std::string::npos);
  const auto missing = message(dir / "text.csv", std::string("zzz"));
  EXPECT_NE(missing.find("'zzz'"), std::string::npos);
  EXPECT_THROW(cd::read_accuracy_column(dir / "absent.csv"), cd::IoError);
}

TEST(Report, GroupSpecParsing) {
  auto [p1, c1] = cd::parse_group_spec("dir/a.csv:cv");
  EXPECT_EQ(p1, std::filesystem::path("dir/a.csv"));
  EXPECT_EQ(c1, std::optional<std::string>("cv"));
  auto [p2, c2] = cd::parse_group_spec("a.csv");
  EXPECT_EQ(p2, std::filesystem::path("a.csv"));
  EXPECT_FALSE(c2.has_value());
}

TEST(Report, TableHasOneColumnPerModeAndFooters) {
  const std::vector<cd::ReportRow> rows{{"s1", cd::EvalMode::cv, 30.0},
                                        {"s1", cd::EvalMode::transfer_full, 25.0},
                                        {"s2", cd::EvalMode::cv, 34.0},
                                        {"s2", cd::EvalMode::transfer_full, 27.0}};
  const std::string t = cd::format_table(rows);
  EXPECT_NE(t.find("run_id,cv,transfer_full\n"), std::string::npos);
  EXPECT_NE(t.find("s1,30,25\n"), std::string::npos);
  EXPECT_NE(t.find("AVG,32,26\n"), std::string::npos);
  const auto s = cd::summarize(std::vector<double>{30.0, 34.0});
  EXPECT_NE(t.find("STD," + cd::format_number(s.std) + ","), std::string::npos);

  auto dup = rows;
  dup.push_back({"s1", cd::EvalMode::cv, 1.0});
  EXPECT_THROW(cd::format_table(dup), cd::InputError);
}

TEST(Report, WriteToMissingDirectoryIsIoError) {
  EXPECT_THROW(cd::write_text("/nonexistent/dir/out.csv", "x"), cd::IoError);
}
