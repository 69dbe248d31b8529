// crossdecode: generate synthetic epochs, run within-paradigm cross validation
// and cross-paradigm transfer, compare accuracies, and merge reports.
//
// Exit codes: 0 success, 2 usage/config, 3 I/O, 4 numerical/degenerate input.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <charconv>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "crossdecode/epo1.hpp"
#include "crossdecode/errors.hpp"
#include "crossdecode/eval.hpp"
#include "crossdecode/parallel.hpp"
#include "crossdecode/report.hpp"
#include "crossdecode/stats.hpp"
#include "crossdecode/synthgen.hpp"

namespace cd = crossdecode;

namespace {

constexpr int kUsageExit = 2;

cd::Band parse_band(const std::string& text, const std::string& flag) {
  const auto colon = text.find(':');
  cd::Band band;
  auto parse = [&](std::string_view part, double& out) {
    const auto res = std::from_chars(part.data(), part.data() + part.size(), out);
    return res.ec == std::errc() && res.ptr == part.data() + part.size();
  };
  if (colon == std::string::npos || !parse(std::string_view(text).substr(0, colon), band.low) ||
      !parse(std::string_view(text).substr(colon + 1), band.high))
    throw cd::ConfigError(fmt::format("{}: expected LOW:HIGH in Hz, got '{}'", flag, text));
  if (!(band.low > 0.0 && band.low < band.high))
    throw cd::ConfigError(fmt::format("{}: need 0 < LOW < HIGH, got '{}'", flag, text));
  return band;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find(',', start);
    const auto item = text.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    if (!item.empty()) out.push_back(item);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    cd::write_text(out_path, text);
  }
}

// Flags shared by the evaluation commands.
struct PipelineFlags {
  std::string band = "0.5:40";
  int m_pairs = 3;
  double gamma = 1e-6;
  double svm_c = 1.0;
  double svm_tol = 1e-6;
  bool car = false;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--band", band, "Band-pass edges LOW:HIGH in Hz")->capture_default_str();
    cmd.add_option("--m-pairs", m_pairs, "Filter pairs per one-vs-rest sub-problem")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--gamma", gamma, "Covariance shrinkage toward scaled identity")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd.add_option("--svm-c", svm_c, "SVM soft-margin constant")->check(CLI::PositiveNumber)->capture_default_str();
    cmd.add_option("--svm-tol", svm_tol, "SVM relative duality-gap tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_flag("--car", car, "Common-average re-reference before filtering");
  }

  cd::RunConfig config(std::uint64_t seed) const {
    cd::RunConfig c;
    c.seed = seed;
    c.band = parse_band(band, "--band");
    c.m_pairs = m_pairs;
    c.shrinkage = gamma;
    c.svm_c = svm_c;
    c.svm_tol = svm_tol;
    c.common_average_reference = car;
    return c;
  }
};

std::string default_run_id(const std::string& path) { return std::filesystem::path(path).stem().string(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-paradigm EEG decoding with CSP features and a linear SVM"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();

  // gen
  auto* gen = app.add_subcommand("gen", "Write a synthetic EPO1 dataset");
  cd::SynthConfig synth;
  std::string gen_out;
  std::string gen_preset;
  std::string source_band = "8:30";
  gen->add_option("--classes", synth.classes, "Number of classes")->check(CLI::Range(2, 65535))->capture_default_str();
  gen->add_option("--channels", synth.channels, "Number of channels")->check(CLI::Range(4, 4096))->capture_default_str();
  gen->add_option("--trials", synth.trials_per_class, "Trials per class")->check(CLI::PositiveNumber)->capture_default_str();
  auto* rho_opt = gen->add_option("--rho", synth.relatedness, "Relatedness to the shared base patterns")
                      ->check(CLI::Range(0.0, 1.0))
                      ->capture_default_str();
  gen->add_option("--preset", gen_preset, "Relatedness preset; sets --rho and the paradigm tag")
      ->check(CLI::IsMember({"spoken", "imagined", "visual"}))
      ->excludes(rho_opt);
  gen->add_option("--snr", synth.snr, "Source variance over per-channel noise variance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen->add_option("--fs", synth.fs, "Sampling rate in Hz")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--duration", synth.duration, "Epoch length in seconds")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--source-band", source_band, "Source band LOW:HIGH in Hz")->capture_default_str();
  gen->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output EPO1 file")->required();

  // eval-cv
  auto* cv = app.add_subcommand("eval-cv", "Stratified k-fold cross validation within one dataset");
  std::string cv_data, cv_out, cv_id;
  int cv_folds = 10;
  std::uint64_t cv_seed = 0;
  PipelineFlags cv_flags;
  cv->add_option("--data", cv_data, "EPO1 dataset")->required();
  cv->add_option("--folds", cv_folds, "Number of folds")->check(CLI::Range(2, 1 << 20))->capture_default_str();
  cv->add_option("--seed", cv_seed, "Random seed")->capture_default_str();
  cv->add_option("--out", cv_out, "Output CSV report (default stdout)");
  cv->add_option("--id", cv_id, "Run id written to report rows (default: data file stem)");
  cv_flags.add_to(*cv);

  // eval-transfer
  auto* tr = app.add_subcommand("eval-transfer", "Fit on a source dataset, evaluate the frozen model on a target");
  std::string tr_source, tr_target, tr_out, tr_id;
  int tr_few = 0;
  std::uint64_t tr_seed = 0;
  PipelineFlags tr_flags;
  tr->add_option("--source", tr_source, "EPO1 dataset to fit on")->required();
  tr->add_option("--target", tr_target, "EPO1 dataset to evaluate")->required();
  tr->add_option("--few", tr_few, "Fit on this many trials per class only")->check(CLI::PositiveNumber);
  tr->add_option("--seed", tr_seed, "Random seed")->capture_default_str();
  tr->add_option("--out", tr_out, "Output CSV report (default stdout)");
  tr->add_option("--id", tr_id, "Run id written to report rows (default: target file stem)");
  tr_flags.add_to(*tr);

  // stats
  auto* st = app.add_subcommand("stats", "Kruskal-Wallis across groups plus pairwise paired bootstrap");
  std::string st_groups, st_names, st_out, st_notes;
  int st_bootstrap = 10000;
  std::uint64_t st_seed = 0;
  st->add_option("--groups", st_groups, "Comma-separated PATH[:COLUMN] accuracy columns")->required();
  st->add_option("--names", st_names, "Comma-separated group names (default PATH stem[:COLUMN])");
  st->add_option("--bootstrap", st_bootstrap, "Bootstrap resamples")->check(CLI::Range(100, 100000000))->capture_default_str();
  st->add_option("--seed", st_seed, "Random seed")->capture_default_str();
  st->add_option("--out", st_out, "Output CSV report (default stdout)");
  st->add_option("--notes", st_notes, "Free text stored in the report's notes field");

  // report
  auto* rp = app.add_subcommand("report", "Merge eval reports into a run x mode table with AVG/STD rows");
  std::string rp_inputs, rp_out;
  rp->add_option("--inputs", rp_inputs, "Comma-separated eval report CSVs")->required();
  rp->add_option("--out", rp_out, "Output CSV table (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageExit;
  }

  try {
    cd::set_max_threads(threads);

    if (*gen) {
      synth.source_band = parse_band(source_band, "--source-band");
      std::string paradigm = "synthetic";
      if (!gen_preset.empty()) {
        paradigm = gen_preset;
        synth.relatedness = gen_preset == "spoken" ? 1.0 : gen_preset == "imagined" ? 0.8 : 0.2;
      }
      cd::LabeledDataset data = cd::generate_dataset(synth);
      if (paradigm != data.paradigm())
        data = cd::LabeledDataset(data.epochs(), data.labels(), data.class_names(), paradigm, data.relatedness());
      cd::write_epo1(data, gen_out);
      fmt::print("wrote {}: {} trials ({} classes x {}), {} channels x {} samples @ {} Hz, paradigm={}, rho={}, snr={}\n",
                 gen_out, data.size(), data.class_count(), synth.trials_per_class, data.channels(), data.samples(),
                 cd::format_number(data.fs()), data.paradigm(), cd::format_number(synth.relatedness),
                 cd::format_number(synth.snr));
      return 0;
    }

    if (*cv) {
      const cd::LabeledDataset data = cd::read_epo1(cv_data);
      cd::RunConfig config = cv_flags.config(cv_seed);
      config.folds = cv_folds;
      const cd::EvalReport report = cd::kfold_cv(data, config);
      const std::string id = cv_id.empty() ? default_run_id(cv_data) : cv_id;
      emit(cv_out, cd::format_eval_report(report, config, id, {{"data", cv_data}}));
      if (!cv_out.empty() && cv_out != "-")
        fmt::print(stderr, "{}: {}-fold CV mean {:.2f}% (std {:.2f})\n", id, config.folds, report.mean, report.std);
      return 0;
    }

    if (*tr) {
      const cd::LabeledDataset source = cd::read_epo1(tr_source);
      const cd::LabeledDataset target = cd::read_epo1(tr_target);
      if (source.channels() != target.channels() || source.class_count() != target.class_count())
        throw cd::ConfigError(fmt::format("source {} has {} channels x {} classes but target {} has {} channels x {} classes",
                                          tr_source, source.channels(), source.class_count(), tr_target,
                                          target.channels(), target.class_count()));
      cd::RunConfig config = tr_flags.config(tr_seed);
      if (tr_few > 0) config.few_trials_per_class = tr_few;
      const cd::DecodingModel model = tr_few > 0 ? cd::fit_few(source, config) : cd::fit_full(source, config);
      const cd::EvalReport report = cd::evaluate_transfer(model, target);
      const std::string id = tr_id.empty() ? default_run_id(tr_target) : tr_id;
      emit(tr_out, cd::format_eval_report(report, config, id, {{"source", tr_source}, {"target", tr_target}}));
      if (!tr_out.empty() && tr_out != "-")
        fmt::print(stderr, "{}: {} accuracy {:.2f}%\n", id, cd::mode_name(report.mode), report.mean);
      return 0;
    }

    if (*st) {
      const auto specs = split_list(st_groups);
      if (specs.size() < 2) throw cd::ConfigError("--groups needs at least two entries");
      std::vector<std::vector<double>> groups;
      std::vector<std::string> names = split_list(st_names);
      if (!names.empty() && names.size() != specs.size())
        throw cd::ConfigError(fmt::format("--names lists {} names for {} groups", names.size(), specs.size()));
      const bool derive_names = names.empty();
      for (const auto& spec : specs) {
        const auto [path, column] = cd::parse_group_spec(spec);
        auto col = cd::read_accuracy_column(path, column);
        groups.push_back(std::move(col.values));
        if (derive_names)
          names.push_back(column ? fmt::format("{}:{}", path.stem().string(), *column) : path.stem().string());
      }
      const cd::StatsReport report = cd::run_stats(groups, names, st_bootstrap, st_seed);
      const std::string canonical = fmt::format("groups={};bootstrap={};seed={}", st_groups, st_bootstrap, st_seed);
      emit(st_out, cd::format_stats_report(report, {{"groups", fmt::format("{}", fmt::join(specs, " "))},
                                                    {"config_hash", fmt::format("{:016x}", cd::fnv1a64(canonical))},
                                                    {"notes", st_notes}}));
      if (!st_out.empty() && st_out != "-")
        fmt::print(stderr, "H = {:.4f}, df = {}, p = {:.4g}\n", report.kw.h, report.kw.df, report.kw.p);
      return 0;
    }

    if (*rp) {
      std::vector<cd::ReportRow> rows;
      for (const auto& path : split_list(rp_inputs)) rows.push_back(cd::read_eval_summary(path));
      emit(rp_out, cd::format_table(rows));
      return 0;
    }
  } catch (const cd::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return cd::exit_code(e.kind());
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
