#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "aclrisk/ahp.hpp"
#include "aclrisk/assessment.hpp"
#include "aclrisk/config.hpp"
#include "aclrisk/error.hpp"
#include "aclrisk/ingest.hpp"
#include "aclrisk/motion_synth.hpp"

namespace aclrisk::cli {

namespace fs = std::filesystem;

namespace {

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

struct AssessFlags {
  std::string sagittal;
  std::string frontal;
  std::string config;
  std::string report;
  std::string traces;
  std::string format;
  std::string window;
  std::string id = "trial";
  bool force = false;
  bool partial = false;
};

struct AhpFlags {
  std::string matrix;
  std::string method = "sum";
};

struct SynthFlags {
  std::string script;
  std::string out;
  std::string format = "csv";
};

struct BatchFlags {
  std::string trials;
  std::string config;
  std::string summary;
  std::string reports;
  unsigned threads = 0;
};

RunConfig load_config(const std::string& path) {
  RunConfig config;
  if (!path.empty()) config = parse_run_config(read_text_file(path));
  apply_env_overrides(config);
  return config;
}

int cmd_assess(const AssessFlags& f, std::ostream& out) {
  RunConfig config = load_config(f.config);
  if (!f.report.empty()) config.report_path = f.report;
  if (!f.traces.empty()) config.traces_dir = f.traces;
  if (!f.format.empty()) config.format = *parse_report_format(f.format);
  if (!f.window.empty()) config.window.mode = *parse_window_mode(f.window);
  if (f.force) config.force = true;
  if (f.partial) config.partial = true;

  TrialSource source;
  source.id = f.id;
  if (!f.sagittal.empty()) source.sagittal = fs::path(f.sagittal);
  if (!f.frontal.empty()) source.frontal = fs::path(f.frontal);

  auto report = assess_trial(source, config);
  if (config.traces_dir) {
    try {
      emit_traces(report, *config.traces_dir);
    } catch (const Error& e) {
      throw StageError(Stage::Output, e);
    }
  }
  const auto text = emit_report(report, config.format);
  if (config.report_path) {
    try {
      write_text_file(*config.report_path, text);
    } catch (const Error& e) {
      throw StageError(Stage::Output, e);
    }
  } else {
    out << text;
  }
  return kExitOk;
}

int cmd_ahp(const AhpFlags& f, std::ostream& out, std::ostream& err) {
  const auto method = parse_weight_method(f.method);
  const auto matrix = parse_matrix_document(read_text_file(f.matrix));
  const auto violations = validate(matrix);
  if (!violations.empty()) {
    err << "error: invalid judgment matrix\n";
    for (const auto& v : violations) err << "  " << v.describe() << '\n';
    return kExitFailure;
  }
  const auto weights = derive_weights(matrix, *method);
  const auto report = consistency(matrix, weights);
  out << "order: " << matrix.order() << '\n';
  out << "method: " << to_string(*method) << '\n';
  out << "weights:";
  for (double w : weights.values) out << ' ' << fixed4(w);
  out << '\n';
  out << "lambda_max: " << fixed4(report.lambda_max) << '\n';
  out << "CI: " << fixed4(report.ci) << '\n';
  out << "RI: " << fixed4(report.ri) << '\n';
  out << "CR: " << fixed4(report.cr) << '\n';
  out << "consistency: " << (report.pass ? "pass" : "fail") << '\n';
  return kExitOk;
}

int cmd_synth(const SynthFlags& f, std::ostream& out) {
  const auto script = parse_motion_script(read_text_file(f.script));
  const auto trial = generate(script);
  const fs::path dir(f.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string());
  if (f.format == "json") {
    write_series_openpose(trial.sagittal, dir / "sagittal", "sagittal");
    write_series_openpose(trial.frontal, dir / "frontal", "frontal");
    out << "wrote " << (dir / "sagittal").string() << "/ and " << (dir / "frontal").string() << "/\n";
  } else {
    write_text_file(dir / "sagittal.csv", format_series_csv(trial.sagittal));
    write_text_file(dir / "frontal.csv", format_series_csv(trial.frontal));
    out << "wrote " << (dir / "sagittal.csv").string() << " and " << (dir / "frontal.csv").string()
        << '\n';
  }
  write_text_file(dir / "ground_truth.json", format_ground_truth(trial.truth));
  out << "wrote " << (dir / "ground_truth.json").string() << '\n';
  return kExitOk;
}

// Trial list CSV: header id,sagittal,frontal; relative paths resolve against
// the list's directory.
std::vector<TrialSource> load_trials(const std::string& path) {
  std::istringstream in(read_text_file(path));
  const fs::path base = fs::path(path).parent_path();
  std::vector<TrialSource> trials;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line != "id,sagittal,frontal") {
        throw Error(ErrorCode::MalformedDocument, "trial list header must be id,sagittal,frontal");
      }
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 3) throw Error(ErrorCode::MalformedDocument, "trial row needs 3 columns: " + line);
    auto resolve = [&](const std::string& p) -> std::optional<fs::path> {
      if (p.empty()) return std::nullopt;
      const fs::path candidate(p);
      return candidate.is_absolute() ? candidate : base / candidate;
    };
    trials.push_back({cells[0], resolve(cells[1]), resolve(cells[2])});
  }
  return trials;
}

int cmd_batch(const BatchFlags& f, std::ostream& out, std::ostream& err) {
  const RunConfig config = load_config(f.config);
  const auto trials = load_trials(f.trials);
  const auto result = assess_batch(trials, config, f.threads);

  if (!f.reports.empty()) {
    fs::create_directories(f.reports);
    for (const auto& report : result.reports) {
      write_text_file(fs::path(f.reports) / (report.trial_id + ".json"), emit_report_json(report));
    }
  }
  const auto rows = result.summary();
  const auto summary = format_summary_csv(rows);
  if (!f.summary.empty()) {
    write_text_file(f.summary, summary);
  } else {
    out << summary;
  }
  for (const auto& failure : result.failures) {
    err << "trial " << failure.number << " (" << failure.trial_id << ") failed in "
        << to_string(failure.stage) << ": " << failure.message << '\n';
  }
  return result.failures.empty() ? kExitOk : kExitFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Score ACL injury risk from 2D keypoint time series", "aclrisk"};
  app.require_subcommand(1);

  AssessFlags assess;
  auto* assess_cmd = app.add_subcommand("assess", "Assess one trial from sagittal and frontal keypoints");
  assess_cmd->add_option("--sagittal", assess.sagittal, "Sagittal frame directory or CSV");
  assess_cmd->add_option("--frontal", assess.frontal, "Frontal frame directory or CSV");
  assess_cmd->add_option("--config", assess.config, "JSON run configuration");
  assess_cmd->add_option("--report", assess.report, "Write the report here instead of stdout");
  assess_cmd->add_option("--traces", assess.traces, "Directory for per-frame trace CSVs");
  assess_cmd->add_option("--format", assess.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));
  assess_cmd->add_option("--window", assess.window, "Analysis window")
      ->check(CLI::IsMember({"full", "landing"}));
  assess_cmd->add_option("--id", assess.id, "Trial identifier");
  assess_cmd->add_flag("--force", assess.force, "Proceed when the judgment matrix is inconsistent");
  assess_cmd->add_flag("--partial", assess.partial, "Allow a single view; the total is omitted");

  AhpFlags ahp;
  auto* ahp_cmd = app.add_subcommand("ahp", "Derive weights and check consistency of a judgment matrix");
  ahp_cmd->add_option("--matrix", ahp.matrix, "Matrix file (text rows or JSON)")->required();
  ahp_cmd->add_option("--method", ahp.method, "Weight derivation")
      ->check(CLI::IsMember({"sum", "geometric", "product"}));

  SynthFlags synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic two-view trial");
  synth_cmd->add_option("--script", synth.script, "Motion script JSON")->required();
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--format", synth.format, "Series format")
      ->check(CLI::IsMember({"json", "csv"}));

  BatchFlags batch;
  auto* batch_cmd = app.add_subcommand("batch", "Assess every trial listed in a CSV file");
  batch_cmd->add_option("--trials", batch.trials, "CSV with header id,sagittal,frontal")->required();
  batch_cmd->add_option("--config", batch.config, "JSON run configuration");
  batch_cmd->add_option("--summary", batch.summary, "Write the summary CSV here instead of stdout");
  batch_cmd->add_option("--reports", batch.reports, "Directory for per-trial JSON reports");
  batch_cmd->add_option("--threads", batch.threads, "Worker threads (0 = all cores)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (assess_cmd->parsed()) {
      if (assess.sagittal.empty() && !assess.partial) throw CLI::RequiredError("--sagittal");
      if (assess.frontal.empty() && !assess.partial) throw CLI::RequiredError("--frontal");
      if (assess.sagittal.empty() && assess.frontal.empty()) throw CLI::RequiredError("--sagittal or --frontal");
    }
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* context = &app;
    for (const auto* sub : {assess_cmd, ahp_cmd, synth_cmd, batch_cmd}) {
      if (sub->parsed()) context = sub;
    }
    err << context->help();
    return kExitUsage;
  }

  try {
    if (assess_cmd->parsed()) return cmd_assess(assess, out);
    if (ahp_cmd->parsed()) return cmd_ahp(ahp, out, err);
    if (synth_cmd->parsed()) return cmd_synth(synth, out);
    if (batch_cmd->parsed()) return cmd_batch(batch, out, err);
  } catch (const StageError& e) {
    err << "error: stage " << to_string(e.stage()) << ": " << to_string(e.code()) << ": "
        << e.detail() << '\n';
    return kExitFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace aclrisk::cli
