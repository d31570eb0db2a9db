// Copyright 2026 The Robsub Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "commands.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "csv_io.h"
#include "manifest.h"
#include "robsub/diagnostics.h"
#include "robsub/error.h"
#include "robsub/gram_state.h"
#include "robsub/sampler.h"
#include "robsub/simulation.h"

namespace robsub::tools {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr const char* kTraceHeader =
    "iteration,status,removed,added,removed_score,added_score,swap_leverage,"
    "log_det_after\n";

[[noreturn]] void ConfigFail(const std::string& message) {
  throw Error(ErrorCode::kConfigError, message);
}

std::uint64_t DefaultSeed() {
  const char* env = std::getenv(kSeedEnvVar);
  if (!env || !*env) return 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end) {
    ConfigFail(std::string(kSeedEnvVar) + " is not an unsigned integer");
  }
  return v;
}

double ParseNu(const std::string& text, const char* flag) {
  std::string lower = text;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "inf" || lower == "+inf" || lower == "infinity") {
    return kInfiniteNu;
  }
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end || !(v > 0.0)) {
    ConfigFail(std::string(flag) + " must be a positive number or 'inf'");
  }
  return v;
}

std::string NuText(double nu) {
  return std::isinf(nu) ? std::string("inf") : FormatDouble(nu);
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir);
}

std::string InDir(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::string TraceCsv(const std::vector<ExchangeTrace>& trace) {
  std::string out = kTraceHeader;
  for (const ExchangeTrace& r : trace) {
    out += std::to_string(r.iteration);
    out += ',';
    out += TraceStatusName(r.status);
    out += ',';
    if (r.removed >= 0) out += std::to_string(r.removed);
    out += ',';
    if (r.added) out += std::to_string(*r.added);
    out += ',';
    out += FormatDouble(r.removed_score);
    out += ',';
    out += FormatDouble(r.added_score);
    out += ',';
    out += FormatDouble(r.swap_leverage);
    out += ',';
    out += FormatDouble(r.log_det_after);
    out += '\n';
  }
  return out;
}

ordered_json CriterionJson(const CriterionConfig& cfg, Index n,
                           Index n_rows, bool informative) {
  ordered_json j;
  j["criterion"] = CriterionName(cfg.kind);
  j["informative"] = informative;
  j["n"] = n;
  j["nu1"] = NuText(cfg.nu1);
  j["nu2"] = NuText(cfg.nu2);
  j["n_tilde"] = ResolvedNTilde(cfg, n_rows, n);
  j["t_max"] = ResolvedTMax(cfg, n);
  j["rebuild_period"] = cfg.rebuild_period;
  j["cook_threshold"] = cfg.cook_mode == CookThresholdMode::kFixed
                            ? ordered_json(cfg.cook_fixed)
                            : ordered_json("4/n");
  j["strict_init"] = cfg.strict_init;
  return j;
}

void AddSeedOption(CLI::App& app, std::uint64_t& seed) {
  seed = DefaultSeed();
  app.add_option("--seed", seed, "Random seed (default: $ROBSUB_SEED or 0)");
}

// ---------------------------------------------------------------- subsample

struct SubsampleArgs {
  std::string input;
  Index n = 0;
  std::string criterion = "d";
  bool informative = false;
  std::string nu1 = "2";
  std::string nu2 = "3";
  Index n_tilde = 0;
  Index t_max = 0;
  int rebuild_period = kDefaultRebuildPeriod;
  std::optional<double> cook_threshold;
  bool strict_init = false;
  std::uint64_t seed = 0;
  std::optional<std::string> prediction_set;
  std::optional<std::string> response;
  std::optional<std::string> id_column;
  std::string out_dir = ".";
};

void ConfigureSubsample(CLI::App& cmd, SubsampleArgs& a) {
  cmd.add_option("--input", a.input, "CSV dataset")->required();
  cmd.add_option("--n", a.n, "Subsample size")->required();
  cmd.add_option("--criterion", a.criterion, "d or i")
      ->check(CLI::IsMember({"d", "i", "D", "I"}));
  cmd.add_flag("--informative", a.informative,
               "Reject Cook's-distance outliers (needs --response)");
  cmd.add_option("--nu1", a.nu1, "High-leverage multiplier, or 'inf'");
  cmd.add_option("--nu2", a.nu2, "Initialisation multiplier");
  cmd.add_option("--n-tilde", a.n_tilde, "Candidates per iteration (0: 2n)");
  cmd.add_option("--t-max", a.t_max, "Iteration cap (0: 10n)");
  cmd.add_option("--rebuild-period", a.rebuild_period,
                 "Exchanges between full inverse rebuilds");
  cmd.add_option("--cook-threshold", a.cook_threshold,
                 "Fixed Cook's distance cutoff (default 4/n)");
  cmd.add_flag("--strict-init", a.strict_init,
               "Fail if initialisation cannot reach the nu2 bound");
  AddSeedOption(cmd, a.seed);
  cmd.add_option("--prediction-set", a.prediction_set,
                 "CSV of prediction points (required for -criterion i)");
  cmd.add_option("--response", a.response, "Response column name");
  cmd.add_option("--id-column", a.id_column, "Row identifier column name");
  cmd.add_option("--out-dir", a.out_dir, "Artifact directory");
}

int RunSubsample(const SubsampleArgs& a, const std::vector<std::string>& args,
                 std::ostream& out) {
  Manifest manifest("subsample", args);
  CriterionConfig cfg;
  cfg.kind = (a.criterion == "i" || a.criterion == "I") ? Criterion::kI
                                                        : Criterion::kD;
  cfg.nu1 = ParseNu(a.nu1, "--nu1");
  cfg.nu2 = ParseNu(a.nu2, "--nu2");
  cfg.n_tilde = a.n_tilde;
  cfg.t_max = a.t_max;
  cfg.rebuild_period = a.rebuild_period;
  cfg.seed = a.seed;
  cfg.strict_init = a.strict_init;
  if (a.cook_threshold) {
    cfg.cook_mode = CookThresholdMode::kFixed;
    cfg.cook_fixed = *a.cook_threshold;
  }
  if (cfg.kind == Criterion::kI && !a.prediction_set) {
    ConfigFail("--criterion i requires --prediction-set");
  }
  if (a.informative && !a.response) {
    throw Error(ErrorCode::kMissingResponse,
                "--informative requires --response <column>");
  }

  const LoadedDataset loaded = IngestCsv(a.input, a.response, a.id_column);
  manifest.AddInput("input", a.input);
  if (cfg.kind == Criterion::kI) {
    PointSet pts = ReadPointSet(*a.prediction_set, loaded.factor_names,
                                std::nullopt);
    cfg.prediction_set.emplace(std::move(pts.x));
    manifest.AddInput("prediction_set", *a.prediction_set);
  }
  const Dataset& data = loaded.data;

  const PipelineResult run = SelectSample(data, a.n, cfg, a.informative);
  const SamplerResult& res = run.result;

  EnsureDir(a.out_dir);
  WriteIndexFile(InDir(a.out_dir, "sample.idx"), res.sample);
  WriteFileBytes(InDir(a.out_dir, "trace.csv"), TraceCsv(res.trace));
  WriteFileBytes(InDir(a.out_dir, "init_trace.csv"), TraceCsv(run.init.trace));
  manifest.AddArtifact("sample.idx");
  manifest.AddArtifact("trace.csv");
  manifest.AddArtifact("init_trace.csv");

  const GramState final_state = GramState::Build(data, res.sample);
  const double max_leverage = SampleLeverages(final_state, data).maxCoeff();

  manifest.config() = CriterionJson(cfg, a.n, data.n_rows(), a.informative);
  manifest.config()["response"] =
      a.response ? ordered_json(*a.response) : ordered_json(nullptr);
  manifest.SetSeed(a.seed);
  ordered_json& summary = manifest.extra("summary");
  summary["iterations"] = res.iterations_run;
  summary["converged"] = res.converged;
  summary["init_iterations"] = run.init.iterations_run;
  summary["init_converged"] = run.init.converged;
  summary["log_det"] = res.final_log_det;
  summary["max_leverage"] = max_leverage;
  if (res.final_trace_criterion) {
    summary["trace_criterion"] = *res.final_trace_criterion;
  }
  summary["warnings"] = res.warnings;
  manifest.Write(a.out_dir);

  out << "n=" << a.n << " iterations=" << res.iterations_run
      << " converged=" << (res.converged ? "true" : "false")
      << " log_det=" << FormatDouble(res.final_log_det)
      << " max_leverage=" << FormatDouble(max_leverage) << "\n";
  return 0;
}

// ----------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string scenario;
  std::optional<Index> n_rows;
  Index n_out = 10;
  StudyConfig study = DefaultStudyConfig();
  std::string nu1 = "2";
  std::string nu2 = "3";
  bool emit_data = false;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

void ConfigureSimulate(CLI::App& cmd, SimulateArgs& a) {
  cmd.add_option("--scenario", a.scenario, "example1 or study")
      ->required()
      ->check(CLI::IsMember({"example1", "study"}));
  cmd.add_option("--N", a.n_rows,
                 "Rows (default 10000 for example1, 100000 for study)");
  cmd.add_option("--N-out", a.n_out, "Contaminated rows (example1)");
  cmd.add_option("--N2", a.study.n_planted, "Contaminated rows (study)");
  cmd.add_option("--H", a.study.datasets, "Design replicates");
  cmd.add_option("--S", a.study.responses, "Response replicates per design");
  cmd.add_option("--n", a.study.n, "Subsample size");
  cmd.add_option("--N0", a.study.n_prediction, "Prediction set size");
  cmd.add_option("--NT", a.study.n_test, "Test set size");
  cmd.add_option("--n-srs", a.study.srs_replicates, "SRS replicates per cell");
  cmd.add_option("--n-tilde", a.study.n_tilde, "Candidates per iteration");
  cmd.add_option("--t-max", a.study.t_max, "Iteration cap (0: 10n)");
  cmd.add_option("--nu1", a.nu1, "High-leverage multiplier, or 'inf'");
  cmd.add_option("--nu2", a.nu2, "Initialisation multiplier");
  cmd.add_flag("--emit-data", a.emit_data, "Also write the generated datasets");
  AddSeedOption(cmd, a.seed);
  cmd.add_option("--out-dir", a.out_dir, "Artifact directory");
}

std::vector<std::string> StudyFactorNames() {
  std::vector<std::string> names;
  for (int j = 1; j <= 10; ++j) names.push_back("x" + std::to_string(j));
  return names;
}

std::string Cell(const std::optional<double>& v) {
  return v ? FormatDouble(*v) : std::string();
}

std::string MetricsLine(const MetricsRow& r) {
  return std::string(StrategyName(r.strategy)) + ',' + Cell(r.mspe_x0) + ',' +
         FormatDouble(r.log_det) + ',' + Cell(r.spe_x0) + ',' + Cell(r.spe_xt) +
         ',' + Cell(r.se_d0) + ',' + Cell(r.se_dt) + '\n';
}

int RunExample1(const SimulateArgs& a, const std::vector<std::string>& args,
                std::ostream& out) {
  Manifest manifest("simulate", args);
  const Index n_rows = a.n_rows.value_or(10000);
  Rng rng = MakeStream(a.seed, {});
  const MarkedDataset md = GenerateExample1(n_rows, a.n_out, rng);
  EnsureDir(a.out_dir);
  WriteDatasetCsv(InDir(a.out_dir, "example1.csv"), md.data.x(), {"x"},
                  &md.data.y(), "y");
  WriteIndexFile(InDir(a.out_dir, "planted.idx"), md.planted);
  manifest.AddArtifact("example1.csv");
  manifest.AddArtifact("planted.idx");
  manifest.config() = {{"scenario", "example1"},
                       {"N", n_rows},
                       {"N_out", a.n_out}};
  manifest.SetSeed(a.seed);
  manifest.Write(a.out_dir);
  out << "scenario=example1 N=" << n_rows << " planted=" << md.planted.size()
      << "\n";
  return 0;
}

int RunStudyCommand(SimulateArgs a, const std::vector<std::string>& args,
                    std::ostream& out) {
  Manifest manifest("simulate", args);
  StudyConfig& cfg = a.study;
  if (a.n_rows) cfg.n_rows = *a.n_rows;
  cfg.nu1 = ParseNu(a.nu1, "--nu1");
  cfg.nu2 = ParseNu(a.nu2, "--nu2");
  cfg.seed = a.seed;
  ValidateStudyConfig(cfg);

  const StudyResult result = RunStudy(cfg);
  EnsureDir(a.out_dir);

  const std::string header =
      "strategy,mspe_x0,log_det,spe_x0,spe_xt,se_d0,se_dt\n";
  std::string table = header;
  for (const MetricsRow& r : result.averages) table += MetricsLine(r);
  WriteFileBytes(InDir(a.out_dir, "results.csv"), table);
  std::string cells = "h,s," + header;
  ordered_json checksums = ordered_json::array();
  for (const StudyCell& c : result.cells) {
    ordered_json entry = {{"h", c.h}, {"s", c.s}};
    for (std::size_t k = 0; k < c.rows.size(); ++k) {
      cells += std::to_string(c.h) + ',' + std::to_string(c.s) + ',' +
               MetricsLine(c.rows[k]);
      entry[std::string(StrategyName(c.rows[k].strategy))] = c.checksums[k];
    }
    checksums.push_back(entry);
  }
  WriteFileBytes(InDir(a.out_dir, "cells.csv"), cells);
  manifest.AddArtifact("results.csv");
  manifest.AddArtifact("cells.csv");

  if (a.emit_data) {
    const std::vector<std::string> names = StudyFactorNames();
    const HoldoutSets holdout = StudyHoldout(cfg);
    WriteDatasetCsv(InDir(a.out_dir, "prediction_set.csv"),
                    holdout.prediction.x, names, &holdout.y_prediction, "y");
    WriteDatasetCsv(InDir(a.out_dir, "test_set.csv"), holdout.test.x, names,
                    &holdout.y_test, "y");
    manifest.AddArtifact("prediction_set.csv");
    manifest.AddArtifact("test_set.csv");
    for (int h = 0; h < cfg.datasets; ++h) {
      const StudyDesign design = StudyDesignFor(cfg, h);
      const std::string planted = "planted_h" + std::to_string(h) + ".idx";
      WriteIndexFile(InDir(a.out_dir, planted), design.planted);
      manifest.AddArtifact(planted);
      for (int s = 0; s < cfg.responses; ++s) {
        const Vector y = StudyResponseFor(cfg, design, h, s);
        const std::string name = "study_h" + std::to_string(h) + "_s" +
                                 std::to_string(s) + ".csv";
        WriteDatasetCsv(InDir(a.out_dir, name), design.x, names, &y, "y");
        manifest.AddArtifact(name);
      }
    }
  }

  ordered_json beta_main = ordered_json::array();
  ordered_json beta_out = ordered_json::array();
  for (Index j = 0; j < cfg.beta_main.size(); ++j) {
    beta_main.push_back(cfg.beta_main(j));
    beta_out.push_back(cfg.beta_out(j));
  }
  manifest.config() = {{"scenario", "study"},
                       {"N", cfg.n_rows},
                       {"N2", cfg.n_planted},
                       {"H", cfg.datasets},
                       {"S", cfg.responses},
                       {"n", cfg.n},
                       {"N0", cfg.n_prediction},
                       {"NT", cfg.n_test},
                       {"n_srs", cfg.srs_replicates},
                       {"n_tilde", cfg.n_tilde ? cfg.n_tilde : 2 * cfg.n},
                       {"t_max", cfg.t_max ? cfg.t_max : 10 * cfg.n},
                       {"nu1", NuText(cfg.nu1)},
                       {"nu2", NuText(cfg.nu2)},
                       {"beta_main", beta_main},
                       {"beta_out", beta_out},
                       {"sigma_main", cfg.sigma_main},
                       {"sigma_out", cfg.sigma_out}};
  manifest.SetSeed(cfg.seed);
  manifest.extra("cell_checksums") = checksums;
  manifest.Write(a.out_dir);
  out << table;
  return 0;
}

// ----------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string input;
  std::string sample;
  std::optional<std::string> response;
  std::optional<std::string> id_column;
  std::optional<std::string> prediction_set;
  std::optional<std::string> test_set;
  std::optional<std::string> beta_true;
  std::optional<double> sigma_true;
  std::optional<std::string> out_path;
};

void ConfigureEvaluate(CLI::App& cmd, EvaluateArgs& a) {
  cmd.add_option("--input", a.input, "CSV dataset")->required();
  cmd.add_option("--sample", a.sample, "sample.idx file")->required();
  cmd.add_option("--response", a.response, "Response column name");
  cmd.add_option("--id-column", a.id_column, "Row identifier column name");
  cmd.add_option("--prediction-set", a.prediction_set,
                 "CSV of prediction points (response optional)");
  cmd.add_option("--test-set", a.test_set, "CSV of test points");
  cmd.add_option("--beta-true", a.beta_true,
                 "Comma-separated true coefficients, intercept first");
  cmd.add_option("--sigma-true", a.sigma_true, "True noise standard deviation");
  cmd.add_option("--out", a.out_path, "Also write the metrics row here");
}

Vector ParseBeta(const std::string& text, Index expected) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end) {
      ConfigFail("--beta-true entry '" + item + "' is not a number");
    }
    values.push_back(v);
  }
  if (static_cast<Index>(values.size()) != expected) {
    throw Error(ErrorCode::kShapeMismatch,
                "--beta-true has " + std::to_string(values.size()) +
                    " entries, model has " + std::to_string(expected));
  }
  return Eigen::Map<Vector>(values.data(), expected);
}

int RunEvaluate(const EvaluateArgs& a, std::ostream& out) {
  const LoadedDataset loaded = IngestCsv(a.input, a.response, a.id_column);
  const Dataset& data = loaded.data;
  const std::vector<Index> sample = ReadIndexFile(a.sample);
  ValidateSample(sample, data.n_rows());

  std::optional<OlsFit> fit;
  if (data.has_response()) fit = FitOls(data, sample);

  MetricsInputs inputs;
  std::optional<PredictionSet> prediction;
  std::optional<PointSet> pred_pts;
  std::optional<PointSet> test_pts;
  Vector beta;
  if (a.prediction_set) {
    pred_pts = ReadPointSet(*a.prediction_set, loaded.factor_names, a.response);
    prediction.emplace(pred_pts->x);
    inputs.prediction = &*prediction;
    if (pred_pts->y) inputs.y_prediction = &*pred_pts->y;
  }
  if (a.test_set) {
    test_pts = ReadPointSet(*a.test_set, loaded.factor_names, a.response);
    inputs.x_test = &test_pts->x;
    if (test_pts->y) inputs.y_test = &*test_pts->y;
  }
  if (a.beta_true) {
    beta = ParseBeta(*a.beta_true, data.n_params());
    inputs.beta_true = &beta;
  }
  inputs.sigma_true = a.sigma_true;

  const MetricsRow row = ComputeMetrics(data, sample, fit, inputs);
  std::string header = "n";
  std::string values = std::to_string(sample.size());
  auto column = [&](const char* name, const std::optional<double>& v) {
    if (!v) return;
    header += ',';
    header += name;
    values += ',';
    values += FormatDouble(*v);
  };
  column("mspe_x0", row.mspe_x0);
  column("trace_x0", row.trace_x0);
  column("log_det", row.log_det);
  column("spe_x0", row.spe_x0);
  column("spe_xt", row.spe_xt);
  column("se_d0", row.se_d0);
  column("se_dt", row.se_dt);
  const std::string text = header + "\n" + values + "\n";
  if (a.out_path) {
    const fs::path parent = fs::path(*a.out_path).parent_path();
    if (!parent.empty()) EnsureDir(parent.string());
    WriteFileBytes(*a.out_path, text);
  }
  out << text;
  return 0;
}

int ReportError(std::ostream& err, ErrorCode code, const std::string& what) {
  err << "error: " << ErrorCodeName(code) << ": " << what << "\n";
  return ExitStatus(code);
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Outlier-resistant D- and I-optimal subsampling", "robsub"};
  app.require_subcommand(1);
  SubsampleArgs sub;
  SimulateArgs sim;
  EvaluateArgs eval;
  try {
    CLI::App* subsample =
        app.add_subcommand("subsample", "Select a subsample from a CSV dataset");
    CLI::App* simulate =
        app.add_subcommand("simulate", "Generate synthetic data or run the study");
    CLI::App* evaluate =
        app.add_subcommand("evaluate", "Compute metrics for a selected sample");
    ConfigureSubsample(*subsample, sub);
    ConfigureSimulate(*simulate, sim);
    ConfigureEvaluate(*evaluate, eval);

    std::vector<const char*> argv = {"robsub"};
    for (const std::string& s : args) argv.push_back(s.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return 0;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return 0;
    } catch (const CLI::ParseError& e) {
      return ReportError(err, ErrorCode::kConfigError, e.what());
    }

    if (subsample->parsed()) return RunSubsample(sub, args, out);
    if (simulate->parsed()) {
      return sim.scenario == "example1" ? RunExample1(sim, args, out)
                                        : RunStudyCommand(sim, args, out);
    }
    return RunEvaluate(eval, out);
  } catch (const Error& e) {
    return ReportError(err, e.code(), e.what());
  } catch (const std::exception& e) {
    err << "error: Internal: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace robsub::tools
