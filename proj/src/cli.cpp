// Copyright 2026 The qdfair Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qdfair/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "qdfair/analysis.hpp"
#include "qdfair/baseline.hpp"
#include "qdfair/cmame.hpp"
#include "qdfair/config.hpp"
#include "qdfair/error.hpp"
#include "qdfair/ingest.hpp"
#include "qdfair/sampler.hpp"
#include "qdfair/synth.hpp"

namespace qdfair::cli {

namespace {

// Prepends "--key value" pairs from the [subcommand] section of a --config
// file for every key the user did not pass explicitly.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  if (args.empty()) return args;
  const auto at = std::find(args.begin(), args.end(), "--config");
  if (at == args.end()) return args;
  if (at + 1 == args.end()) throw ConfigError("--config needs a file");
  const Config config = Config::load(*(at + 1));
  std::vector<std::string> expanded{args.front()};
  for (const auto& [key, value] : config.section(args.front())) {
    const std::string flag = "--" + key;
    if (std::find(args.begin(), args.end(), flag) != args.end()) continue;
    expanded.push_back(flag);
    expanded.push_back(value);
  }
  for (auto it = args.begin() + 1; it != args.end(); ++it) {
    if (it == at) {
      ++it;
      continue;
    }
    expanded.push_back(*it);
  }
  return expanded;
}

FairZone parse_zone(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw ConfigError("zone must be 'lower:upper'");
  FairZone zone{parse_double(parts[0], "zone lower"), parse_double(parts[1], "zone upper")};
  zone.validate();
  return zone;
}

ScenarioSpec resolve_scenario(const std::string& text) {
  if (std::filesystem::is_regular_file(text)) return ScenarioSpec::load(text);
  return ScenarioSpec::builtin(text);
}

Dataset load_dataset(const std::string& data, const std::string& schema_path, std::ostream& err,
                     RawTable* raw_out = nullptr) {
  const SchemaSpec schema = SchemaSpec::load(schema_path);
  RawTable raw = load_csv(data);
  Dataset d = encode(raw, schema);
  if (schema.expected_features > 0) {
    const auto check = feature_count_check(d, static_cast<std::size_t>(schema.expected_features));
    if (!check.pass) err << "warning: " << check.message << '\n';
  }
  if (raw_out) *raw_out = std::move(raw);
  return d;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
  if (!out) throw DataError("write failed for '" + path + "'");
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quality-diversity search over classifier bias"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all");

  // synth
  std::size_t synth_rows = 54808;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write a synthetic promotion-style source table");
  synth->add_option("--rows", synth_rows, "Number of rows")->capture_default_str();
  synth->add_option("--seed", synth_seed, "Seed")->capture_default_str();
  synth->add_option("--out", synth_out, "Output CSV")->required();

  // sample
  std::string sample_data, sample_schema, sample_scenario, sample_out, sample_report_csv;
  std::optional<std::uint64_t> sample_seed;
  auto* sample_cmd = app.add_subcommand("sample", "Draw a bias scenario from a source table");
  sample_cmd->add_option("--data", sample_data, "Source CSV")->required();
  sample_cmd->add_option("--schema", sample_schema, "Schema config")->required();
  sample_cmd->add_option("--scenario", sample_scenario, "Scenario config file or built-in name")->required();
  sample_cmd->add_option("--seed", sample_seed, "Overrides the scenario seed");
  sample_cmd->add_option("--out", sample_out, "Sampled CSV")->required();
  sample_cmd->add_option("--report-csv", sample_report_csv, "Also write the sample report as CSV");

  // run
  std::string run_data, run_schema, run_arch, run_out, run_range = "0:2";
  RunConfig run_config;
  long long run_evals = static_cast<long long>(run_config.n_evaluations);
  bool run_quiet = false;
  auto* run_cmd = app.add_subcommand("run", "Run CMA-ME and write the archive");
  run_cmd->add_option("--data", run_data, "Dataset CSV")->required();
  run_cmd->add_option("--schema", run_schema, "Schema config")->required();
  run_cmd->add_option("--arch", run_arch, "Layer sizes n_in,h1,...,1")->required();
  run_cmd->add_option("--evals", run_evals, "Evaluation budget")->capture_default_str();
  run_cmd->add_option("--emitters", run_config.emitter_count, "Emitter count")->capture_default_str();
  run_cmd->add_option("--sigma0", run_config.sigma0, "Initial step size")->capture_default_str();
  run_cmd->add_option("--bins", run_config.grid.bins, "Bins per descriptor")->capture_default_str();
  run_cmd->add_option("--range", run_range, "Descriptor range lo:hi")->capture_default_str();
  run_cmd->add_option("--seed", run_config.seed, "Seed")->capture_default_str();
  run_cmd->add_option("--patience", run_config.patience, "Stale batches before restart")->capture_default_str();
  run_cmd->add_option("--epsilon", run_config.epsilon, "Ratio denominator guard")->capture_default_str();
  run_cmd->add_option("--workers", run_config.workers, "Evaluation threads")->capture_default_str();
  run_cmd->add_option("--out", run_out, "Archive CSV")->required();
  run_cmd->add_flag("--quiet", run_quiet, "No per-generation progress");

  // report
  std::string report_archive, report_zone = "0.8:1.25", report_csv;
  auto* report_cmd = app.add_subcommand("report", "Best vs best-fair trade-off table");
  report_cmd->add_option("--archive", report_archive, "Archive CSV")->required();
  report_cmd->add_option("--zone", report_zone, "Fair zone lower:upper")->capture_default_str();
  report_cmd->add_option("--csv", report_csv, "Also write the report as CSV");

  // heatmap
  std::string heat_archive, heat_out, heat_zone = "0.8:1.25";
  auto* heat_cmd = app.add_subcommand("heatmap", "Export prefix.csv and prefix.ppm");
  heat_cmd->add_option("--archive", heat_archive, "Archive CSV")->required();
  heat_cmd->add_option("--out", heat_out, "Output prefix")->required();
  heat_cmd->add_option("--zone", heat_zone, "Fair zone outline lower:upper")->capture_default_str();

  // baseline
  std::string base_data, base_schema, base_arch, base_out, base_init = "glorot";
  TrainConfig train_config;
  long long base_epochs = static_cast<long long>(train_config.epochs);
  auto* base_cmd = app.add_subcommand("baseline", "Gradient-descent reference with stratified CV");
  base_cmd->add_option("--data", base_data, "Dataset CSV")->required();
  base_cmd->add_option("--schema", base_schema, "Schema config")->required();
  base_cmd->add_option("--arch", base_arch, "Layer sizes n_in,h1,...,1")->required();
  base_cmd->add_option("--lr", train_config.learning_rate, "Learning rate")->capture_default_str();
  base_cmd->add_option("--epochs", base_epochs, "Epochs")->capture_default_str();
  base_cmd->add_option("--folds", train_config.folds, "Folds")->capture_default_str();
  base_cmd->add_option("--seed", train_config.seed, "Seed")->capture_default_str();
  base_cmd->add_option("--init", base_init, "glorot or zeros")->capture_default_str();
  base_cmd->add_option("--out", base_out, "Write the retrained genome here");

  // correlate
  std::vector<std::string> correlate_reports;
  auto* corr_cmd = app.add_subcommand("correlate", "Pearson correlation of gap vs deviation reduction");
  corr_cmd->add_option("--reports", correlate_reports, "Report CSV files")->required()->expected(1, -1);

  try {
    const std::vector<std::string> args = expand_config(raw_args);
    std::vector<const char*> argv{"qdfair"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kOk;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << '\n';
      return kUsageError;
    }

    if (*synth) {
      save_csv(synthetic_promotion_table(synth_rows, synth_seed), synth_out);
      out << "wrote " << synth_rows << " rows to " << synth_out << '\n';
    } else if (*sample_cmd) {
      ScenarioSpec spec = resolve_scenario(sample_scenario);
      if (sample_seed) spec.seed = *sample_seed;
      RawTable raw;
      const Dataset source = load_dataset(sample_data, sample_schema, err, &raw);
      const SampleResult result = sample(source, spec);
      save_csv(raw, sample_out, result.rows);
      out << "scenario " << spec.name << ", seed " << spec.seed << ", " << result.rows.size()
          << " rows -> " << sample_out << '\n';
      result.report.print(out);
      if (!sample_report_csv.empty()) {
        std::ofstream csv(sample_report_csv);
        if (!csv) throw DataError("cannot write '" + sample_report_csv + "'");
        result.report.write_csv(csv);
      }
    } else if (*run_cmd) {
      if (run_evals < 0) throw ConfigError("evals must be >= 0");
      run_config.n_evaluations = static_cast<std::size_t>(run_evals);
      run_config.arch = Architecture::parse(run_arch);
      const auto range = split(run_range, ':');
      if (range.size() != 2) throw ConfigError("range must be 'lo:hi'");
      run_config.grid.lo = parse_double(range[0], "range lo");
      run_config.grid.hi = parse_double(range[1], "range hi");
      run_config.validate();
      const Dataset dataset = load_dataset(run_data, run_schema, err);
      ProgressFn progress;
      if (!run_quiet) {
        progress = [&err](const GenerationStats& s) {
          err << "gen " << s.generation << " evals " << s.evaluations << " archive " << s.archive_size
              << " best " << s.best_accuracy << (s.restarted ? " restart" : "") << '\n';
        };
      }
      const Archive archive = qdfair::run(run_config, dataset, progress);
      save_archive(archive, run_out);
      out << "archive with " << archive.size() << " elites -> " << run_out << '\n';
    } else if (*report_cmd) {
      const FairZone zone = parse_zone(report_zone);
      const Archive archive = load_archive(report_archive);
      if (archive.empty()) throw DataError("empty archive");
      const TradeoffReport report = tradeoff(archive, zone);
      report.print(out);
      if (!report_csv.empty()) {
        std::ostringstream csv;
        report.write_csv(csv);
        write_text(report_csv, csv.str());
      }
    } else if (*heat_cmd) {
      const FairZone zone = parse_zone(heat_zone);
      heatmap_export(load_archive(heat_archive), heat_out, zone);
      out << "wrote " << heat_out << ".csv and " << heat_out << ".ppm\n";
    } else if (*base_cmd) {
      if (base_epochs < 0) throw ConfigError("epochs must be >= 0");
      train_config.epochs = static_cast<std::size_t>(base_epochs);
      if (base_init == "glorot") {
        train_config.init = TrainConfig::Init::kGlorot;
      } else if (base_init == "zeros") {
        train_config.init = TrainConfig::Init::kZeros;
      } else {
        throw ConfigError("init must be 'glorot' or 'zeros'");
      }
      const Architecture arch = Architecture::parse(base_arch);
      const Dataset dataset = load_dataset(base_data, base_schema, err);
      const TrainResult result = train(dataset, arch, train_config);
      out << "cv_accuracy " << result.cv_accuracy << '\n';
      for (std::size_t f = 0; f < result.fold_accuracies.size(); ++f) {
        out << "fold " << f << " accuracy " << result.fold_accuracies[f] << '\n';
      }
      if (!base_out.empty()) {
        save_genome(result.genome, arch, base_out);
        out << "genome -> " << base_out << '\n';
      }
    } else if (*corr_cmd) {
      std::vector<TradeoffReport> reports;
      for (const auto& path : correlate_reports) reports.push_back(TradeoffReport::load_csv(path));
      out << tradeoff_correlation(reports) << '\n';
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace qdfair::cli
