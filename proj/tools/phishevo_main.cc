// Copyright 2026 The phishevo Authors.
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

// phishevo command line: runs pipeline steps and writes reports.
//
// Exit codes: 0 success, 2 config error, 3 missing upstream artifact,
// 4 backend failure, 1 anything else.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "phishevo/common.h"
#include "phishevo/pipeline.h"

namespace {

namespace pl = phishevo::pipeline;

struct CommonFlags {
  std::string config;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string output_dir;
  std::string from;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("-c,--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("-s,--set", f.overrides, "Override a config key (dotted.key=value)");
  app->add_option("--seed", f.seed, "Global seed");
  app->add_option("-o,--output-dir", f.output_dir, "Directory that receives run-NNNN folders");
  app->add_option("--from", f.from, "Earlier run directory supplying upstream artifacts");
}

pl::RunConfig config_from(const CommonFlags& f) {
  auto overrides = f.overrides;
  if (f.seed) overrides.push_back("seed=" + std::to_string(*f.seed));
  if (!f.output_dir.empty()) {
    overrides.push_back("output_dir=" + nlohmann::json(f.output_dir).dump());
  }
  std::optional<std::filesystem::path> file;
  if (!f.config.empty()) file = f.config;
  return pl::load_config(file, overrides);
}

void print_result(const pl::RunResult& r) {
  std::cout << r.run_dir.string() << "\n";
  for (const auto& p : r.manifest.phases) {
    std::cout << "  " << p.name << ": " << p.outputs.size() << " artifact(s)\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phishevo: phishing email generation, validation and analysis"};
  app.set_version_flag("--version", std::string(PHISHEVO_VERSION));
  app.require_subcommand(1);

  struct StepCommand {
    const char* name;
    const char* help;
    pl::Step step;
  };
  const StepCommand step_commands[] = {
      {"ingest", "Normalize, deduplicate, filter and split the corpus", pl::Step::kPrep},
      {"gan", "Run the adversarial refinement loop", pl::Step::kGan},
      {"generate", "Generate candidate emails", pl::Step::kGenerate},
      {"validate", "Score generated emails with the analyzer", pl::Step::kValidate},
      {"analyze", "Quality, anomaly, topic and persuasion analysis", pl::Step::kAnalyze},
      {"attack", "Adversarial robustness of the detector", pl::Step::kAttack},
  };
  std::vector<std::pair<CLI::App*, pl::Step>> step_apps;
  std::vector<CommonFlags> flags(std::size(step_commands) + 1);
  for (std::size_t i = 0; i < std::size(step_commands); ++i) {
    auto* sub = app.add_subcommand(step_commands[i].name, step_commands[i].help);
    add_common(sub, flags[i]);
    step_apps.emplace_back(sub, step_commands[i].step);
  }

  auto* run = app.add_subcommand("run", "Run whole phases");
  CommonFlags& run_flags = flags.back();
  add_common(run, run_flags);
  std::string phases = "ABCD";
  std::size_t iterate = 1;
  run->add_option("--phases", phases, "Phase letters out of ABCD");
  run->add_option("--iterate", iterate, "Chain N iterations through the loop-back");

  auto* report = app.add_subcommand("report", "Write report.json and report.txt for a run");
  std::string report_dir;
  report->add_option("run_dir", report_dir, "Run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (report->parsed()) {
      const auto r = pl::emit_report(report_dir);
      std::cout << pl::render_report_text(r);
      return 0;
    }
    for (std::size_t i = 0; i < step_apps.size(); ++i) {
      if (!step_apps[i].first->parsed()) continue;
      pl::RunOptions opts;
      opts.steps = {step_apps[i].second};
      if (!flags[i].from.empty()) opts.from = flags[i].from;
      print_result(pl::run_pipeline(config_from(flags[i]), opts));
      return 0;
    }
    pl::RunOptions opts;
    opts.steps = pl::steps_for_phases(phases);
    if (!run_flags.from.empty()) opts.from = run_flags.from;
    for (const auto& r : pl::run_iterations(config_from(run_flags), opts, iterate)) {
      print_result(r);
    }
    return 0;
  } catch (const phishevo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const phishevo::MissingArtifactError& e) {
    std::cerr << "missing artifact: " << e.what() << "\n";
    return 3;
  } catch (const phishevo::BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
