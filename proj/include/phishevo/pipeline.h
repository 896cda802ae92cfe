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

// End-to-end orchestration: configuration, run directories, the four
// phases (generation, validation, analysis, loop-back), manifests and the
// consolidated report.

#ifndef PHISHEVO_PIPELINE_H_
#define PHISHEVO_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace phishevo::pipeline {

namespace fs = std::filesystem;

// Effective configuration. `json` holds every key (defaults < file < flags);
// relative paths from a file are resolved against the file's directory.
class RunConfig {
 public:
  static nlohmann::json defaults();
  // Validates keys and types and checks that every referenced path exists.
  static RunConfig from_json(nlohmann::json j);

  const nlohmann::json& json() const { return json_; }
  std::string hash() const;  // sha256 of the canonical dump
  std::uint64_t seed() const { return json_.at("seed").get<std::uint64_t>(); }
  fs::path path(std::string_view key) const;
  std::vector<fs::path> corpus_paths() const;
  fs::path output_dir() const { return path("output_dir"); }

 private:
  nlohmann::json json_;
};

// `overrides` are "dotted.key=value" strings; values parse as JSON and fall
// back to plain strings.
RunConfig load_config(const std::optional<fs::path>& file,
                      const std::vector<std::string>& overrides = {});

enum class Step { kPrep, kGan, kGenerate, kValidate, kAnalyze, kAttack, kLoopback };

std::string_view step_name(Step s);
// "ABCD" style phase letters to steps. A = prep+gan+generate, B = validate,
// C = analyze+attack, D = loopback.
std::set<Step> steps_for_phases(std::string_view phases);

struct PhaseRecord {
  std::string name;
  std::map<std::string, std::string> inputs;   // artifact -> sha256
  std::map<std::string, std::string> outputs;  // artifact -> sha256
  double seconds = 0.0;
};

struct RunManifest {
  std::string tool_version;
  std::string config_hash;
  std::string run_name;
  std::vector<PhaseRecord> phases;
  std::string status;  // "complete" or "failed"
  std::string error;

  // Union of all phase outputs.
  std::map<std::string, std::string> artifact_hashes() const;
  nlohmann::ordered_json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

struct RunOptions {
  std::set<Step> steps;
  // Earlier run directory that supplies inputs not produced by this run.
  std::optional<fs::path> from;
};

struct RunResult {
  fs::path run_dir;
  RunManifest manifest;
};

// Creates <output_dir>/run-NNNN and runs the steps in order. On failure the
// manifest of the completed steps is written before the error propagates.
RunResult run_pipeline(const RunConfig& config, const RunOptions& options);

// Runs `iterations` chained runs; each run after the first loads the
// next_config.json written by the previous run's loop-back step.
std::vector<RunResult> run_iterations(const RunConfig& config, const RunOptions& options,
                                      std::size_t iterations);

// Writes report.json and report.txt into the run directory and returns the
// JSON. Contains no timings, so identical runs give identical reports.
nlohmann::ordered_json emit_report(const fs::path& run_dir);
std::string render_report_text(const nlohmann::ordered_json& report);

}  // namespace phishevo::pipeline

#endif  // PHISHEVO_PIPELINE_H_
