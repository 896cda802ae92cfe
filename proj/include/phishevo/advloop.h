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

// Adversarial refinement between a generator backend and the recurrent
// discriminator. The discriminator is trained with binary cross-entropy
// (real -> 1, generated -> 0). The generator side has no weights to update:
// the highest-scoring generated samples become exemplars of the next round's
// prompt, which steers both remote models and the Markov stub.

#ifndef PHISHEVO_ADVLOOP_H_
#define PHISHEVO_ADVLOOP_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "phishevo/corpus.h"
#include "phishevo/detector.h"
#include "phishevo/llm_client.h"
#include "phishevo/prompt.h"

namespace phishevo::advloop {

struct StepLosses {
  double real_loss = 0.0;       // mean -log D(x) over the real batch
  double generated_loss = 0.0;  // mean -log(1 - D(x)) over the generated batch
};

// One balanced BCE update; losses are measured before the update.
StepLosses discriminator_step(detector::TextClassifier& discriminator,
                              std::span<const std::string> real,
                              std::span<const std::string> generated, double lr,
                              double clip_norm = 5.0);

struct ScoredRecord {
  corpus::EmailRecord record;
  double score;
};

// The top_k generated records by discriminator score, ties by id.
std::vector<ScoredRecord> generator_feedback(const corpus::Corpus& generated,
                                             const detector::ProbabilityModel& discriminator,
                                             std::size_t top_k);

struct RoundReport {
  std::size_t round = 0;
  double real_loss = 0.0;
  double generated_loss = 0.0;
  double mean_generated_score = 0.0;  // under the discriminator at round start
  double mean_real_score = 0.0;
  std::vector<std::string> feedback_ids;
  std::size_t generated_batch_size = 0;

  nlohmann::ordered_json to_json() const;
  static RoundReport from_json(const nlohmann::json& j);
  friend bool operator==(const RoundReport&, const RoundReport&) = default;
};

struct GanConfig {
  std::size_t rounds = 5;
  std::size_t batch = 16;
  std::size_t top_k = 4;
  std::size_t steps_per_round = 5;
  std::size_t exemplars_per_prompt = 3;
  double lr = 0.05;
  double clip_norm = 5.0;
  std::uint64_t seed = 0;
  corpus::Label label = corpus::Label::kPhishing;
  prompt::PromptOptions prompt_options;
};

struct GanResult {
  std::vector<RoundReport> reports;
  std::vector<ScoredRecord> feedback;  // final round
  corpus::Corpus last_batch;
};

// Runs `rounds` rounds. When `reports_path` is set each report is appended
// as a JSONL line as soon as its round finishes, so a backend failure leaves
// the completed rounds on disk before the error propagates.
GanResult run_gan(llm::GeneratorBackend& generator, detector::TextClassifier& discriminator,
                  const corpus::Corpus& real, const prompt::TopicRegistry& topics,
                  const GanConfig& config,
                  const std::optional<std::filesystem::path>& reports_path = std::nullopt);

std::vector<RoundReport> read_round_reports(const std::filesystem::path& path);

}  // namespace phishevo::advloop

#endif  // PHISHEVO_ADVLOOP_H_
