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

// Black-box, score-based evasion attacks against a detector and the
// before/after robustness report.

#ifndef PHISHEVO_ATTACKS_H_
#define PHISHEVO_ATTACKS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "phishevo/corpus.h"
#include "phishevo/detector.h"

namespace phishevo::attacks {

enum class Method { kDeepWordBug, kPruthi, kPwws, kTextFoolerLike };

std::string_view method_name(Method m);  // "deepwordbug", "pruthi", "pwws", "textfooler_like"
Method parse_method(std::string_view name);

struct PerturbationBudget {
  double max_word_fraction = 0.15;  // 0 disables edits
  std::size_t max_queries = 1000;
  double similarity_floor = 0.5;  // character-bigram Jaccard for synonym swaps

  void validate() const;
  // ceil(max_word_fraction * word_count)
  std::size_t max_edits(std::size_t word_count) const;
};

using SynonymLexicon = std::map<std::string, std::vector<std::string>>;

SynonymLexicon parse_synonyms(const nlohmann::json& j);
SynonymLexicon load_synonyms(const std::filesystem::path& path);

// Jaccard similarity of the character-bigram sets of two words (lowercased).
double bigram_jaccard(std::string_view a, std::string_view b);

struct AttackOutcome {
  std::string original_id;
  std::string original_body;
  std::string perturbed_body;
  Method method = Method::kDeepWordBug;
  std::size_t queries = 0;
  std::size_t words_edited = 0;
  double original_probability = 0.0;
  double perturbed_probability = 0.0;
  bool success = false;  // positive before, negative after

  nlohmann::ordered_json to_json() const;
};

struct TokenImportance {
  std::size_t position;  // whitespace-token index
  double importance;     // p(body) - p(body without the token)
};

// Sorted by importance descending, ties by position.
std::vector<TokenImportance> token_saliency(std::string_view body,
                                            const detector::ProbabilityModel& detector);

struct AttackContext {
  const SynonymLexicon* synonyms = nullptr;  // required by pwws and textfooler_like
  double threshold = 0.5;                    // decision = probability >= threshold
};

// Greedy attack over saliency-ranked tokens. Never issues more than
// budget.max_queries detector calls and never edits more than
// budget.max_edits(word count) words. A body the detector already rejects is
// returned unchanged with success = false.
AttackOutcome perturb(std::string_view body, Method method,
                      const detector::ProbabilityModel& detector,
                      const PerturbationBudget& budget, std::uint64_t seed,
                      const AttackContext& context = {});

// successes / total
double evaluate_asr(std::span<const AttackOutcome> outcomes);

struct RobustnessRow {
  std::string model;
  std::string dataset;
  Method method = Method::kDeepWordBug;
  double acc = 0.0;
  std::optional<double> f1;
  double eva_acc = 0.0;
  std::optional<double> eva_f1;
  double asr_percent = 0.0;
  std::size_t attacked = 0;
};

struct RobustnessInput {
  const detector::ProbabilityModel* detector = nullptr;
  std::string name;
};

struct RobustnessReport {
  std::vector<RobustnessRow> rows;
  std::vector<AttackOutcome> outcomes;

  // Columns: model, dataset, method, Acc, F1, EVA-Acc, EVA-F1, ASR_percent.
  std::string to_csv() const;
  nlohmann::ordered_json to_json() const;
};

// Attacks every phishing record the detector flags. Clean metrics come
// from detector::evaluate on `eval`; adversarial metrics from the same
// corpus with attacked bodies replaced by their perturbations.
RobustnessReport robustness_report(std::span<const RobustnessInput> detectors,
                                   const corpus::Corpus& eval, std::string_view dataset,
                                   std::span<const Method> methods,
                                   const PerturbationBudget& budget, std::uint64_t seed,
                                   const AttackContext& context = {});

// Perturbed bodies of successful attacks, labeled positive, for adversarial
// fine-tuning.
std::vector<detector::LabeledText> adversarial_examples(std::span<const AttackOutcome> outcomes);

}  // namespace phishevo::attacks

#endif  // PHISHEVO_ATTACKS_H_
