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

// Analyzer-based validation of generated emails: verdict parsing, the
// realism score summary (PAS) with its retention rule, and k-fold
// reliability checks of the analyzer itself.

#ifndef PHISHEVO_VALIDATE_H_
#define PHISHEVO_VALIDATE_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "phishevo/corpus.h"
#include "phishevo/detector.h"
#include "phishevo/llm_client.h"

namespace phishevo::validate {

class VerdictRangeError : public ParseError {
 public:
  using ParseError::ParseError;
};

struct AnalyzerVerdict {
  bool is_phishing = false;
  int phishing_score = 0;  // 0..10
  std::vector<std::string> rationales;
  std::string raw;
};

// Parses the last top-level JSON object in `text`. Accepts both
// "rationales" and "rationals". Throws ParseError (no object, missing keys)
// or VerdictRangeError (score outside 0..10).
AnalyzerVerdict parse_verdict(std::string_view text);

// Default analysis template; "{{EMAIL_BODY}}" marks the insertion point.
std::string default_analysis_template();
std::string render_analysis_prompt(std::string_view tmpl, std::string_view body);

struct AnalyzerOptions {
  std::string model = "gpt-3.5-turbo";
  double temperature = 0.0;
  int max_tokens = 512;
};

// One chat call; on a parse failure the analyzer is re-prompted once.
AnalyzerVerdict analyze_email(const corpus::EmailRecord& record, llm::CompletionBackend& backend,
                              std::string_view analysis_template,
                              const AnalyzerOptions& options = {});

struct IdentifiedVerdict {
  std::string id;
  AnalyzerVerdict verdict;
};

nlohmann::ordered_json verdict_to_json(const IdentifiedVerdict& v);

struct PasSummary {
  std::array<std::size_t, 11> histogram{};
  double frac_at_least_6 = 0.0;
  double frac_at_least_8 = 0.0;
  double frac_below_5 = 0.0;
  std::size_t score_5_count = 0;  // neither realistic nor poor
  std::vector<std::string> retained_ids;
  std::size_t total = 0;

  nlohmann::ordered_json to_json() const;
};

constexpr int kRetentionScore = 6;

// Retains is_phishing && score >= retention_score.
PasSummary pas_summary(std::span<const IdentifiedVerdict> verdicts,
                       int retention_score = kRetentionScore);

struct FoldResult {
  std::vector<std::string> member_ids;
  detector::ConfusionMetrics metrics;
  std::optional<double> f1;
  std::optional<double> f2;
};

struct CrossValidation {
  std::vector<FoldResult> folds;
  std::optional<double> mean_f1;  // over folds where defined
  std::optional<double> mean_f2;
  std::optional<double> mean_precision;
  std::optional<double> mean_recall;
  double mean_accuracy = 0.0;

  nlohmann::ordered_json to_json() const;
};

// Stratified k-fold split by label; positives are phishing records.
std::vector<std::vector<std::size_t>> stratified_folds(const corpus::Corpus& data,
                                                       std::size_t k, std::uint64_t seed);

CrossValidation cross_validate(const corpus::Corpus& data, std::size_t k,
                               llm::CompletionBackend& backend, std::uint64_t seed,
                               std::string_view analysis_template,
                               const AnalyzerOptions& options = {});

// Offline analyzer: scores the email by persuasion-lexicon hits and phishing
// cue words found in the prompt's email body, and answers with verdict JSON.
class LexiconAnalyzerStub final : public llm::CompletionBackend {
 public:
  explicit LexiconAnalyzerStub(std::vector<std::string> cue_words);
  std::string complete(const llm::ChatRequest& request) override;
  std::string name() const override { return "lexicon-analyzer-stub"; }

 private:
  std::vector<std::string> cue_words_;
};

}  // namespace phishevo::validate

#endif  // PHISHEVO_VALIDATE_H_
