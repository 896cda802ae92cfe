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

// Generation prompts: a three-section chat prompt (instruction, topic
// keywords, example emails) and the topic keyword registry that the
// loop-back phase grows between iterations.

#ifndef PHISHEVO_PROMPT_H_
#define PHISHEVO_PROMPT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "phishevo/common.h"
#include "phishevo/corpus.h"

namespace phishevo::prompt {

enum class Mode { kTrain, kInfer };

std::string_view mode_name(Mode mode);

// Keywords are lowercased and deduplicated (first occurrence wins).
struct TopicKeywordSet {
  std::string dominant;
  std::string topic;
  std::vector<std::string> keywords;

  static TopicKeywordSet make(std::string dominant, std::string topic,
                              const std::vector<std::string>& keywords);
};

struct PromptOptions {
  std::string instruction_header = "### Instruction";
  std::string topics_header = "### Topics";
  std::string emails_header = "### Emails";
  // "{label}" is replaced by the label name.
  std::string instruction_template =
      "You are a cybersecurity expert who studies social engineering. Write one "
      "realistic {label} email body. Follow the topic keywords and match the style "
      "of the example emails when they are given. Output only the email body.";
};

struct PromptBundle {
  std::string instruction;
  corpus::Label label = corpus::Label::kPhishing;
  TopicKeywordSet topics;
  std::vector<std::string> exemplars;  // always empty in infer mode
  Mode mode = Mode::kInfer;
};

struct RenderedPrompt {
  PromptBundle bundle;
  std::string text;    // full three-section rendering
  std::string system;  // instruction section
  std::string user;    // topics + exemplars sections

  // {"system": ..., "user": ...}
  nlohmann::ordered_json to_chat_json() const;
  // Stable short hash of the rendered text.
  std::string hash() const;
};

// Throws ConfigError on an empty keyword list, a label other than
// phishing/benign, or a train-mode prompt without exemplars.
RenderedPrompt build_prompt(corpus::Label label, const TopicKeywordSet& topics,
                            std::span<const std::string> exemplars, Mode mode,
                            const PromptOptions& options = {});

// Seeded choice of `count` distinct exemplars (fewer if the pool is smaller).
std::vector<std::string> sample_exemplars(std::span<const std::string> pool,
                                          std::size_t count, Rng& rng);

class TopicRegistry {
 public:
  const std::vector<TopicKeywordSet>& sets() const { return sets_; }
  std::size_t size() const { return sets_.size(); }
  bool empty() const { return sets_.empty(); }

  // Throws ConfigError if (dominant, topic) is already registered.
  void add(TopicKeywordSet set);
  // Exact (dominant, topic) lookup.
  const TopicKeywordSet* find(std::string_view dominant, std::string_view topic) const;
  // Every set whose dominant or topic name equals `name`.
  std::vector<const TopicKeywordSet*> lookup(std::string_view name) const;
  TopicKeywordSet* find_topic(std::string_view topic);

  std::string to_csv() const;

 private:
  std::vector<TopicKeywordSet> sets_;
};

// CSV with header dominant,topic,keywords; keywords separated by ';'.
TopicRegistry register_topics(const std::filesystem::path& path);
TopicRegistry parse_topics_csv(std::string_view text);

struct ExtractedTopic {
  std::string label;
  std::vector<std::string> keywords;
};

// Unions extracted keywords into matching topics (by topic name) and appends
// unseen topics under the "loopback" dominant family.
TopicRegistry merge_loopback(TopicRegistry registry,
                             std::span<const ExtractedTopic> extracted);

nlohmann::ordered_json extracted_to_json(std::span<const ExtractedTopic> extracted);
std::vector<ExtractedTopic> extracted_from_json(const nlohmann::json& j);

}  // namespace phishevo::prompt

#endif  // PHISHEVO_PROMPT_H_
