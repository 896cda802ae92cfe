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

#include "phishevo/prompt.h"

#include <algorithm>
#include <sstream>
#include <unordered_set>

namespace phishevo::prompt {

std::string_view mode_name(Mode mode) { return mode == Mode::kTrain ? "train" : "infer"; }

TopicKeywordSet TopicKeywordSet::make(std::string dominant, std::string topic,
                                      const std::vector<std::string>& keywords) {
  TopicKeywordSet set{trim(dominant), trim(topic), {}};
  std::unordered_set<std::string> seen;
  for (const auto& k : keywords) {
    auto w = to_lower(trim(k));
    if (!w.empty() && seen.insert(w).second) set.keywords.push_back(std::move(w));
  }
  return set;
}

nlohmann::ordered_json RenderedPrompt::to_chat_json() const {
  nlohmann::ordered_json j;
  j["system"] = system;
  j["user"] = user;
  return j;
}

std::string RenderedPrompt::hash() const { return sha256_hex(text).substr(0, 16); }

RenderedPrompt build_prompt(corpus::Label label, const TopicKeywordSet& topics,
                            std::span<const std::string> exemplars, Mode mode,
                            const PromptOptions& options) {
  if (label == corpus::Label::kGenerated) {
    throw ConfigError("prompt label must be phishing or benign");
  }
  if (topics.keywords.empty()) {
    throw ConfigError("topic '" + topics.topic + "' has an empty keyword list");
  }
  if (mode == Mode::kTrain && exemplars.empty()) {
    throw ConfigError("train-mode prompt requires at least one exemplar");
  }

  RenderedPrompt out;
  out.bundle.label = label;
  out.bundle.topics = topics;
  out.bundle.mode = mode;
  if (mode == Mode::kTrain) out.bundle.exemplars.assign(exemplars.begin(), exemplars.end());

  std::string instruction = options.instruction_template;
  const std::string label_str(corpus::label_name(label));
  for (std::size_t pos; (pos = instruction.find("{label}")) != std::string::npos;) {
    instruction.replace(pos, 7, label_str);
  }
  out.bundle.instruction = instruction;

  std::ostringstream sys;
  sys << options.instruction_header << "\n" << instruction << "\n";
  std::ostringstream usr;
  usr << options.topics_header << "\n";
  usr << "Topic: " << topics.dominant << " / " << topics.topic << "\n";
  usr << "Keywords: " << join(topics.keywords, ", ") << "\n";
  if (mode == Mode::kTrain) {
    usr << "\n" << options.emails_header << "\n";
    for (std::size_t i = 0; i < out.bundle.exemplars.size(); ++i) {
      usr << "Example " << (i + 1) << ":\n" << out.bundle.exemplars[i] << "\n";
    }
  }
  out.system = sys.str();
  out.user = usr.str();
  out.text = out.system + "\n" + out.user;
  return out;
}

std::vector<std::string> sample_exemplars(std::span<const std::string> pool,
                                          std::size_t count, Rng& rng) {
  std::vector<std::size_t> idx(pool.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  rng.shuffle(idx);
  idx.resize(std::min(count, idx.size()));
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(pool[i]);
  return out;
}

void TopicRegistry::add(TopicKeywordSet set) {
  if (find(set.dominant, set.topic) != nullptr) {
    throw ConfigError("duplicate topic (" + set.dominant + ", " + set.topic + ")");
  }
  sets_.push_back(std::move(set));
}

const TopicKeywordSet* TopicRegistry::find(std::string_view dominant,
                                           std::string_view topic) const {
  for (const auto& s : sets_) {
    if (s.dominant == dominant && s.topic == topic) return &s;
  }
  return nullptr;
}

std::vector<const TopicKeywordSet*> TopicRegistry::lookup(std::string_view name) const {
  std::vector<const TopicKeywordSet*> out;
  for (const auto& s : sets_) {
    if (s.dominant == name || s.topic == name) out.push_back(&s);
  }
  return out;
}

TopicKeywordSet* TopicRegistry::find_topic(std::string_view topic) {
  for (auto& s : sets_) {
    if (s.topic == topic) return &s;
  }
  return nullptr;
}

std::string TopicRegistry::to_csv() const {
  std::string out = "dominant,topic,keywords\n";
  for (const auto& s : sets_) {
    out += csv_escape(s.dominant) + "," + csv_escape(s.topic) + "," +
           csv_escape(join(s.keywords, ";")) + "\n";
  }
  return out;
}

TopicRegistry parse_topics_csv(std::string_view text) {
  TopicRegistry registry;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    auto fields = parse_csv_line(line);
    if (fields.size() != 3) {
      throw ParseError("topics line " + std::to_string(line_no) + ": expected 3 columns");
    }
    if (to_lower(trim(fields[0])) == "dominant" && to_lower(trim(fields[1])) == "topic") {
      continue;  // header
    }
    auto set = TopicKeywordSet::make(fields[0], fields[1], split(fields[2], ';'));
    if (set.keywords.empty()) {
      throw ParseError("topics line " + std::to_string(line_no) + ": empty keyword cell for (" +
                       set.dominant + ", " + set.topic + ")");
    }
    if (registry.find(set.dominant, set.topic) != nullptr) {
      throw ParseError("topics line " + std::to_string(line_no) + ": duplicate topic (" +
                       set.dominant + ", " + set.topic + ")");
    }
    registry.add(std::move(set));
  }
  return registry;
}

TopicRegistry register_topics(const std::filesystem::path& path) {
  return parse_topics_csv(read_file(path));
}

TopicRegistry merge_loopback(TopicRegistry registry,
                             std::span<const ExtractedTopic> extracted) {
  for (const auto& e : extracted) {
    auto incoming = TopicKeywordSet::make("loopback", e.label, e.keywords);
    if (incoming.keywords.empty()) {
      throw ConfigError("extracted topic '" + e.label + "' has no keywords");
    }
    if (auto* existing = registry.find_topic(incoming.topic)) {
      for (auto& k : incoming.keywords) {
        if (std::find(existing->keywords.begin(), existing->keywords.end(), k) ==
            existing->keywords.end()) {
          existing->keywords.push_back(k);
        }
      }
    } else {
      registry.add(std::move(incoming));
    }
  }
  return registry;
}

nlohmann::ordered_json extracted_to_json(std::span<const ExtractedTopic> extracted) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& e : extracted) arr.push_back({{"label", e.label}, {"keywords", e.keywords}});
  return arr;
}

std::vector<ExtractedTopic> extracted_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("extracted topics must be a JSON array");
  std::vector<ExtractedTopic> out;
  for (const auto& e : j) {
    out.push_back({e.at("label").get<std::string>(),
                   e.at("keywords").get<std::vector<std::string>>()});
  }
  return out;
}

}  // namespace phishevo::prompt
