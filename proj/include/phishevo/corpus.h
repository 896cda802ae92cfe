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

// Email corpus ingestion and cleaning: JSONL I/O, normalization, exact and
// near-duplicate removal, length filtering and stratified splitting.

#ifndef PHISHEVO_CORPUS_H_
#define PHISHEVO_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace phishevo::corpus {

enum class Label { kPhishing, kBenign, kGenerated };
enum class Origin { kIngested, kGenerated, kPerturbed };

std::string_view label_name(Label label);
Label parse_label(std::string_view name);
std::string_view origin_name(Origin origin);
Origin parse_origin(std::string_view name);

// Counts tokens of a body. The default counts whitespace-delimited words.
using TokenCounter = std::function<std::size_t(std::string_view)>;
std::size_t whitespace_token_count(std::string_view body);

// One email. The label is fixed at construction; the body can only change
// by deriving a new record, which recomputes the token count.
class EmailRecord {
 public:
  EmailRecord(std::string id, std::string source, Label label, std::string body,
              Origin origin, const TokenCounter& counter = whitespace_token_count);

  const std::string& id() const { return id_; }
  const std::string& source() const { return source_; }
  Label label() const { return label_; }
  const std::string& body() const { return body_; }
  std::size_t token_count() const { return token_count_; }
  Origin origin() const { return origin_; }

  // Free-form generation/perturbation metadata; serialized when non-empty.
  const nlohmann::json& meta() const { return meta_; }
  nlohmann::json& mutable_meta() { return meta_; }

  EmailRecord with_body(std::string body,
                        const TokenCounter& counter = whitespace_token_count) const;
  EmailRecord with_id(std::string id) const;
  EmailRecord with_origin(Origin origin) const;

  nlohmann::ordered_json to_json() const;
  static EmailRecord from_json(const nlohmann::json& j);

  friend bool operator==(const EmailRecord&, const EmailRecord&) = default;

 private:
  std::string id_;
  std::string source_;
  Label label_;
  std::string body_;
  std::size_t token_count_;
  Origin origin_;
  nlohmann::json meta_;
};

using Corpus = std::vector<EmailRecord>;

// Deterministic id from the record content.
std::string content_id(std::string_view source, Label label, std::string_view body);

struct StageCount {
  std::string stage;
  std::size_t before = 0;
  std::size_t after = 0;
};

// Per-source counts for every processing stage plus removal tallies.
struct CorpusManifest {
  std::map<std::string, std::vector<StageCount>> per_source;
  std::size_t malformed_skipped = 0;
  std::size_t dedup_removed = 0;
  std::size_t similarity_removed = 0;
  std::size_t train_size = 0;
  std::size_t eval_size = 0;

  // Appends a stage row for every source seen in either corpus.
  void record_stage(std::string_view stage, const Corpus& before, const Corpus& after);
  nlohmann::ordered_json to_json() const;
};

struct IngestResult {
  Corpus records;
  std::size_t skipped = 0;
  std::vector<std::string> problems;  // "line N: reason"
};

// Reads one JSON object per line ({body, label, source}, optional id/origin).
// Strict mode throws ParseError on the first malformed line.
IngestResult ingest_jsonl(const std::filesystem::path& path, bool strict = true);

void write_jsonl(const std::filesystem::path& path, const Corpus& corpus);
std::string to_jsonl(const Corpus& corpus);
// Path of the manifest that sits beside a corpus file.
std::filesystem::path manifest_path_for(const std::filesystem::path& corpus_path);

// Collapses whitespace runs to one space, strips control characters, trims.
std::string normalize_body(std::string_view body);
EmailRecord normalize_text(const EmailRecord& record);

// Sorted, unique hashes of word k-shingles. Bodies shorter than k yield one
// shingle covering the whole body; empty bodies yield none.
std::vector<std::uint64_t> shingle_hashes(std::string_view body, std::size_t k);
// Jaccard similarity of two sorted unique sets; 1 when both are empty.
double jaccard(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b);

struct DedupResult {
  Corpus corpus;
  std::size_t exact_removed = 0;
  std::size_t similar_removed = 0;
};

DedupResult dedup(const Corpus& corpus, std::size_t shingle_size = 3,
                  double threshold = 0.8);

Corpus length_filter(const Corpus& corpus, std::size_t min_tokens = 64,
                     std::size_t max_tokens = 512);

struct Split {
  Corpus train;
  Corpus eval;
};

// Stratified by label; train size is floor(n * train_fraction).
Split split(const Corpus& corpus, double train_fraction, std::uint64_t seed);

}  // namespace phishevo::corpus

#endif  // PHISHEVO_CORPUS_H_
