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

#include "phishevo/corpus.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_set>

#include "phishevo/common.h"

namespace phishevo::corpus {

std::string_view label_name(Label label) {
  switch (label) {
    case Label::kPhishing: return "phishing";
    case Label::kBenign: return "benign";
    case Label::kGenerated: return "generated";
  }
  return "unknown";
}

Label parse_label(std::string_view name) {
  if (name == "phishing") return Label::kPhishing;
  if (name == "benign") return Label::kBenign;
  if (name == "generated") return Label::kGenerated;
  throw ParseError("unknown label '" + std::string(name) + "'");
}

std::string_view origin_name(Origin origin) {
  switch (origin) {
    case Origin::kIngested: return "ingested";
    case Origin::kGenerated: return "generated";
    case Origin::kPerturbed: return "perturbed";
  }
  return "unknown";
}

Origin parse_origin(std::string_view name) {
  if (name == "ingested") return Origin::kIngested;
  if (name == "generated") return Origin::kGenerated;
  if (name == "perturbed") return Origin::kPerturbed;
  throw ParseError("unknown origin '" + std::string(name) + "'");
}

std::size_t whitespace_token_count(std::string_view body) {
  return count_whitespace_tokens(body);
}

EmailRecord::EmailRecord(std::string id, std::string source, Label label,
                         std::string body, Origin origin, const TokenCounter& counter)
    : id_(std::move(id)),
      source_(std::move(source)),
      label_(label),
      body_(std::move(body)),
      token_count_(counter(body_)),
      origin_(origin),
      meta_(nlohmann::json::object()) {}

EmailRecord EmailRecord::with_body(std::string body, const TokenCounter& counter) const {
  EmailRecord out = *this;
  out.body_ = std::move(body);
  out.token_count_ = counter(out.body_);
  return out;
}

EmailRecord EmailRecord::with_id(std::string id) const {
  EmailRecord out = *this;
  out.id_ = std::move(id);
  return out;
}

EmailRecord EmailRecord::with_origin(Origin origin) const {
  EmailRecord out = *this;
  out.origin_ = origin;
  return out;
}

nlohmann::ordered_json EmailRecord::to_json() const {
  nlohmann::ordered_json j;
  j["id"] = id_;
  j["source"] = source_;
  j["label"] = label_name(label_);
  j["body"] = body_;
  j["token_count"] = token_count_;
  j["origin"] = origin_name(origin_);
  if (!meta_.empty()) j["meta"] = meta_;
  return j;
}

EmailRecord EmailRecord::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("record is not a JSON object");
  for (const char* key : {"body", "label", "source"}) {
    if (!j.contains(key) || !j[key].is_string()) {
      throw ParseError(std::string("missing or non-string field '") + key + "'");
    }
  }
  const auto body = j["body"].get<std::string>();
  const auto source = j["source"].get<std::string>();
  const Label label = parse_label(j["label"].get<std::string>());
  std::string id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>()
                                                           : content_id(source, label, body);
  Origin origin = Origin::kIngested;
  if (j.contains("origin") && j["origin"].is_string()) {
    origin = parse_origin(j["origin"].get<std::string>());
  }
  EmailRecord rec(std::move(id), source, label, body, origin);
  if (j.contains("meta") && j["meta"].is_object()) rec.meta_ = j["meta"];
  return rec;
}

std::string content_id(std::string_view source, Label label, std::string_view body) {
  std::string key(source);
  key += '\n';
  key += label_name(label);
  key += '\n';
  key += body;
  return "e" + sha256_hex(key).substr(0, 16);
}

void CorpusManifest::record_stage(std::string_view stage, const Corpus& before,
                                  const Corpus& after) {
  std::map<std::string, StageCount> counts;
  for (const auto& r : before) ++counts[r.source()].before;
  for (const auto& r : after) ++counts[r.source()].after;
  for (auto& [source, c] : counts) {
    c.stage = std::string(stage);
    per_source[source].push_back(c);
  }
}

nlohmann::ordered_json CorpusManifest::to_json() const {
  nlohmann::ordered_json j;
  nlohmann::ordered_json sources = nlohmann::ordered_json::object();
  for (const auto& [source, stages] : per_source) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& s : stages) {
      arr.push_back({{"stage", s.stage}, {"before", s.before}, {"after", s.after}});
    }
    sources[source] = arr;
  }
  j["per_source"] = sources;
  j["malformed_skipped"] = malformed_skipped;
  j["dedup_removed"] = dedup_removed;
  j["similarity_removed"] = similarity_removed;
  j["train_size"] = train_size;
  j["eval_size"] = eval_size;
  return j;
}

IngestResult ingest_jsonl(const std::filesystem::path& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError(path, "corpus file not found");
  IngestResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      result.records.push_back(EmailRecord::from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      std::string problem =
          path.filename().string() + " line " + std::to_string(line_no) + ": " + e.what();
      if (strict) throw ParseError(problem);
      result.problems.push_back(std::move(problem));
      ++result.skipped;
    }
  }
  return result;
}

std::string to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& r : corpus) {
    out += r.to_json().dump();
    out += '\n';
  }
  return out;
}

void write_jsonl(const std::filesystem::path& path, const Corpus& corpus) {
  write_file(path, to_jsonl(corpus));
}

std::filesystem::path manifest_path_for(const std::filesystem::path& corpus_path) {
  auto p = corpus_path;
  p.replace_extension(".manifest.json");
  return p;
}

std::string normalize_body(std::string_view body) {
  std::string out;
  out.reserve(body.size());
  bool pending_space = false;
  for (unsigned char c : body) {
    if (std::isspace(c)) {
      pending_space = true;
      continue;
    }
    if (std::iscntrl(c)) continue;
    if (pending_space && !out.empty()) out += ' ';
    pending_space = false;
    out += static_cast<char>(c);
  }
  return out;
}

EmailRecord normalize_text(const EmailRecord& record) {
  return record.with_body(normalize_body(record.body()));
}

std::vector<std::uint64_t> shingle_hashes(std::string_view body, std::size_t k) {
  if (k == 0) throw ConfigError("shingle_size must be >= 1");
  const auto words = split_whitespace(body);
  std::vector<std::uint64_t> out;
  if (words.empty()) return out;
  auto hash_range = [&](std::size_t b, std::size_t e) {
    // FNV-1a over the words joined by a unit separator.
    std::uint64_t h = 1469598103934665603ULL;
    for (std::size_t i = b; i < e; ++i) {
      for (unsigned char c : words[i]) {
        h ^= c;
        h *= 1099511628211ULL;
      }
      h ^= 0x1F;
      h *= 1099511628211ULL;
    }
    return h;
  };
  if (words.size() < k) {
    out.push_back(hash_range(0, words.size()));
    return out;
  }
  for (std::size_t i = 0; i + k <= words.size(); ++i) out.push_back(hash_range(i, i + k));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double jaccard(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t i = 0, j = 0, common = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++common;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

DedupResult dedup(const Corpus& corpus, std::size_t shingle_size, double threshold) {
  if (shingle_size == 0) throw ConfigError("shingle_size must be >= 1");
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ConfigError("dedup threshold must be in [0,1]");
  }
  DedupResult result;
  std::unordered_set<std::string> seen;
  Corpus unique;
  for (const auto& r : corpus) {
    if (seen.insert(normalize_body(r.body())).second) {
      unique.push_back(r);
    } else {
      ++result.exact_removed;
    }
  }
  std::vector<std::vector<std::uint64_t>> shingles;
  shingles.reserve(unique.size());
  for (const auto& r : unique) shingles.push_back(shingle_hashes(normalize_body(r.body()), shingle_size));

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < unique.size(); ++i) {
    bool near_duplicate = false;
    for (std::size_t j : kept) {
      if (jaccard(shingles[i], shingles[j]) >= threshold) {
        near_duplicate = true;
        break;
      }
    }
    if (near_duplicate) {
      ++result.similar_removed;
    } else {
      kept.push_back(i);
      result.corpus.push_back(unique[i]);
    }
  }
  return result;
}

Corpus length_filter(const Corpus& corpus, std::size_t min_tokens, std::size_t max_tokens) {
  if (min_tokens > max_tokens) throw ConfigError("min_tokens must be <= max_tokens");
  Corpus out;
  for (const auto& r : corpus) {
    if (r.token_count() >= min_tokens && r.token_count() <= max_tokens) out.push_back(r);
  }
  return out;
}

Split split(const Corpus& corpus, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train_fraction must be in (0,1)");
  }
  if (corpus.size() < 2) throw ConfigError("split needs at least 2 records");
  const std::size_t n = corpus.size();
  const auto total_train = static_cast<std::size_t>(std::floor(n * train_fraction));

  std::map<Label, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[corpus[i].label()].push_back(i);

  Rng rng(seed);
  struct Quota {
    Label label;
    std::size_t take;
    double frac;
  };
  std::vector<Quota> quotas;
  std::size_t assigned = 0;
  for (auto& [label, idx] : groups) {
    rng.shuffle(idx);
    const double exact = static_cast<double>(idx.size()) * train_fraction;
    const auto take = static_cast<std::size_t>(std::floor(exact));
    quotas.push_back({label, take, exact - static_cast<double>(take)});
    assigned += take;
  }
  // Hand the leftover train slots to the largest fractional remainders.
  std::vector<std::size_t> order(quotas.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return quotas[a].frac > quotas[b].frac;
  });
  for (std::size_t i = 0; assigned < total_train && i < order.size(); ++i) {
    auto& q = quotas[order[i]];
    if (q.take < groups[q.label].size()) {
      ++q.take;
      ++assigned;
    }
  }

  std::vector<std::size_t> train_idx, eval_idx;
  for (const auto& q : quotas) {
    const auto& idx = groups[q.label];
    train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + static_cast<long>(q.take));
    eval_idx.insert(eval_idx.end(), idx.begin() + static_cast<long>(q.take), idx.end());
  }
  rng.shuffle(train_idx);
  rng.shuffle(eval_idx);
  Split out;
  for (auto i : train_idx) out.train.push_back(corpus[i]);
  for (auto i : eval_idx) out.eval.push_back(corpus[i]);
  return out;
}

}  // namespace phishevo::corpus
