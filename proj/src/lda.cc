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

#include "phishevo/lda.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace phishevo::textstats {

LdaModel LdaModel::fit(std::span<const std::string> docs, const LdaConfig& config) {
  std::vector<std::vector<std::string>> tokenized;
  tokenized.reserve(docs.size());
  for (const auto& d : docs) tokenized.push_back(analysis_tokens(d));
  return fit_tokens(tokenized, config);
}

LdaModel LdaModel::fit_tokens(const std::vector<std::vector<std::string>>& docs,
                              const LdaConfig& config) {
  if (config.k < 1) throw ConfigError("LDA needs K >= 1");
  if (docs.empty()) throw ConfigError("LDA corpus is empty");
  if (config.beta <= 0) throw ConfigError("LDA beta must be > 0");
  LdaModel m;
  m.k_ = config.k;
  m.alpha_ = config.alpha.value_or(50.0 / static_cast<double>(config.k));
  if (m.alpha_ <= 0) throw ConfigError("LDA alpha must be > 0");
  m.beta_ = config.beta;
  m.seed_ = config.seed;

  std::set<std::string> vocab;
  for (const auto& d : docs) vocab.insert(d.begin(), d.end());
  if (vocab.empty()) throw ConfigError("LDA corpus has no tokens");
  m.vocab_.assign(vocab.begin(), vocab.end());
  if (m.k_ > m.vocab_.size()) {
    m.warnings_.push_back("K=" + std::to_string(m.k_) + " exceeds the " +
                          std::to_string(m.vocab_.size()) + " distinct tokens");
  }
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < m.vocab_.size(); ++i) index[m.vocab_[i]] = i;

  Rng rng(config.seed);
  m.doc_topic_.assign(docs.size(), std::vector<std::size_t>(m.k_, 0));
  m.topic_word_.assign(m.k_, std::vector<std::size_t>(m.vocab_.size(), 0));
  m.topic_total_.assign(m.k_, 0);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    std::vector<std::size_t> words, topics;
    for (const auto& t : docs[d]) {
      const std::size_t w = index[t];
      const auto z = static_cast<std::size_t>(rng.uniform_index(m.k_));
      words.push_back(w);
      topics.push_back(z);
      ++m.doc_topic_[d][z];
      ++m.topic_word_[z][w];
      ++m.topic_total_[z];
      ++m.token_count_;
    }
    m.w_.push_back(std::move(words));
    m.z_.push_back(std::move(topics));
  }
  for (std::size_t it = 1; it <= config.iters; ++it) {
    m.sweep(rng);
    if (config.on_sweep) config.on_sweep(it, m);
  }
  return m;
}

void LdaModel::sweep(Rng& rng) {
  const double vbeta = static_cast<double>(vocab_.size()) * beta_;
  std::vector<double> cumulative(k_);
  for (std::size_t d = 0; d < w_.size(); ++d) {
    auto& dt = doc_topic_[d];
    for (std::size_t i = 0; i < w_[d].size(); ++i) {
      const std::size_t w = w_[d][i];
      std::size_t z = z_[d][i];
      --dt[z];
      --topic_word_[z][w];
      --topic_total_[z];
      double total = 0.0;
      for (std::size_t k = 0; k < k_; ++k) {
        total += (static_cast<double>(dt[k]) + alpha_) *
                 (static_cast<double>(topic_word_[k][w]) + beta_) /
                 (static_cast<double>(topic_total_[k]) + vbeta);
        cumulative[k] = total;
      }
      const double u = rng.uniform01() * total;
      z = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                   cumulative.begin());
      if (z >= k_) z = k_ - 1;
      z_[d][i] = z;
      ++dt[z];
      ++topic_word_[z][w];
      ++topic_total_[z];
    }
  }
}

std::vector<double> LdaModel::topic_word_distribution(std::size_t topic) const {
  const double den =
      static_cast<double>(topic_total_.at(topic)) + static_cast<double>(vocab_.size()) * beta_;
  std::vector<double> p(vocab_.size());
  for (std::size_t w = 0; w < vocab_.size(); ++w) {
    p[w] = (static_cast<double>(topic_word_[topic][w]) + beta_) / den;
  }
  return p;
}

std::vector<double> LdaModel::doc_topic_distribution(std::size_t doc) const {
  const auto& dt = doc_topic_.at(doc);
  const double den = static_cast<double>(w_[doc].size()) + static_cast<double>(k_) * alpha_;
  std::vector<double> p(k_);
  for (std::size_t k = 0; k < k_; ++k) p[k] = (static_cast<double>(dt[k]) + alpha_) / den;
  return p;
}

std::vector<std::string> LdaModel::top_words(std::size_t topic, std::size_t n) const {
  const auto& counts = topic_word_.at(topic);
  std::vector<std::size_t> order(vocab_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(n, order.size()); ++i) out.push_back(vocab_[order[i]]);
  return out;
}

bool LdaModel::counts_consistent() const {
  std::vector<std::vector<std::size_t>> dt(w_.size(), std::vector<std::size_t>(k_, 0));
  std::vector<std::vector<std::size_t>> tw(k_, std::vector<std::size_t>(vocab_.size(), 0));
  std::vector<std::size_t> tt(k_, 0);
  std::size_t tokens = 0;
  for (std::size_t d = 0; d < w_.size(); ++d) {
    for (std::size_t i = 0; i < w_[d].size(); ++i) {
      ++dt[d][z_[d][i]];
      ++tw[z_[d][i]][w_[d][i]];
      ++tt[z_[d][i]];
      ++tokens;
    }
  }
  return tokens == token_count_ &&
         std::accumulate(topic_total_.begin(), topic_total_.end(), std::size_t{0}) == tokens &&
         dt == doc_topic_ && tw == topic_word_ && tt == topic_total_;
}

nlohmann::ordered_json LdaModel::to_json() const {
  nlohmann::ordered_json j;
  j["k"] = k_;
  j["alpha"] = alpha_;
  j["beta"] = beta_;
  j["seed"] = seed_;
  j["vocabulary"] = vocab_;
  j["doc_topic"] = doc_topic_;
  j["topic_word"] = topic_word_;
  j["topic_total"] = topic_total_;
  return j;
}

double coherence_npmi(const std::vector<std::vector<std::string>>& topics,
                      std::span<const std::string> reference_docs, std::size_t top_n) {
  if (reference_docs.empty()) throw ConfigError("coherence needs a non-empty reference corpus");
  if (topics.empty()) throw ConfigError("coherence needs at least one topic");
  std::vector<std::set<std::string>> doc_sets;
  for (const auto& d : reference_docs) {
    auto t = analysis_tokens(d);
    doc_sets.emplace_back(t.begin(), t.end());
  }
  const double n = static_cast<double>(doc_sets.size());
  auto doc_count = [&](const std::string& a, const std::string* b) {
    std::size_t c = 0;
    for (const auto& s : doc_sets) {
      if (s.count(a) && (!b || s.count(*b))) ++c;
    }
    return static_cast<double>(c);
  };

  double total = 0.0;
  for (const auto& topic : topics) {
    std::vector<std::string> words;
    for (const auto& w : topic) {
      if (words.size() == top_n) break;
      auto t = analysis_tokens(w);
      words.push_back(t.empty() ? to_lower(w) : t[0]);
    }
    // Order-independent summation, so equal word sets give equal scores.
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    if (words.size() < 2) throw ConfigError("each topic needs at least 2 distinct top words");
    std::vector<double> p(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) p[i] = (doc_count(words[i], nullptr) + 1.0) / (n + 2.0);
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < words.size(); ++i) {
      for (std::size_t j = i + 1; j < words.size(); ++j) {
        const double pij = (doc_count(words[i], &words[j]) + 1.0) / (n + 2.0);
        const double denom = -std::log(pij);
        sum += denom > 0 ? std::log(pij / (p[i] * p[j])) / denom : 1.0;
        ++pairs;
      }
    }
    total += sum / static_cast<double>(pairs);
  }
  const double mean = total / static_cast<double>(topics.size());
  return std::clamp((mean + 1.0) / 2.0, 0.0, 1.0);
}

std::string SelectKResult::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "k,coherence,selected\n";
  for (const auto& row : table) {
    out << row.k << "," << row.coherence << "," << (row.k == best_k ? 1 : 0) << "\n";
  }
  return out.str();
}

SelectKResult select_k(std::span<const std::string> docs, std::span<const std::size_t> ks,
                       std::uint64_t seed, std::size_t iters, std::size_t top_n) {
  if (ks.empty()) throw ConfigError("select_k needs a non-empty K range");
  std::vector<std::size_t> sorted(ks.begin(), ks.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  SelectKResult result;
  double best = -1.0;
  for (std::size_t k : sorted) {
    LdaConfig cfg;
    cfg.k = k;
    cfg.iters = iters;
    cfg.seed = derive_seed(seed, k);
    const auto model = LdaModel::fit(docs, cfg);
    std::vector<std::vector<std::string>> topics;
    for (std::size_t t = 0; t < k; ++t) topics.push_back(model.top_words(t, top_n));
    const double c = coherence_npmi(topics, docs, top_n);
    result.table.push_back({k, c});
    if (c > best + kCoherenceTieEps) {
      best = c;
      result.best_k = k;
    }
  }
  return result;
}

}  // namespace phishevo::textstats
