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

// Collapsed Gibbs LDA, NPMI topic coherence and coherence-based choice of
// the topic count.

#ifndef PHISHEVO_LDA_H_
#define PHISHEVO_LDA_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "phishevo/common.h"

namespace phishevo::textstats {

class LdaModel;

struct LdaConfig {
  std::size_t k = 2;
  std::size_t iters = 500;
  std::optional<double> alpha;  // defaults to 50/k
  double beta = 0.01;
  std::uint64_t seed = 0;
  // Called after every sweep (sweep index is 1-based).
  std::function<void(std::size_t, const LdaModel&)> on_sweep;
};

class LdaModel {
 public:
  static LdaModel fit(std::span<const std::string> docs, const LdaConfig& config);
  static LdaModel fit_tokens(const std::vector<std::vector<std::string>>& docs,
                             const LdaConfig& config);

  std::size_t k() const { return k_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::string>& vocabulary() const { return vocab_; }
  std::size_t token_count() const { return token_count_; }

  // Dense count tables: doc_topic[d][k], topic_word[k][w], topic_total[k].
  const std::vector<std::vector<std::size_t>>& doc_topic() const { return doc_topic_; }
  const std::vector<std::vector<std::size_t>>& topic_word() const { return topic_word_; }
  const std::vector<std::size_t>& topic_total() const { return topic_total_; }
  // Topic of every token, per document, as word and topic indices.
  const std::vector<std::vector<std::size_t>>& assignments() const { return z_; }
  const std::vector<std::vector<std::size_t>>& word_ids() const { return w_; }

  // (n_kw + beta) / (n_k + V beta)
  std::vector<double> topic_word_distribution(std::size_t topic) const;
  // (n_dk + alpha) / (n_d + K alpha)
  std::vector<double> doc_topic_distribution(std::size_t doc) const;
  // Highest-probability words, ties broken by vocabulary order.
  std::vector<std::string> top_words(std::size_t topic, std::size_t n) const;
  // Table totals agree with the per-token assignments.
  bool counts_consistent() const;

  const std::vector<std::string>& warnings() const { return warnings_; }
  nlohmann::ordered_json to_json() const;

 private:
  void sweep(Rng& rng);

  std::size_t k_ = 0;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  std::uint64_t seed_ = 0;
  std::size_t token_count_ = 0;
  std::vector<std::string> vocab_;
  std::vector<std::vector<std::size_t>> w_;
  std::vector<std::vector<std::size_t>> z_;
  std::vector<std::vector<std::size_t>> doc_topic_;
  std::vector<std::vector<std::size_t>> topic_word_;
  std::vector<std::size_t> topic_total_;
  std::vector<std::string> warnings_;
};

// Mean pairwise NPMI over the first top_n words of every topic, with +1
// document-count smoothing, mapped to [0, 1] by (x + 1) / 2.
double coherence_npmi(const std::vector<std::vector<std::string>>& topics,
                      std::span<const std::string> reference_docs, std::size_t top_n = 10);

struct CoherenceRow {
  std::size_t k = 0;
  double coherence = 0.0;
};

struct SelectKResult {
  std::size_t best_k = 0;
  std::vector<CoherenceRow> table;
  std::string to_csv() const;
};

// Coherence values within this distance count as a tie.
inline constexpr double kCoherenceTieEps = 1e-12;

// Fits every K with seed derive_seed(seed, K) and keeps the most coherent,
// smallest K on ties.
SelectKResult select_k(std::span<const std::string> docs, std::span<const std::size_t> ks,
                       std::uint64_t seed, std::size_t iters = 500, std::size_t top_n = 10);

}  // namespace phishevo::textstats

#endif  // PHISHEVO_LDA_H_
