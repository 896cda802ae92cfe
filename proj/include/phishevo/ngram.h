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

// Additive-smoothed n-gram language model used as the perplexity reference.

#ifndef PHISHEVO_NGRAM_H_
#define PHISHEVO_NGRAM_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace phishevo::textstats {

inline constexpr std::string_view kStartToken = "<s>";
inline constexpr std::string_view kStopToken = "</s>";

// For n >= 2 each document is padded with n-1 start tokens and one stop
// token; the stop token is part of the vocabulary, the start token is not.
// Unigram models use no sentinels.
class NgramModel {
 public:
  static NgramModel fit(std::span<const std::string> docs, int n, double alpha);

  int order() const { return n_; }
  double alpha() const { return alpha_; }
  std::size_t vocab_size() const { return vocab_.size(); }
  const std::vector<std::string>& vocabulary() const { return vocab_; }

  // P(word | context); only the last n-1 context tokens are used.
  double probability(std::span<const std::string> context, const std::string& word) const;
  std::size_t count(std::span<const std::string> ngram) const;
  std::size_t context_count(std::span<const std::string> context) const;

  // Document tokens after sentinel padding.
  std::vector<std::string> padded(std::string_view text) const;

 private:
  int n_ = 2;
  double alpha_ = 1.0;
  std::vector<std::string> vocab_;  // sorted
  std::map<std::string, std::size_t> ngrams_;
  std::map<std::string, std::size_t> contexts_;
};

NgramModel fit_ngram(std::span<const std::string> docs, int n = 2, double alpha = 1.0);

// exp of the mean negative log-likelihood per predicted token. Returns
// +infinity when some token has probability zero.
double perplexity(const NgramModel& model, std::string_view text);

}  // namespace phishevo::textstats

#endif  // PHISHEVO_NGRAM_H_
