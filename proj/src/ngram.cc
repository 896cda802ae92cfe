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

#include "phishevo/ngram.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "phishevo/common.h"

namespace phishevo::textstats {

namespace {

std::string key_of(std::span<const std::string> tokens) {
  std::string k;
  for (const auto& t : tokens) {
    k += t;
    k += '\x1f';
  }
  return k;
}

}  // namespace

std::vector<std::string> NgramModel::padded(std::string_view text) const {
  auto tokens = analysis_tokens(text);
  if (n_ < 2) return tokens;
  std::vector<std::string> out(static_cast<std::size_t>(n_ - 1), std::string(kStartToken));
  out.insert(out.end(), tokens.begin(), tokens.end());
  out.emplace_back(kStopToken);
  return out;
}

NgramModel NgramModel::fit(std::span<const std::string> docs, int n, double alpha) {
  if (n < 1) throw ConfigError("n-gram order must be >= 1");
  if (alpha < 0 || !std::isfinite(alpha)) throw ConfigError("smoothing constant must be >= 0");
  if (docs.empty()) throw ConfigError("n-gram corpus is empty");
  NgramModel m;
  m.n_ = n;
  m.alpha_ = alpha;
  std::set<std::string> vocab;
  const auto order = static_cast<std::size_t>(n);
  for (const auto& doc : docs) {
    auto tokens = m.padded(doc);
    const std::size_t first = order - 1;  // first predicted position
    for (std::size_t i = first; i < tokens.size(); ++i) {
      vocab.insert(tokens[i]);
      std::span<const std::string> gram(tokens.data() + i + 1 - order, order);
      ++m.ngrams_[key_of(gram)];
      ++m.contexts_[key_of(gram.first(order - 1))];
    }
  }
  m.vocab_.assign(vocab.begin(), vocab.end());
  if (m.vocab_.empty()) throw ConfigError("n-gram corpus has no tokens");
  return m;
}

std::size_t NgramModel::count(std::span<const std::string> ngram) const {
  auto it = ngrams_.find(key_of(ngram));
  return it == ngrams_.end() ? 0 : it->second;
}

std::size_t NgramModel::context_count(std::span<const std::string> context) const {
  auto it = contexts_.find(key_of(context));
  return it == contexts_.end() ? 0 : it->second;
}

double NgramModel::probability(std::span<const std::string> context,
                               const std::string& word) const {
  const auto need = static_cast<std::size_t>(n_ - 1);
  if (context.size() < need) throw ConfigError("context shorter than n-1 tokens");
  auto ctx = context.last(need);
  std::vector<std::string> gram(ctx.begin(), ctx.end());
  gram.push_back(word);
  const double num = static_cast<double>(count(gram)) + alpha_;
  const double den =
      static_cast<double>(context_count(ctx)) + alpha_ * static_cast<double>(vocab_.size());
  return den > 0 ? num / den : 0.0;
}

NgramModel fit_ngram(std::span<const std::string> docs, int n, double alpha) {
  return NgramModel::fit(docs, n, alpha);
}

double perplexity(const NgramModel& model, std::string_view text) {
  auto tokens = model.padded(text);
  const auto first = static_cast<std::size_t>(model.order() - 1);
  if (tokens.size() <= first || analysis_tokens(text).empty()) {
    throw ConfigError("perplexity needs a non-empty text");
  }
  double nll = 0.0;
  std::size_t count = 0;
  for (std::size_t i = first; i < tokens.size(); ++i) {
    std::span<const std::string> ctx(tokens.data() + i - first, first);
    const double p = model.probability(ctx, tokens[i]);
    if (p <= 0.0) return std::numeric_limits<double>::infinity();
    nll -= std::log(p);
    ++count;
  }
  return std::exp(nll / static_cast<double>(count));
}

}  // namespace phishevo::textstats
