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

#ifndef PHISHEVO_TFIDF_H_
#define PHISHEVO_TFIDF_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace phishevo::textstats {

inline constexpr std::size_t kDefaultMaxFeatures = 2000;

// Raw term counts times idf = ln((1+N)/(1+df)) + 1, rows L2-normalized.
struct TfidfMatrix {
  std::vector<std::string> vocabulary;  // sorted
  std::vector<double> idf;
  std::vector<std::vector<double>> rows;

  std::size_t index_of(std::string_view term) const;  // npos when absent
  // Weights for an unseen document under the fitted vocabulary and idf.
  std::vector<double> transform(std::string_view doc) const;
};

// Keeps the max_features terms with the highest document frequency (ties
// broken alphabetically); 0 keeps every term.
TfidfMatrix tfidf(std::span<const std::string> docs,
                  std::size_t max_features = kDefaultMaxFeatures);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace phishevo::textstats

#endif  // PHISHEVO_TFIDF_H_
