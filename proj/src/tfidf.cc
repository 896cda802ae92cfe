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

#include "phishevo/tfidf.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "phishevo/common.h"

namespace phishevo::textstats {

namespace {

void normalize(std::vector<double>& row) {
  double sq = 0.0;
  for (double v : row) sq += v * v;
  if (sq <= 0.0) return;
  const double inv = 1.0 / std::sqrt(sq);
  for (double& v : row) v *= inv;
}

}  // namespace

std::size_t TfidfMatrix::index_of(std::string_view term) const {
  auto it = std::lower_bound(vocabulary.begin(), vocabulary.end(), term);
  if (it == vocabulary.end() || *it != term) return std::string::npos;
  return static_cast<std::size_t>(it - vocabulary.begin());
}

std::vector<double> TfidfMatrix::transform(std::string_view doc) const {
  std::vector<double> row(vocabulary.size(), 0.0);
  for (const auto& t : analysis_tokens(doc)) {
    if (auto i = index_of(t); i != std::string::npos) row[i] += 1.0;
  }
  for (std::size_t i = 0; i < row.size(); ++i) row[i] *= idf[i];
  normalize(row);
  return row;
}

TfidfMatrix tfidf(std::span<const std::string> docs, std::size_t max_features) {
  if (docs.empty()) throw ConfigError("tf-idf corpus is empty");
  std::vector<std::vector<std::string>> tokenized;
  std::map<std::string, std::size_t> df;
  for (const auto& d : docs) {
    tokenized.push_back(analysis_tokens(d));
    for (const auto& t : std::set<std::string>(tokenized.back().begin(), tokenized.back().end())) {
      ++df[t];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> terms(df.begin(), df.end());
  if (max_features > 0 && terms.size() > max_features) {
    std::stable_sort(terms.begin(), terms.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    terms.resize(max_features);
    std::sort(terms.begin(), terms.end());
  }
  TfidfMatrix m;
  const auto n = static_cast<double>(docs.size());
  for (const auto& [term, count] : terms) {
    m.vocabulary.push_back(term);
    m.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  for (const auto& tokens : tokenized) {
    std::vector<double> row(m.vocabulary.size(), 0.0);
    for (const auto& t : tokens) {
      if (auto i = m.index_of(t); i != std::string::npos) row[i] += 1.0;
    }
    for (std::size_t i = 0; i < row.size(); ++i) row[i] *= m.idf[i];
    normalize(row);
    m.rows.push_back(std::move(row));
  }
  return m;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ConfigError("cosine_similarity: dimension mismatch");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return na > 0 && nb > 0 ? dot / std::sqrt(na * nb) : 0.0;
}

}  // namespace phishevo::textstats
