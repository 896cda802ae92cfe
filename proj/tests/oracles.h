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

// Independent reference computations used by the unit and acceptance tests.

#ifndef PHISHEVO_TESTS_ORACLES_H_
#define PHISHEVO_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "phishevo/common.h"
#include "phishevo/lda.h"

namespace phishevo::oracle {

// c(m) written out from the harmonic-number definition.
inline double c_of(double m) {
  if (m <= 1.0) return 0.0;
  return 2.0 * (std::log(m - 1.0) + 0.5772156649) - 2.0 * (m - 1.0) / m;
}

// Walks one serialized tree: depth to the leaf plus c(leaf size).
inline double walk(const nlohmann::json& node, const std::vector<double>& x, double depth) {
  if (!node.contains("feature")) return depth + c_of(node.at("size").get<double>());
  const auto f = node.at("feature").get<std::size_t>();
  const double split = node.at("split").get<double>();
  return walk(x[f] < split ? node.at("left") : node.at("right"), x, depth + 1.0);
}

// Score of `x` recomputed from a forest's JSON serialization.
inline double isoforest_score(const nlohmann::json& forest, const std::vector<double>& x) {
  const auto& trees = forest.at("trees");
  double sum = 0.0;
  for (const auto& t : trees) sum += walk(t, x, 0.0);
  const double mean = sum / static_cast<double>(trees.size());
  return std::pow(2.0, -mean / c_of(forest.at("psi").get<double>()));
}

struct MwuOracle {
  double u_a, u_b, u, p;
};

// U by pair counting; p from the tie-corrected normal approximation with
// continuity correction, computed from tie group sizes.
inline MwuOracle mann_whitney(const std::vector<double>& a, const std::vector<double>& b) {
  double ua = 0.0;
  for (double x : a) {
    for (double y : b) ua += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  }
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double ub = na * nb - ua;
  std::map<double, double> groups;
  for (double x : a) groups[x] += 1;
  for (double y : b) groups[y] += 1;
  const double n = na + nb;
  double tie = 0.0;
  for (const auto& [v, t] : groups) tie += t * t * t - t;
  const double var = na * nb / 12.0 * ((n + 1.0) - tie / (n * (n - 1.0)));
  double p = 1.0;
  if (var > 0.0) {
    const double z = std::max(0.0, std::abs(ua - na * nb / 2.0) - 0.5) / std::sqrt(var);
    p = std::erfc(z / std::sqrt(2.0));
  }
  return {ua, ub, std::min(ua, ub), p};
}

// Two disjoint 10-word vocabularies; docs 0..24 use the first, 25..49 are
// word-mapped copies using the second.
inline std::vector<std::string> planted_corpus(std::uint64_t seed, std::size_t docs = 50,
                                               std::size_t tokens = 30) {
  std::vector<std::string> va, vb;
  for (int i = 0; i < 10; ++i) {
    va.push_back("alpha" + std::string(1, static_cast<char>('a' + i)));
    vb.push_back("omega" + std::string(1, static_cast<char>('a' + i)));
  }
  Rng rng(seed);
  std::vector<std::string> out(docs);
  const std::size_t half = docs / 2;
  for (std::size_t d = 0; d < half; ++d) {
    std::vector<std::string> ta, tb;
    for (std::size_t t = 0; t < tokens; ++t) {
      const auto w = rng.uniform_index(10);
      ta.push_back(va[w]);
      tb.push_back(vb[w]);
    }
    out[d] = join(ta, " ");
    out[half + d] = join(tb, " ");
  }
  return out;
}

// Fraction of tokens whose topic agrees with its vocabulary under a greedy
// one-to-one matching of topics to vocabularies.
inline double planted_purity(const textstats::LdaModel& m) {
  const std::size_t k = m.k();
  std::vector<std::vector<double>> table(k, std::vector<double>(2, 0.0));
  double total = 0;
  for (std::size_t d = 0; d < m.assignments().size(); ++d) {
    for (std::size_t i = 0; i < m.assignments()[d].size(); ++i) {
      const auto& word = m.vocabulary()[m.word_ids()[d][i]];
      table[m.assignments()[d][i]][word.rfind("alpha", 0) == 0 ? 0 : 1] += 1;
      total += 1;
    }
  }
  std::vector<bool> topic_used(k, false), vocab_used(2, false);
  double matched = 0;
  for (std::size_t round = 0; round < std::min<std::size_t>(k, 2); ++round) {
    double best = -1;
    std::size_t bt = 0, bv = 0;
    for (std::size_t t = 0; t < k; ++t) {
      for (std::size_t v = 0; v < 2; ++v) {
        if (!topic_used[t] && !vocab_used[v] && table[t][v] > best) {
          best = table[t][v];
          bt = t;
          bv = v;
        }
      }
    }
    topic_used[bt] = vocab_used[bv] = true;
    matched += best;
  }
  return matched / total;
}

}  // namespace phishevo::oracle

#endif  // PHISHEVO_TESTS_ORACLES_H_
