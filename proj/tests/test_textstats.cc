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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "oracles.h"
#include "phishevo/common.h"
#include "phishevo/isolation_forest.h"
#include "phishevo/lda.h"
#include "phishevo/mann_whitney.h"
#include "phishevo/ngram.h"
#include "phishevo/tfidf.h"

namespace phishevo::textstats {
namespace {

using Docs = std::vector<std::string>;

// --- n-gram perplexity ---

TEST(Ngram, UnigramWithoutSmoothingGivesCertainty) {
  Docs docs = {"a a a"};
  auto m = NgramModel::fit(docs, 1, 0.0);
  EXPECT_DOUBLE_EQ(m.probability({}, "a"), 1.0);
  EXPECT_DOUBLE_EQ(perplexity(m, "a a"), 1.0);
}

TEST(Ngram, BigramAddOne) {
  Docs docs = {"a b"};
  auto m = NgramModel::fit(docs, 2, 1.0);
  // vocabulary {a, b, </s>}; count(a b) = 1, count(a) = 1
  EXPECT_EQ(m.vocab_size(), 3u);
  std::vector<std::string> ctx = {"a"};
  EXPECT_DOUBLE_EQ(m.probability(ctx, "b"), 0.5);
}

TEST(Ngram, ConditionalsSumToOne) {
  Docs docs = {"the cat sat on the mat", "the dog sat on the log"};
  auto m = NgramModel::fit(docs, 2, 0.5);
  for (const auto& c : {"the", "sat", "<s>", "log"}) {
    std::vector<std::string> ctx = {c};
    double s = 0;
    for (const auto& w : m.vocabulary()) s += m.probability(ctx, w);
    EXPECT_NEAR(s, 1.0, 1e-12) << c;
  }
}

TEST(Ngram, UniformModelPerplexityEqualsVocabSize) {
  Docs docs = {"w0 w1 w2 w3 w4 w5 w6 w7 w8 w9"};
  auto m = NgramModel::fit(docs, 1, 1.0);
  EXPECT_EQ(m.vocab_size(), 10u);
  EXPECT_NEAR(perplexity(m, "w3 w7 w1 w1"), 10.0, 1e-9);
}

TEST(Ngram, HeldOutNotBetterThanTraining) {
  Docs train = {"please verify your account today", "verify the account now",
                "your meeting notes are attached", "the notes are in the folder"};
  auto m = NgramModel::fit(train, 2, 1.0);
  double tr = 0;
  for (const auto& d : train) tr += perplexity(m, d);
  tr /= static_cast<double>(train.size());
  EXPECT_GE(perplexity(m, "attached folder verify meeting today"), tr);
}

TEST(Ngram, ZeroProbabilityGivesInfinity) {
  Docs docs = {"a a"};
  auto m = NgramModel::fit(docs, 1, 0.0);
  EXPECT_TRUE(std::isinf(perplexity(m, "b")));
}

// --- NPMI coherence ---

TEST(Coherence, AlwaysTogetherIsHigh) {
  Docs docs;
  for (int i = 0; i < 100; ++i) docs.push_back(i < 10 ? "xray yankee" : "filler" + std::to_string(i));
  EXPECT_GT(coherence_npmi({{"xray", "yankee"}}, docs), 0.9);
}

TEST(Coherence, IndependentIsNearHalf) {
  Docs docs;
  for (int i = 0; i < 100; ++i) {
    std::string d = "pad";
    if (i < 50) d += " xray";
    if (i % 2 == 0) d += " yankee";
    docs.push_back(d);
  }
  EXPECT_NEAR(coherence_npmi({{"xray", "yankee"}}, docs), 0.5, 0.05);
}

TEST(Coherence, NeverTogetherIsLow) {
  Docs docs;
  for (int i = 0; i < 100; ++i) docs.push_back(i < 50 ? "xray" : "yankee");
  EXPECT_LT(coherence_npmi({{"xray", "yankee"}}, docs), 0.5);
}

TEST(Coherence, RejectsDegenerateTopics) {
  Docs docs = {"a b"};
  EXPECT_THROW(coherence_npmi({{"a"}}, docs), ConfigError);
  EXPECT_THROW(coherence_npmi({}, docs), ConfigError);
}

// --- tf-idf ---

TEST(Tfidf, SmoothedIdf) {
  Docs docs = {"apple banana", "apple cherry"};
  auto t = tfidf(docs, 0);
  ASSERT_EQ(t.vocabulary, (std::vector<std::string>{"apple", "banana", "cherry"}));
  EXPECT_NEAR(t.idf[0], 1.0, 1e-12);
  EXPECT_NEAR(t.idf[1], 1.4055, 1e-4);
  EXPECT_NEAR(t.idf[1], std::log(1.5) + 1.0, 1e-12);
  for (const auto& row : t.rows) {
    double n = 0;
    for (double v : row) n += v * v;
    EXPECT_NEAR(n, 1.0, 1e-12);
  }
  EXPECT_EQ(t.index_of("durian"), static_cast<std::size_t>(-1));
}

TEST(Tfidf, MaxFeaturesKeepsFrequentTerms) {
  Docs docs = {"common rare1", "common rare2", "common rare3"};
  auto t = tfidf(docs, 2);
  EXPECT_EQ(t.vocabulary, (std::vector<std::string>{"common", "rare1"}));
}

TEST(Tfidf, TransformMatchesFittedRow) {
  Docs docs = {"apple banana banana", "apple cherry"};
  auto t = tfidf(docs, 0);
  auto r = t.transform(docs[0]);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(r[i], t.rows[0][i], 1e-12);
  EXPECT_NEAR(cosine_similarity(r, t.rows[0]), 1.0, 1e-12);
}

// --- isolation forest ---

std::vector<std::vector<double>> cluster_with_outlier(std::uint64_t seed, std::size_t n = 64) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < n; ++i) rows.push_back({rng.normal(0, 1), rng.normal(0, 1), rng.normal(0, 1)});
  rows.push_back({8.0, -8.0, 8.0});
  return rows;
}

TEST(IsoForest, AveragePathLength) {
  EXPECT_DOUBLE_EQ(average_path_length(1), 0.0);
  EXPECT_DOUBLE_EQ(average_path_length(0), 0.0);
  for (double m : {2.0, 3.0, 10.0, 256.0}) EXPECT_NEAR(average_path_length(m), oracle::c_of(m), 1e-9);
}

TEST(IsoForest, TwoPointsIsolateAtDepthOne) {
  std::vector<std::vector<double>> rows = {{0.0}, {1.0}};
  auto f = IsolationForest::fit(rows, {.trees = 20, .psi = 2, .seed = 3});
  EXPECT_DOUBLE_EQ(f.mean_path_length(rows[0]), 1.0);
  EXPECT_DOUBLE_EQ(f.mean_path_length(rows[1]), 1.0);
  EXPECT_EQ(f.height_limit(), 1u);
}

TEST(IsoForest, MatchesTreeWalkOracle) {
  auto rows = cluster_with_outlier(11);
  auto f = IsolationForest::fit(rows, {.trees = 50, .psi = 32, .seed = 5});
  const auto j = nlohmann::json::parse(f.to_json().dump());
  for (const auto& r : rows) EXPECT_NEAR(f.score(r).score, oracle::isoforest_score(j, r), 1e-12);
  std::vector<double> probe = {0.3, 9.0, -2.0};
  EXPECT_NEAR(f.score(probe).score, oracle::isoforest_score(j, probe), 1e-12);
}

TEST(IsoForest, OutlierScoresHighest) {
  auto rows = cluster_with_outlier(2);
  auto f = IsolationForest::fit(rows, {.trees = 100, .psi = 64, .seed = 9});
  const double out = f.score(rows.back()).score;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) EXPECT_LT(f.score(rows[i]).score, out);
  EXPECT_TRUE(f.score(rows.back()).anomaly);
  EXPECT_NEAR(f.score(rows.back()).signed_score, 0.5 - out, 1e-15);
}

TEST(IsoForest, Deterministic) {
  auto rows = cluster_with_outlier(4);
  auto a = IsolationForest::fit(rows, {.trees = 30, .psi = 16, .seed = 1});
  auto b = IsolationForest::fit(rows, {.trees = 30, .psi = 16, .seed = 1});
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
}

TEST(IsoForest, PsiClippedWithWarning) {
  auto rows = cluster_with_outlier(4, 9);
  auto f = IsolationForest::fit(rows, {.trees = 10, .psi = 256, .seed = 1});
  EXPECT_EQ(f.psi(), rows.size());
  EXPECT_FALSE(f.warnings().empty());
  EXPECT_EQ(f.height_limit(), static_cast<std::size_t>(std::ceil(std::log2(rows.size()))));
}

TEST(IsoForest, IdenticalRowsScoreEqually) {
  std::vector<std::vector<double>> rows(20, std::vector<double>{1.0, 2.0});
  auto f = IsolationForest::fit(rows, {.trees = 10, .psi = 8, .seed = 1});
  const double s = f.score(rows[0]).score;
  for (const auto& r : rows) EXPECT_DOUBLE_EQ(f.score(r).score, s);
}

TEST(IsoForest, FeaturePermutationKeepsRanking) {
  auto rows = cluster_with_outlier(6);
  auto perm = rows;
  for (auto& r : perm) std::rotate(r.begin(), r.begin() + 1, r.end());
  auto a = IsolationForest::fit(rows, {.trees = 200, .psi = 64, .seed = 2});
  auto b = IsolationForest::fit(perm, {.trees = 200, .psi = 64, .seed = 2});
  auto argmax = [](const IsolationForest& f, const std::vector<std::vector<double>>& rs) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < rs.size(); ++i)
      if (f.score(rs[i]).score > f.score(rs[best]).score) best = i;
    return best;
  };
  EXPECT_EQ(argmax(a, rows), rows.size() - 1);
  EXPECT_EQ(argmax(b, perm), rows.size() - 1);
}

TEST(IsoForest, JsonRoundTrip) {
  auto rows = cluster_with_outlier(8);
  auto f = IsolationForest::fit(rows, {.trees = 10, .psi = 16, .seed = 2});
  auto g = IsolationForest::from_json(nlohmann::json::parse(f.to_json().dump()));
  for (const auto& r : rows) EXPECT_DOUBLE_EQ(f.score(r).score, g.score(r).score);
}

TEST(IsoForest, RejectsBadInput) {
  std::vector<std::vector<double>> empty;
  EXPECT_ANY_THROW(IsolationForest::fit(empty, {}));
  std::vector<std::vector<double>> ragged = {{1.0, 2.0}, {1.0}};
  EXPECT_ANY_THROW(IsolationForest::fit(ragged, {}));
}

// --- Mann-Whitney ---

TEST(MannWhitney, SeparatedSamples) {
  std::vector<double> a = {1, 2}, b = {3, 4};
  auto r = mann_whitney(a, b);
  EXPECT_DOUBLE_EQ(r.u, 0.0);
  EXPECT_DOUBLE_EQ(r.u_a, 0.0);
  EXPECT_DOUBLE_EQ(r.u_b, 4.0);
  EXPECT_GT(r.p, 0.0);
  EXPECT_LE(r.p, 1.0);
}

TEST(MannWhitney, Symmetric) {
  std::vector<double> a = {1.5, 2, 2, 7, 3}, b = {2, 4, 4.5, 9};
  auto x = mann_whitney(a, b), y = mann_whitney(b, a);
  EXPECT_DOUBLE_EQ(x.u, y.u);
  EXPECT_DOUBLE_EQ(x.u_a, y.u_b);
  EXPECT_DOUBLE_EQ(x.p, y.p);
}

TEST(MannWhitney, Midranks) {
  std::vector<double> v = {10, 20, 20, 30};
  EXPECT_EQ(midranks(v), (std::vector<double>{1, 2.5, 2.5, 4}));
}

TEST(MannWhitney, MatchesPairCountingOracle) {
  const std::vector<std::vector<double>> fixtures = {
      {3.0}, {1.0, 5.0}, {2.0, 2.0, 4.0}, {0.5, 3.0, 3.0, 6.0},
      {1.0, 1.0, 1.0, 2.0, 8.0}, {4.0, 2.0, 7.0, 3.0, 3.0, 0.0}, {5.0, 5.0, 5.0, 5.0, 5.0, 5.0}};
  for (const auto& a : fixtures) {
    for (const auto& b : fixtures) {
      auto r = mann_whitney(a, b);
      auto o = oracle::mann_whitney(a, b);
      EXPECT_DOUBLE_EQ(r.u_a, o.u_a);
      EXPECT_DOUBLE_EQ(r.u_b, o.u_b);
      EXPECT_DOUBLE_EQ(r.u, o.u);
      EXPECT_NEAR(r.p, o.p, 1e-12);
    }
  }
}

// --- LDA ---

TEST(Lda, SingleTopicIsSmoothedUnigram) {
  Docs docs = {"apple apple banana", "banana cherry", "apple"};
  LdaConfig cfg;
  cfg.k = 1;
  cfg.iters = 5;
  auto m = LdaModel::fit(docs, cfg);
  auto phi = m.topic_word_distribution(0);
  // apple 3, banana 2, cherry 1 of 6 tokens
  const std::vector<double> counts = {3, 2, 1};
  ASSERT_EQ(m.vocabulary(), (std::vector<std::string>{"apple", "banana", "cherry"}));
  for (std::size_t w = 0; w < 3; ++w) EXPECT_NEAR(phi[w], (counts[w] + 0.01) / (6 + 3 * 0.01), 1e-12);
}

TEST(Lda, RecoversPlantedTopics) {
  auto docs = oracle::planted_corpus(17);
  LdaConfig cfg;
  cfg.k = 2;
  cfg.iters = 200;
  cfg.seed = 3;
  auto m = LdaModel::fit(docs, cfg);
  EXPECT_GE(oracle::planted_purity(m), 0.9);
}

TEST(Lda, DeterministicAndConsistentEverySweep) {
  auto docs = oracle::planted_corpus(5, 20, 20);
  std::size_t sweeps = 0;
  bool consistent = true;
  LdaConfig cfg;
  cfg.k = 3;
  cfg.iters = 25;
  cfg.seed = 12;
  cfg.on_sweep = [&](std::size_t, const LdaModel& m) {
    ++sweeps;
    consistent = consistent && m.counts_consistent();
  };
  auto a = LdaModel::fit(docs, cfg);
  EXPECT_EQ(sweeps, 25u);
  EXPECT_TRUE(consistent);
  cfg.on_sweep = nullptr;
  auto b = LdaModel::fit(docs, cfg);
  EXPECT_EQ(a.assignments(), b.assignments());
  EXPECT_DOUBLE_EQ(a.alpha(), 50.0 / 3.0);
}

TEST(Lda, TopWordsOrdered) {
  auto docs = oracle::planted_corpus(5, 20, 20);
  LdaConfig cfg;
  cfg.k = 2;
  cfg.iters = 50;
  auto m = LdaModel::fit(docs, cfg);
  auto phi = m.topic_word_distribution(0);
  auto top = m.top_words(0, 5);
  ASSERT_EQ(top.size(), 5u);
  auto idx = [&](const std::string& w) {
    return std::find(m.vocabulary().begin(), m.vocabulary().end(), w) - m.vocabulary().begin();
  };
  for (std::size_t i = 1; i < top.size(); ++i) EXPECT_GE(phi[idx(top[i - 1])], phi[idx(top[i])]);
}

TEST(SelectK, SingleCandidate) {
  auto docs = oracle::planted_corpus(5, 20, 20);
  std::vector<std::size_t> ks = {1};
  EXPECT_EQ(select_k(docs, ks, 1, 50).best_k, 1u);
}

TEST(SelectK, PlantedCorpusPicksTwo) {
  auto docs = oracle::planted_corpus(17);
  std::vector<std::size_t> ks = {1, 2, 3, 4};
  auto r = select_k(docs, ks, 4, 200);
  EXPECT_EQ(r.best_k, 2u);
  EXPECT_EQ(r.table.size(), 4u);
}

TEST(SelectK, TiesGoToSmallerK) {
  // every word in every document, so every pair has NPMI exactly 1
  Docs docs(10, "apple banana cherry durian elder fig grape");
  std::vector<std::size_t> ks = {4, 2, 3};
  auto r = select_k(docs, ks, 1, 20, 3);
  EXPECT_EQ(r.best_k, 2u);
  EXPECT_EQ(r.to_csv().substr(0, 21), "k,coherence,selected\n");
}

}  // namespace
}  // namespace phishevo::textstats
