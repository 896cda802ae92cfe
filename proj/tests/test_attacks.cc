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
#include <atomic>
#include <set>
#include <string>
#include <vector>

#include "phishevo/attacks.h"
#include "phishevo/common.h"
#include "test_util.h"

namespace phishevo::attacks {
namespace {

// Positive exactly when the token "win" is present.
class WinOracle final : public detector::ProbabilityModel {
 public:
  double probability(std::string_view body) const override {
    ++calls;
    for (const auto& t : split_whitespace(body))
      if (t == "win") return 0.9;
    return 0.1;
  }
  mutable std::atomic<std::size_t> calls{0};
};

std::size_t words_changed(const std::string& a, const std::string& b) {
  auto x = split_whitespace(a), y = split_whitespace(b);
  EXPECT_EQ(x.size(), y.size());
  std::size_t n = 0;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) n += x[i] != y[i];
  return n;
}

// Optimal string alignment distance: insert, delete, substitute, adjacent swap.
std::size_t osa_distance(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1])
        d[i][j] = std::min(d[i][j], d[i - 2][j - 2] + 1);
    }
  }
  return d[a.size()][b.size()];
}

TEST(Budget, Validation) {
  PerturbationBudget b;
  EXPECT_NO_THROW(b.validate());
  EXPECT_EQ(b.max_edits(20), 3u);
  EXPECT_EQ(b.max_edits(7), 2u);
  b.max_word_fraction = 1.5;
  EXPECT_THROW(b.validate(), ConfigError);
  EXPECT_THROW(parse_method("bogus"), ConfigError);
  EXPECT_EQ(parse_method("textfooler_like"), Method::kTextFoolerLike);
}

TEST(Perturb, ZeroBudgetLeavesBodyAlone) {
  WinOracle d;
  PerturbationBudget b;
  b.max_word_fraction = 0.0;
  auto o = perturb("you win a prize", Method::kDeepWordBug, d, b, 1);
  EXPECT_EQ(o.perturbed_body, o.original_body);
  EXPECT_FALSE(o.success);
  EXPECT_EQ(o.words_edited, 0u);
}

TEST(Perturb, DeepWordBugFlipsOracle) {
  WinOracle d;
  PerturbationBudget b;
  auto o = perturb("please review the win report today", Method::kDeepWordBug, d, b, 3);
  EXPECT_TRUE(o.success);
  EXPECT_EQ(o.words_edited, 1u);
  auto toks = split_whitespace(o.perturbed_body);
  EXPECT_NE(toks[3], "win");
  EXPECT_EQ(osa_distance(toks[3], "win"), 1u);
  EXPECT_EQ(words_changed(o.original_body, o.perturbed_body), 1u);
  EXPECT_LT(o.perturbed_probability, 0.5);
}

TEST(Perturb, DeepWordBugFlipsTrainedDetector) {
  auto det = testing::train_win_detector(5);
  const std::string body = "please review the win report today";
  ASSERT_GE(det.probability(body), 0.5);
  PerturbationBudget b;
  auto o = perturb(body, Method::kDeepWordBug, det, b, 3);
  EXPECT_TRUE(o.success);
  EXPECT_EQ(words_changed(body, o.perturbed_body), 1u);
  const auto edited = split_whitespace(o.perturbed_body)[3];
  EXPECT_NE(edited, "win");
  EXPECT_EQ(osa_distance(edited, "win"), 1u);
}

TEST(Perturb, PruthiFlipsOracle) {
  WinOracle d;
  auto o = perturb("we win big", Method::kPruthi, d, {}, 2);
  EXPECT_TRUE(o.success);
  EXPECT_LE(o.words_edited, PerturbationBudget{}.max_edits(3));
}

TEST(Perturb, PwwsEmptyLexicon) {
  WinOracle d;
  SynonymLexicon empty;
  AttackContext ctx{&empty, 0.5};
  auto o = perturb("you win a prize", Method::kPwws, d, {}, 1, ctx);
  EXPECT_FALSE(o.success);
  EXPECT_EQ(o.words_edited, 0u);
  EXPECT_EQ(o.perturbed_body, o.original_body);
}

TEST(Perturb, PwwsUsesSynonym) {
  WinOracle d;
  SynonymLexicon syn = {{"win", {"gain", "earn"}}};
  AttackContext ctx{&syn, 0.5};
  auto o = perturb("you win a prize", Method::kPwws, d, {}, 1, ctx);
  EXPECT_TRUE(o.success);
  auto w = split_whitespace(o.perturbed_body)[1];
  EXPECT_TRUE(w == "gain" || w == "earn") << w;
}

TEST(Perturb, TextFoolerRespectsSimilarityFloor) {
  WinOracle d;
  SynonymLexicon syn = {{"win", {"xyz"}}};
  AttackContext ctx{&syn, 0.5};
  auto o = perturb("you win a prize", Method::kTextFoolerLike, d, {}, 1, ctx);
  EXPECT_FALSE(o.success);  // jaccard("win", "xyz") = 0 is under the floor
  EXPECT_DOUBLE_EQ(bigram_jaccard("win", "xyz"), 0.0);
  EXPECT_DOUBLE_EQ(bigram_jaccard("Win", "win"), 1.0);
}

TEST(Perturb, SynonymMethodsNeedLexicon) {
  WinOracle d;
  EXPECT_THROW(perturb("you win", Method::kPwws, d, {}, 1), ConfigError);
}

TEST(Perturb, NegativeBodyUnchanged) {
  WinOracle d;
  auto o = perturb("nothing to see", Method::kDeepWordBug, d, {}, 1);
  EXPECT_FALSE(o.success);
  EXPECT_EQ(o.perturbed_body, o.original_body);
}

TEST(Perturb, QueryBudgetHonored) {
  for (std::size_t q : {1u, 3u, 7u, 20u}) {
    WinOracle d;
    PerturbationBudget b;
    b.max_queries = q;
    b.max_word_fraction = 1.0;
    auto o = perturb("alpha beta gamma delta epsilon win zeta eta", Method::kDeepWordBug, d, b, 4);
    EXPECT_LE(d.calls.load(), q);
    EXPECT_LE(o.queries, q);
  }
}

TEST(Perturb, EditBudgetHonored) {
  // everything is "win", so no single edit flips the decision
  WinOracle d;
  PerturbationBudget b;
  b.max_word_fraction = 0.25;
  const std::string body = "win win win win win win win win";
  for (auto m : {Method::kDeepWordBug, Method::kPruthi}) {
    auto o = perturb(body, m, d, b, 9);
    EXPECT_LE(words_changed(body, o.perturbed_body), 2u);
    EXPECT_LE(o.words_edited, 2u);
    EXPECT_FALSE(o.success);
  }
}

TEST(Perturb, Deterministic) {
  auto det = testing::train_win_detector(2);
  const std::string body = "team win budget plan notes";
  for (auto m : {Method::kDeepWordBug, Method::kPruthi}) {
    auto a = perturb(body, m, det, {}, 77);
    auto b = perturb(body, m, det, {}, 77);
    EXPECT_EQ(a.perturbed_body, b.perturbed_body);
    EXPECT_EQ(a.queries, b.queries);
  }
}

TEST(Saliency, WinRanksFirst) {
  WinOracle d;
  auto s = token_saliency("lunch win office", d);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].position, 1u);
  EXPECT_NEAR(s[0].importance, 0.8, 1e-12);
  EXPECT_EQ(s[1].position, 0u);  // ties by position
  EXPECT_DOUBLE_EQ(s[1].importance, 0.0);
}

AttackOutcome outcome(bool success) {
  AttackOutcome o;
  o.success = success;
  return o;
}

TEST(Asr, Fractions) {
  std::vector<AttackOutcome> v(5, outcome(false));
  EXPECT_DOUBLE_EQ(evaluate_asr(v), 0.0);
  v.assign(16, outcome(false));
  for (int i = 0; i < 3; ++i) v[i] = outcome(true);
  EXPECT_DOUBLE_EQ(evaluate_asr(v), 0.1875);
  v.assign(4, outcome(true));
  EXPECT_DOUBLE_EQ(evaluate_asr(v), 1.0);
  std::vector<AttackOutcome> none;
  EXPECT_ANY_THROW(evaluate_asr(none));
}

corpus::Corpus toy_corpus(std::size_t n, std::uint64_t seed) {
  corpus::Corpus c;
  for (const auto& t : testing::win_toy_data(n, seed)) {
    const auto label = t.positive ? corpus::Label::kPhishing : corpus::Label::kBenign;
    c.emplace_back(corpus::content_id("toy", label, t.body), "toy", label, t.body,
                   corpus::Origin::kIngested);
  }
  return c;
}

TEST(Robustness, SameDetectorGivesIdenticalRows) {
  auto det = testing::train_win_detector(3);
  auto eval = toy_corpus(12, 99);
  std::vector<RobustnessInput> in = {{&det, "before"}, {&det, "after"}};
  std::vector<Method> methods = {Method::kDeepWordBug, Method::kPruthi};
  auto r = robustness_report(in, eval, "toy", methods, {}, 5);
  ASSERT_EQ(r.rows.size(), 4u);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& a = r.rows[i];
    const auto& b = r.rows[i + 2];
    EXPECT_EQ(a.model, "before");
    EXPECT_EQ(b.model, "after");
    EXPECT_EQ(a.method, b.method);
    EXPECT_EQ(a.acc, b.acc);
    EXPECT_EQ(a.f1, b.f1);
    EXPECT_EQ(a.eva_acc, b.eva_acc);
    EXPECT_EQ(a.eva_f1, b.eva_f1);
    EXPECT_EQ(a.asr_percent, b.asr_percent);
    EXPECT_EQ(a.attacked, b.attacked);
  }
  auto csv = r.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "model,dataset,method,Acc,F1,EVA-Acc,EVA-F1,ASR_percent");
  auto adv = adversarial_examples(r.outcomes);
  for (const auto& a : adv) EXPECT_TRUE(a.positive);
}

}  // namespace
}  // namespace phishevo::attacks
