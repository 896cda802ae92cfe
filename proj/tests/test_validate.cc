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

#include <set>

#include "phishevo/validate.h"
#include "test_util.h"

#ifndef PHISHEVO_TEST_DATA
#error "PHISHEVO_TEST_DATA must point at tests/data"
#endif

namespace phishevo::validate {
namespace {

using corpus::EmailRecord;
using corpus::Label;
using corpus::Origin;

std::string golden(const std::string& name) {
  return read_file(std::filesystem::path(PHISHEVO_TEST_DATA) / "verdicts" / name);
}

TEST(ParseVerdict, GoldenFiles) {
  auto clean = parse_verdict(golden("clean.json"));
  EXPECT_TRUE(clean.is_phishing);
  EXPECT_EQ(clean.phishing_score, 8);
  EXPECT_EQ(clean.rationales.size(), 2u);

  auto wrapped = parse_verdict(golden("wrapped.txt"));
  EXPECT_TRUE(wrapped.is_phishing);
  EXPECT_EQ(wrapped.phishing_score, 9);

  auto rationals = parse_verdict(golden("rationals.json"));
  EXPECT_FALSE(rationals.is_phishing);
  EXPECT_EQ(rationals.phishing_score, 2);
  EXPECT_EQ(rationals.rationales, (std::vector<std::string>{"routine meeting notice"}));
}

TEST(ParseVerdict, LastObjectWinsAndErrors) {
  auto v = parse_verdict(R"({"is_phishing":false,"phishing_score":1} then {"is_phishing":true,"phishing_score":7})");
  EXPECT_TRUE(v.is_phishing);
  EXPECT_EQ(v.phishing_score, 7);
  EXPECT_THROW(parse_verdict("no json here"), ParseError);
  EXPECT_THROW(parse_verdict(R"({"is_phishing":true})"), ParseError);
  EXPECT_THROW(parse_verdict(R"({"is_phishing":true,"phishing_score":11})"), VerdictRangeError);
  EXPECT_THROW(parse_verdict(R"({"is_phishing":true,"phishing_score":-1})"), VerdictRangeError);
}

// Replies with scripted texts in order, then repeats the last one.
class ScriptedBackend final : public llm::CompletionBackend {
 public:
  explicit ScriptedBackend(std::vector<std::string> replies) : replies_(std::move(replies)) {}
  std::string complete(const llm::ChatRequest& r) override {
    requests.push_back(r);
    const auto i = std::min(calls_++, replies_.size() - 1);
    return replies_[i];
  }
  std::string name() const override { return "scripted"; }
  std::vector<llm::ChatRequest> requests;

 private:
  std::vector<std::string> replies_;
  std::size_t calls_ = 0;
};

EmailRecord email(const std::string& id, const std::string& body, Label label = Label::kPhishing) {
  return EmailRecord(id, "s", label, body, Origin::kGenerated);
}

TEST(AnalyzeEmail, ParsesStubReply) {
  ScriptedBackend b({R"({"is_phishing":true,"phishing_score":8,"rationals":["urgency"]})"});
  auto v = analyze_email(email("a", "pay now"), b, default_analysis_template());
  EXPECT_TRUE(v.is_phishing);
  EXPECT_EQ(v.phishing_score, 8);
  EXPECT_EQ(v.rationales, (std::vector<std::string>{"urgency"}));
  ASSERT_EQ(b.requests.size(), 1u);
  EXPECT_NE(b.requests[0].messages.back().content.find("pay now"), std::string::npos);
}

TEST(AnalyzeEmail, OutOfRangeScore) {
  ScriptedBackend b({R"({"is_phishing":true,"phishing_score":11})"});
  EXPECT_THROW(analyze_email(email("a", "x"), b, default_analysis_template()), VerdictRangeError);
}

TEST(AnalyzeEmail, WrappedJsonAndOneReprompt) {
  ScriptedBackend wrapped({"I think so. {\"is_phishing\":true,\"phishing_score\":6}"});
  EXPECT_EQ(analyze_email(email("a", "x"), wrapped, default_analysis_template()).phishing_score, 6);

  ScriptedBackend retry({"not json", R"({"is_phishing":false,"phishing_score":3})"});
  EXPECT_EQ(analyze_email(email("a", "x"), retry, default_analysis_template()).phishing_score, 3);
  EXPECT_EQ(retry.requests.size(), 2u);

  ScriptedBackend never({"still not json"});
  EXPECT_THROW(analyze_email(email("a", "x"), never, default_analysis_template()), ParseError);
  EXPECT_EQ(never.requests.size(), 2u);
}

TEST(Template, RequiresPlaceholder) {
  EXPECT_THROW(render_analysis_prompt("no placeholder", "x"), ConfigError);
  EXPECT_EQ(render_analysis_prompt("<{{EMAIL_BODY}}>", "body"), "<body>");
}

std::vector<IdentifiedVerdict> verdicts(const std::vector<std::pair<bool, int>>& v) {
  std::vector<IdentifiedVerdict> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    AnalyzerVerdict a;
    a.is_phishing = v[i].first;
    a.phishing_score = v[i].second;
    out.push_back({"v" + std::to_string(i), a});
  }
  return out;
}

TEST(Pas, HandCountedFractions) {
  auto s = pas_summary(verdicts({{true, 8}, {true, 8}, {true, 6}, {true, 2}}));
  EXPECT_DOUBLE_EQ(s.frac_at_least_6, 0.75);
  EXPECT_DOUBLE_EQ(s.frac_at_least_8, 0.5);
  EXPECT_DOUBLE_EQ(s.frac_below_5, 0.25);
  auto all = pas_summary(verdicts({{true, 10}, {true, 10}}));
  EXPECT_DOUBLE_EQ(all.frac_at_least_6, 1.0);
}

// 20 verdicts covering every (is_phishing, score) combination near the rule.
TEST(Pas, RetentionRuleOnTwentyVerdicts) {
  std::vector<std::pair<bool, int>> v = {
      {true, 10}, {true, 9}, {true, 8}, {true, 7}, {true, 6}, {true, 5}, {true, 4},
      {true, 0},  {false, 10}, {false, 9}, {false, 6}, {false, 5}, {false, 2}, {true, 6},
      {true, 5},  {false, 7}, {true, 3}, {true, 7}, {false, 0}, {true, 8}};
  auto s = pas_summary(verdicts(v));
  const std::vector<std::string> expected = {"v0", "v1", "v2", "v3", "v4", "v13", "v17", "v19"};
  EXPECT_EQ(s.retained_ids, expected);
  std::size_t total = 0;
  for (auto c : s.histogram) total += c;
  EXPECT_EQ(total, 20u);
  EXPECT_EQ(s.score_5_count, 3u);
}

// Answers is_phishing by alternating per class, so each fold with two
// records of each class sees tp=fn=fp=tn=1 whatever the shuffle.
class AlternatingAnalyzer final : public llm::CompletionBackend {
 public:
  std::string complete(const llm::ChatRequest& r) override {
    const bool phish = r.messages.back().content.find("PHISHCASE") != std::string::npos;
    const bool say = (phish ? n_phish_++ : n_benign_++) % 2 == 0;
    return nlohmann::json{{"is_phishing", say}, {"phishing_score", say ? 9 : 1}}.dump();
  }
  std::string name() const override { return "alternating"; }

 private:
  int n_phish_ = 0, n_benign_ = 0;
};

corpus::Corpus labeled(std::size_t per_class) {
  corpus::Corpus c;
  for (std::size_t i = 0; i < per_class; ++i) {
    c.push_back(email("p" + std::to_string(i), "PHISHCASE " + std::to_string(i)));
    c.push_back(email("b" + std::to_string(i), "hello " + std::to_string(i), Label::kBenign));
  }
  return c;
}

TEST(CrossValidate, ScriptedConfusionPerFold) {
  AlternatingAnalyzer a;
  auto cv = cross_validate(labeled(10), 5, a, 17, default_analysis_template());
  ASSERT_EQ(cv.folds.size(), 5u);
  for (const auto& f : cv.folds) {
    EXPECT_EQ(f.metrics.tp, 1u);
    EXPECT_EQ(f.metrics.fp, 1u);
    EXPECT_EQ(f.metrics.tn, 1u);
    EXPECT_EQ(f.metrics.fn, 1u);
    EXPECT_DOUBLE_EQ(*f.f1, 0.5);
    EXPECT_DOUBLE_EQ(*f.f2, 0.5);
  }
  EXPECT_DOUBLE_EQ(*cv.mean_f1, 0.5);
}

class PerfectAnalyzer final : public llm::CompletionBackend {
 public:
  std::string complete(const llm::ChatRequest& r) override {
    const bool phish = r.messages.back().content.find("PHISHCASE") != std::string::npos;
    return nlohmann::json{{"is_phishing", phish}, {"phishing_score", phish ? 9 : 1}}.dump();
  }
  std::string name() const override { return "perfect"; }
};

TEST(CrossValidate, PerfectAnalyzerAndPartition) {
  PerfectAnalyzer a;
  const auto data = labeled(7);
  auto cv = cross_validate(data, 5, a, 3, default_analysis_template());
  std::multiset<std::string> ids;
  for (const auto& f : cv.folds) {
    EXPECT_DOUBLE_EQ(*f.f1, 1.0);
    EXPECT_DOUBLE_EQ(*f.f2, 1.0);
    ids.insert(f.member_ids.begin(), f.member_ids.end());
  }
  EXPECT_EQ(ids.size(), data.size());
  EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(), data.size());
  EXPECT_THROW(cross_validate(labeled(3), 5, a, 3, default_analysis_template()), ConfigError);
  EXPECT_THROW(cross_validate(labeled(3), 1, a, 3, default_analysis_template()), ConfigError);
}

TEST(LexiconStub, ScoresDistinctCues) {
  LexiconAnalyzerStub stub({"verify", "account", "urgent", "password", "click", "bank"});
  auto strong = analyze_email(email("a", "urgent: verify your bank account password, click here"), stub,
                              default_analysis_template());
  EXPECT_TRUE(strong.is_phishing);
  EXPECT_EQ(strong.phishing_score, 6);
  auto weak = analyze_email(email("b", "lunch at noon"), stub, default_analysis_template());
  EXPECT_FALSE(weak.is_phishing);
  EXPECT_EQ(weak.phishing_score, 0);
}

}  // namespace
}  // namespace phishevo::validate
