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

#include "phishevo/prompt.h"
#include "test_util.h"

namespace phishevo::prompt {
namespace {

using corpus::Label;

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

TEST(BuildPrompt, TrainModeHasThreeSections) {
  auto topics = TopicKeywordSet::make("Account", "verify", {"account", "verify"});
  std::vector<std::string> ex = {"EXEMPLAR ONE body"};
  auto r = build_prompt(Label::kPhishing, topics, ex, Mode::kTrain);
  const PromptOptions o;
  const auto i = r.text.find(o.instruction_header);
  const auto t = r.text.find(o.topics_header);
  const auto e = r.text.find(o.emails_header);
  ASSERT_NE(i, std::string::npos);
  ASSERT_NE(t, std::string::npos);
  ASSERT_NE(e, std::string::npos);
  EXPECT_LT(i, t);
  EXPECT_LT(t, e);
  EXPECT_NE(r.text.find("EXEMPLAR ONE body"), std::string::npos);
  EXPECT_NE(r.system.find("phishing"), std::string::npos);
}

TEST(BuildPrompt, InferModeOmitsEmails) {
  auto topics = TopicKeywordSet::make("Account", "verify", {"account"});
  std::vector<std::string> ex = {"SECRET EXEMPLAR"};
  auto r = build_prompt(Label::kPhishing, topics, ex, Mode::kInfer);
  EXPECT_EQ(count_of(r.text, "### "), 2u);
  EXPECT_EQ(r.text.find("SECRET EXEMPLAR"), std::string::npos);
  EXPECT_TRUE(r.bundle.exemplars.empty());
}

TEST(BuildPrompt, DeterministicAndValidated) {
  auto topics = TopicKeywordSet::make("A", "b", {"x"});
  std::vector<std::string> ex = {"e"};
  EXPECT_EQ(build_prompt(Label::kBenign, topics, ex, Mode::kTrain).text,
            build_prompt(Label::kBenign, topics, ex, Mode::kTrain).text);
  EXPECT_NE(build_prompt(Label::kBenign, topics, ex, Mode::kTrain).text,
            build_prompt(Label::kPhishing, topics, ex, Mode::kTrain).text);
  TopicKeywordSet empty{"A", "b", {}};
  EXPECT_THROW(build_prompt(Label::kBenign, empty, ex, Mode::kTrain), ConfigError);
  EXPECT_THROW(build_prompt(Label::kBenign, topics, {}, Mode::kTrain), ConfigError);
}

TEST(Topics, KeywordsLowercasedAndDeduplicated) {
  auto t = TopicKeywordSet::make("A", "b", {"Online", "online", "Course"});
  EXPECT_EQ(t.keywords, (std::vector<std::string>{"online", "course"}));
}

TEST(Topics, ParseTable) {
  auto reg = parse_topics_csv("dominant,topic,keywords\nEducation,Online Learning,online;course;student\n");
  ASSERT_EQ(reg.size(), 1u);
  EXPECT_EQ(reg.sets()[0].keywords.size(), 3u);
  EXPECT_EQ(reg.lookup("Education").size(), 1u);
  EXPECT_EQ(reg.lookup("Online Learning").size(), 1u);
  EXPECT_TRUE(parse_topics_csv("").empty());
}

TEST(Topics, DuplicateRowNamesPair) {
  try {
    parse_topics_csv("dominant,topic,keywords\nA,B,x\nA,B,y\n");
    FAIL() << "expected an error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("(A, B)"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_THROW(parse_topics_csv("dominant,topic,keywords\nA,B,\n"), Error);
}

TEST(Topics, RegisterFromFile) {
  testing::TempDir dir("topics");
  write_file(dir / "t.csv", "dominant,topic,keywords\nX,Y,a;b\n");
  EXPECT_EQ(register_topics(dir / "t.csv").size(), 1u);
  EXPECT_THROW(register_topics(dir / "missing.csv"), MissingArtifactError);
}

TEST(Loopback, UnionKeepsOrder) {
  TopicRegistry reg;
  reg.add(TopicKeywordSet::make("D", "T0", {"a", "b"}));
  std::vector<ExtractedTopic> ex = {{"T0", {"b", "c"}}};
  auto merged = merge_loopback(reg, ex);
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_EQ(merged.sets()[0].keywords, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(merge_loopback(merged, ex).to_csv(), merged.to_csv());
}

TEST(Loopback, NewTopicAppendedAndEmptyIsIdentity) {
  std::vector<ExtractedTopic> ex = {{"T6", {"shipment", "address"}}};
  auto merged = merge_loopback(TopicRegistry{}, ex);
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_EQ(merged.sets()[0].topic, "T6");
  EXPECT_EQ(merged.sets()[0].keywords, (std::vector<std::string>{"shipment", "address"}));
  EXPECT_EQ(merge_loopback(merged, {}).to_csv(), merged.to_csv());
}

TEST(Exemplars, SeededSampling) {
  std::vector<std::string> pool = {"a", "b", "c", "d"};
  Rng r1(5), r2(5);
  EXPECT_EQ(sample_exemplars(pool, 2, r1), sample_exemplars(pool, 2, r2));
  Rng r3(1);
  EXPECT_EQ(sample_exemplars(pool, 10, r3).size(), 4u);
}

}  // namespace
}  // namespace phishevo::prompt
