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

#include <string>
#include <vector>

#include "phishevo/common.h"
#include "phishevo/persuasion.h"

namespace phishevo::persuasion {
namespace {

const char* kFixture = R"(# test lexicon
[Authority]
entries = ["official", "bank", "security team"]
[Reciprocity]
entries = ["offer cooperation", "refund"]
liwc = ["reward"]
[Scarcity]
entries = ["urgent",
           "expire"]
[Liking]
entries = ["dear"]
[SocialProof]
entries = ["everyone"]
[Consistency]
entries = ["agreed"]
)";

LexiconSet fixture() { return parse_lexicon(kFixture); }

TEST(Lexicon, ParsesSixSections) {
  auto lex = fixture();
  EXPECT_EQ(lex.lexicons().size(), 6u);
  EXPECT_EQ(lex.lexicon(Principle::kScarcity).entries, (std::vector<std::string>{"urgent", "expire"}));
  EXPECT_EQ(lex.lexicon(Principle::kReciprocity).liwc_categories, (std::vector<std::string>{"reward"}));
}

TEST(Lexicon, DuplicateEntryNamesBothPrinciples) {
  std::string text = kFixture;
  text.replace(text.find("\"dear\""), 6, "\"urgent\"");
  try {
    parse_lexicon(text);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("Scarcity"), std::string::npos) << msg;
    EXPECT_NE(msg.find("Liking"), std::string::npos) << msg;
  }
}

TEST(Lexicon, MissingSectionRejected) {
  std::string text = kFixture;
  text = text.substr(0, text.find("[Consistency]"));
  EXPECT_THROW(parse_lexicon(text), Error);
}

TEST(Lexicon, PhraseMatchedAsOneUnit) {
  auto lex = fixture();
  std::vector<std::string> toks = {"we", "offer", "cooperation", "today"};
  auto m = lex.find_matches(toks);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].principle, Principle::kReciprocity);
  EXPECT_EQ(m[0].begin, 1u);
  EXPECT_EQ(m[0].end, 3u);
  EXPECT_EQ(m[0].entry, "offer cooperation");
}

TEST(Lexicon, BundledFileLoads) {
  auto lex = load_lexicon(std::filesystem::path(PHISHEVO_SOURCE_DIR) / "data" / "persuasion_lexicon.toml");
  EXPECT_EQ(lex.lexicons().size(), 6u);
}

TEST(Dps, EmptyBody) {
  auto p = dps("", fixture());
  EXPECT_EQ(p.present, 0u);
  for (double s : p.scores) EXPECT_EQ(s, 0.0);
}

TEST(Dps, ThreeAuthorityMatchesGiveHalf) {
  auto p = dps("Official notice from your bank and its Security Team.", fixture(), 3.0);
  EXPECT_EQ(p.count(Principle::kAuthority), 3u);
  EXPECT_DOUBLE_EQ(p.score(Principle::kAuthority), 0.5);
  EXPECT_EQ(p.present, 1u);
}

TEST(Dps, RepeatedPhrase) {
  auto p = dps("please offer cooperation and more offer cooperation", fixture());
  EXPECT_EQ(p.count(Principle::kReciprocity), 2u);
  EXPECT_DOUBLE_EQ(p.score(Principle::kReciprocity), 0.4);
  EXPECT_EQ(p.matched_tokens, 4u);
}

TEST(Dps, MonotoneAndBelowOne) {
  auto lex = fixture();
  std::string body = "dear user";
  double prev = 0.0;
  for (int i = 0; i < 30; ++i) {
    body += " urgent";
    auto p = dps(body, lex);
    EXPECT_GT(p.score(Principle::kScarcity), prev);
    EXPECT_LT(p.score(Principle::kScarcity), 1.0);
    EXPECT_DOUBLE_EQ(p.score(Principle::kLiking), 0.25);
    EXPECT_LE(p.matched_tokens, count_whitespace_tokens(body));
    prev = p.score(Principle::kScarcity);
  }
}

PrincipleProfile with_present(std::size_t n) {
  PrincipleProfile p;
  for (std::size_t i = 0; i < n; ++i) {
    p.matches[i] = 1;
    p.scores[i] = 0.25;
  }
  p.present = n;
  return p;
}

TEST(Histogram, CumulativeFractions) {
  std::vector<PrincipleProfile> ps = {with_present(6), with_present(5), with_present(0)};
  auto h = principle_histogram(ps);
  EXPECT_DOUBLE_EQ(h[0], 1.0);
  EXPECT_DOUBLE_EQ(h[5], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(h[6], 1.0 / 3.0);
  for (std::size_t j = 1; j < h.size(); ++j) EXPECT_LE(h[j], h[j - 1]);
}

TEST(Histogram, AllSixEverywhere) {
  std::vector<PrincipleProfile> ps(4, with_present(6));
  for (double v : principle_histogram(ps)) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(Contexts, BeforeAndAfterGrams) {
  std::vector<std::string> docs = {"your account verification is urgent now"};
  auto rows = match_contexts(docs, fixture(), 3, 6);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].principle, Principle::kScarcity);
  EXPECT_EQ(rows[0].match, "urgent");
  EXPECT_EQ(rows[0].frequency, 1u);
  EXPECT_EQ(rows[0].before, "verification is");
  EXPECT_EQ(rows[0].after, "now");
}

TEST(Contexts, NoMatchesNoRows) {
  std::vector<std::string> docs = {"nothing relevant here"};
  EXPECT_TRUE(match_contexts(docs, fixture()).empty());
}

TEST(Contexts, FrequencyCountsAcrossDocs) {
  std::vector<std::string> docs = {"an urgent note", "very urgent indeed"};
  auto rows = match_contexts(docs, fixture());
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].frequency, 2u);
  auto csv = contexts_to_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "Principle,Matching,Context-before,Context-after");
}

}  // namespace
}  // namespace phishevo::persuasion
