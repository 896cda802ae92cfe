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

#include "phishevo/corpus.h"
#include "test_util.h"

namespace phishevo::corpus {
namespace {

EmailRecord rec(const std::string& id, const std::string& body, Label label = Label::kPhishing,
                const std::string& source = "s") {
  return EmailRecord(id, source, label, body, Origin::kIngested);
}

std::string words(std::size_t n, const std::string& w = "w") {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += (i ? " " : "") + w + std::to_string(i);
  return out;
}

TEST(Ingest, EmptyFileGivesEmptyCorpus) {
  testing::TempDir dir("ingest");
  write_file(dir / "a.jsonl", "");
  auto r = ingest_jsonl(dir / "a.jsonl");
  EXPECT_TRUE(r.records.empty());
  EXPECT_EQ(r.skipped, 0u);
}

TEST(Ingest, IdenticalLinesGetIdenticalIds) {
  testing::TempDir dir("ingest");
  const std::string line = R"({"body":"hello there","label":"phishing","source":"x"})";
  write_file(dir / "a.jsonl", line + "\n" + line + "\n");
  auto r = ingest_jsonl(dir / "a.jsonl");
  ASSERT_EQ(r.records.size(), 2u);
  EXPECT_EQ(r.records[0].id(), r.records[1].id());
}

TEST(Ingest, LenientSkipsMalformedLine) {
  testing::TempDir dir("ingest");
  write_file(dir / "a.jsonl",
             "{\"body\":\"a\",\"label\":\"benign\",\"source\":\"x\"}\n{oops\n"
             "{\"body\":\"b\",\"label\":\"phishing\",\"source\":\"x\"}\n");
  auto r = ingest_jsonl(dir / "a.jsonl", false);
  EXPECT_EQ(r.records.size(), 2u);
  EXPECT_EQ(r.skipped, 1u);
  ASSERT_EQ(r.problems.size(), 1u);
  EXPECT_NE(r.problems[0].find("line 2"), std::string::npos);
  EXPECT_THROW(ingest_jsonl(dir / "a.jsonl", true), ParseError);
}

TEST(Ingest, MissingFile) {
  EXPECT_THROW(ingest_jsonl("/nonexistent/x.jsonl"), MissingArtifactError);
}

TEST(Ingest, RoundTripsThroughJsonl) {
  testing::TempDir dir("ingest");
  Corpus c = {rec("a", "one two", Label::kBenign), rec("b", "three", Label::kPhishing)};
  write_jsonl(dir / "c.jsonl", c);
  auto r = ingest_jsonl(dir / "c.jsonl");
  EXPECT_EQ(r.records, c);
}

TEST(Normalize, CollapsesWhitespace) {
  auto r = normalize_text(rec("a", "a\t b\n\nc"));
  EXPECT_EQ(r.body(), "a b c");
  EXPECT_EQ(r.token_count(), 3u);
}

TEST(Normalize, IdempotentAndEmpty) {
  auto once = normalize_text(rec("a", "  x \x01 y  "));
  EXPECT_EQ(normalize_text(once).body(), once.body());
  auto empty = normalize_text(rec("a", ""));
  EXPECT_EQ(empty.body(), "");
  EXPECT_EQ(empty.token_count(), 0u);
}

TEST(Dedup, IdenticalBodiesKeepOne) {
  auto r = dedup({rec("a", "same body here"), rec("b", "same body here")}, 3, 1.0);
  ASSERT_EQ(r.corpus.size(), 1u);
  EXPECT_EQ(r.corpus[0].id(), "a");
  EXPECT_EQ(r.exact_removed, 1u);
}

TEST(Dedup, LowJaccardKeepsBoth) {
  // 2-shingles {ab,bc,cd} vs {ab,by,yz}: Jaccard 1/5.
  const auto sa = shingle_hashes("a b c d", 2);
  const auto sb = shingle_hashes("a b y z", 2);
  EXPECT_DOUBLE_EQ(jaccard(sa, sb), 0.2);
  auto r = dedup({rec("a", "a b c d"), rec("b", "a b y z")}, 2, 0.8);
  EXPECT_EQ(r.corpus.size(), 2u);
}

TEST(Dedup, ThresholdZeroKeepsFirstOnly) {
  auto r = dedup({rec("a", "p q r"), rec("b", "x y z"), rec("c", "k l m")}, 3, 0.0);
  ASSERT_EQ(r.corpus.size(), 1u);
  EXPECT_EQ(r.corpus[0].id(), "a");
}

TEST(Dedup, RetainedCountStableUnderPermutation) {
  Corpus c = {rec("a", "x y z w"), rec("b", "p q r s"), rec("c", "x y z w"), rec("d", "p q r s")};
  Corpus p = {c[2], c[3], c[0], c[1]};
  EXPECT_EQ(dedup(c).corpus.size(), dedup(p).corpus.size());
}

TEST(LengthFilter, InclusiveBounds) {
  Corpus c = {rec("a", words(64)), rec("b", words(513)), rec("c", ""), rec("d", words(512))};
  auto f = length_filter(c, 64, 512);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0].id(), "a");
  EXPECT_EQ(f[1].id(), "d");
  EXPECT_EQ(length_filter(f, 64, 512), f);
}

TEST(Split, EightTwo) {
  Corpus c;
  for (int i = 0; i < 10; ++i) c.push_back(rec("r" + std::to_string(i), "b" + std::to_string(i)));
  auto s = split(c, 0.8, 3);
  EXPECT_EQ(s.train.size(), 8u);
  EXPECT_EQ(s.eval.size(), 2u);
  auto t = split(c, 0.8, 3);
  EXPECT_EQ(s.train, t.train);
}

TEST(Split, Stratified) {
  Corpus c = {rec("p1", "a"), rec("p2", "b"), rec("p3", "c"), rec("b1", "d", Label::kBenign),
              rec("b2", "e", Label::kBenign)};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto s = split(c, 0.8, seed);
    ASSERT_EQ(s.train.size(), 4u);
    std::size_t phish = 0;
    for (const auto& r : s.train) phish += r.label() == Label::kPhishing;
    EXPECT_GE(phish, 2u);
    EXPECT_LE(phish, 3u);
    EXPECT_GE(4u - phish, 1u);
    EXPECT_LE(4u - phish, 2u);
  }
  EXPECT_THROW(split({rec("a", "x")}, 0.8, 0), ConfigError);
}

TEST(Manifest, StagesReconcile) {
  CorpusManifest m;
  Corpus before = {rec("a", "x", Label::kPhishing, "s1"), rec("b", "y", Label::kBenign, "s2")};
  Corpus after = {before[0]};
  m.record_stage("filter", before, after);
  ASSERT_EQ(m.per_source.at("s2").size(), 1u);
  EXPECT_EQ(m.per_source.at("s2")[0].before, 1u);
  EXPECT_EQ(m.per_source.at("s2")[0].after, 0u);
  EXPECT_EQ(manifest_path_for("dir/c.jsonl"), std::filesystem::path("dir/c.manifest.json"));
}

}  // namespace
}  // namespace phishevo::corpus
