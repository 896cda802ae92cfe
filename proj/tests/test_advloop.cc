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

#include <cmath>
#include <map>
#include <set>

#include "phishevo/advloop.h"
#include "test_util.h"

namespace phishevo::advloop {
namespace {

using corpus::EmailRecord;
using corpus::Label;
using corpus::Origin;

detector::TextClassifier small_classifier(std::span<const std::string> bodies, std::uint64_t seed) {
  auto vocab = detector::build_vocab(bodies, 1, 1000);
  detector::ClassifierShape shape{vocab.size(), 8, 8};
  return detector::TextClassifier(std::move(vocab), detector::RecurrentClassifier(shape, seed), 32);
}

std::vector<std::string> sentences(const std::vector<std::string>& words, std::size_t n,
                                   std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> t;
    for (int j = 0; j < 6; ++j) t.push_back(words[rng.uniform_index(words.size())]);
    out.push_back(join(t, " "));
  }
  return out;
}

double mean_prob(const detector::ProbabilityModel& m, std::span<const std::string> xs) {
  double s = 0;
  for (const auto& x : xs) s += m.probability(x);
  return s / static_cast<double>(xs.size());
}

TEST(DiscriminatorStep, IdenticalBatchesHaveEqualLosses) {
  auto real = sentences(testing::filler_words(), 6, 1);
  auto clf = small_classifier(real, 3);
  // Fresh discriminator: zero output projection, D = 0.5 everywhere.
  auto l = discriminator_step(clf, real, real, 0.1);
  EXPECT_DOUBLE_EQ(l.real_loss, l.generated_loss);
}

TEST(DiscriminatorStep, ZeroLearningRateLeavesWeights) {
  auto real = sentences(testing::filler_words(), 4, 1);
  auto gen = sentences({"zz", "yy", "xx"}, 4, 2);
  std::vector<std::string> all = real;
  all.insert(all.end(), gen.begin(), gen.end());
  auto clf = small_classifier(all, 3);
  const auto before = clf.model().serialize();
  discriminator_step(clf, real, gen, 0.0);
  EXPECT_EQ(clf.model().serialize(), before);
  EXPECT_THROW(discriminator_step(clf, real, {}, 0.1), ConfigError);
}

TEST(DiscriminatorStep, SeparatesDisjointVocabularies) {
  auto real = sentences({"alpha", "bravo", "charlie", "delta", "echo"}, 16, 1);
  auto gen = sentences({"kilo", "lima", "mike", "november", "oscar"}, 16, 2);
  std::vector<std::string> all = real;
  all.insert(all.end(), gen.begin(), gen.end());
  auto clf = small_classifier(all, 5);
  for (int i = 0; i < 50; ++i) discriminator_step(clf, real, gen, 0.5);
  EXPECT_GT(mean_prob(clf, real) - mean_prob(clf, gen), 0.5);
}

TEST(DiscriminatorStep, SameDistributionStaysClose) {
  auto all = sentences(testing::filler_words(), 128, 21);
  std::vector<std::string> real(all.begin(), all.begin() + 64), gen(all.begin() + 64, all.end());
  auto clf = small_classifier(all, 4);
  for (int i = 0; i < 200; ++i) discriminator_step(clf, real, gen, 0.1);
  EXPECT_LT(std::abs(mean_prob(clf, real) - mean_prob(clf, gen)), 0.1);
}

class TableModel final : public detector::ProbabilityModel {
 public:
  explicit TableModel(std::map<std::string, double> t) : t_(std::move(t)) {}
  double probability(std::string_view body) const override { return t_.at(std::string(body)); }

 private:
  std::map<std::string, double> t_;
};

corpus::Corpus records(const std::vector<std::pair<std::string, std::string>>& id_body) {
  corpus::Corpus c;
  for (const auto& [id, body] : id_body) c.emplace_back(id, "g", Label::kPhishing, body, Origin::kGenerated);
  return c;
}

TEST(Feedback, TopKByScoreThenId) {
  TableModel m({{"x", 0.9}, {"y", 0.2}, {"z", 0.2}});
  auto c = records({{"a", "x"}, {"b", "y"}, {"c", "z"}});
  auto one = generator_feedback(c, m, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].record.id(), "a");
  auto all = generator_feedback(c, m, 3);
  EXPECT_EQ(all[1].record.id(), "b");
  EXPECT_EQ(all[2].record.id(), "c");
  TableModel tie({{"y", 0.5}, {"z", 0.5}});
  EXPECT_EQ(generator_feedback(records({{"q", "y"}, {"p", "z"}}), tie, 1)[0].record.id(), "p");
  EXPECT_THROW(generator_feedback(c, m, 4), ConfigError);
}

struct GanFixture {
  corpus::Corpus real;
  prompt::TopicRegistry topics;
  std::vector<std::string> bodies;

  GanFixture() {
    bodies = sentences({"verify", "account", "now", "click", "link", "bank", "update", "urgent",
                        "password", "secure", "login", "today"},
                       30, 7);
    for (std::size_t i = 0; i < bodies.size(); ++i) {
      real.emplace_back("r" + std::to_string(i), "s", Label::kPhishing, bodies[i], Origin::kIngested);
    }
    topics.add(prompt::TopicKeywordSet::make("A", "acct", {"account", "verify"}));
    topics.add(prompt::TopicKeywordSet::make("A", "bank", {"bank", "update"}));
  }
};

GanConfig gan_config(std::uint64_t seed) {
  GanConfig c;
  c.rounds = 5;
  c.batch = 6;
  c.top_k = 2;
  c.steps_per_round = 3;
  c.lr = 0.3;
  c.seed = seed;
  return c;
}

TEST(RunGan, ZeroRoundsIsIdentity) {
  GanFixture f;
  auto clf = small_classifier(f.bodies, 1);
  const auto before = clf.model().serialize();
  llm::MarkovStubGenerator gen(f.bodies);
  auto cfg = gan_config(1);
  cfg.rounds = 0;
  auto r = run_gan(gen, clf, f.real, f.topics, cfg);
  EXPECT_TRUE(r.reports.empty());
  EXPECT_EQ(clf.model().serialize(), before);
}

TEST(RunGan, FiveRoundsDeterministic) {
  GanFixture f;
  testing::TempDir dir("gan");
  auto run = [&](const std::filesystem::path& p) {
    auto clf = small_classifier(f.bodies, 1);
    llm::MarkovStubGenerator gen(f.bodies);
    auto r = run_gan(gen, clf, f.real, f.topics, gan_config(42), p);
    return std::pair{r, clf.model().serialize()};
  };
  auto [a, wa] = run(dir / "a.jsonl");
  auto [b, wb] = run(dir / "b.jsonl");
  ASSERT_EQ(a.reports.size(), 5u);
  EXPECT_EQ(a.reports, b.reports);
  EXPECT_EQ(wa, wb);
  EXPECT_EQ(read_file(dir / "a.jsonl"), read_file(dir / "b.jsonl"));
  EXPECT_EQ(read_round_reports(dir / "a.jsonl"), a.reports);
  for (std::size_t i = 0; i < a.reports.size(); ++i) {
    EXPECT_EQ(a.reports[i].round, i);
    EXPECT_GT(a.reports[i].mean_generated_score, 0.0);
    EXPECT_LT(a.reports[i].mean_generated_score, 1.0);
  }
  std::set<std::string> batch_ids;
  for (const auto& r : a.last_batch) batch_ids.insert(r.id());
  for (const auto& id : a.reports.back().feedback_ids) EXPECT_TRUE(batch_ids.count(id));
}

// Least-squares slope of the per-round mean generated score.
double score_slope(const std::vector<RoundReport>& reports) {
  const double n = static_cast<double>(reports.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : reports) {
    const double x = static_cast<double>(r.round), y = r.mean_generated_score;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Feedback exemplars pull the stub toward what the discriminator rates as
// real, so the generated score should not trend down; majority of 3 seeds.
TEST(RunGan, GeneratedScoreTrendOverSeeds) {
  GanFixture f;
  int non_decreasing = 0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto clf = small_classifier(f.bodies, seed);
    llm::MarkovStubGenerator gen(f.bodies);
    auto r = run_gan(gen, clf, f.real, f.topics, gan_config(seed));
    non_decreasing += score_slope(r.reports) >= 0.0;
  }
  EXPECT_GE(non_decreasing, 2);
}

class FailingGenerator final : public llm::GeneratorBackend {
 public:
  explicit FailingGenerator(llm::GeneratorBackend& inner, int fail_at) : inner_(inner), fail_at_(fail_at) {}
  std::string name() const override { return "failing"; }
  std::vector<std::optional<std::string>> generate(const prompt::RenderedPrompt& p, std::size_t n,
                                                   std::uint64_t seed) override {
    if (calls_++ == fail_at_) throw BackendError("scripted failure");
    return inner_.generate(p, n, seed);
  }

 private:
  llm::GeneratorBackend& inner_;
  int fail_at_;
  int calls_ = 0;
};

TEST(RunGan, FailurePersistsCompletedRounds) {
  GanFixture f;
  testing::TempDir dir("gan");
  auto clf = small_classifier(f.bodies, 1);
  llm::MarkovStubGenerator inner(f.bodies);
  FailingGenerator gen(inner, 2);
  EXPECT_THROW(run_gan(gen, clf, f.real, f.topics, gan_config(3), dir / "r.jsonl"), BackendError);
  EXPECT_EQ(read_round_reports(dir / "r.jsonl").size(), 2u);
}

TEST(RoundReport, JsonRoundTrip) {
  RoundReport r{3, 0.25, 0.5, 0.125, 0.75, {"a", "b"}, 6};
  EXPECT_EQ(RoundReport::from_json(nlohmann::json::parse(r.to_json().dump())), r);
}

}  // namespace
}  // namespace phishevo::advloop
