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

#include "phishevo/advloop.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "phishevo/common.h"

namespace phishevo::advloop {

StepLosses discriminator_step(detector::TextClassifier& discriminator,
                              std::span<const std::string> real,
                              std::span<const std::string> generated, double lr,
                              double clip_norm) {
  if (real.empty() || generated.empty()) {
    throw ConfigError("discriminator_step needs non-empty real and generated batches");
  }
  std::vector<detector::EncodedSequence> real_seq, gen_seq;
  for (const auto& b : real) real_seq.push_back(discriminator.encode(b));
  for (const auto& b : generated) gen_seq.push_back(discriminator.encode(b));

  // Both expectations carry equal total weight.
  const double wr = 1.0 / static_cast<double>(real_seq.size());
  const double wg = 1.0 / static_cast<double>(gen_seq.size());
  auto& model = discriminator.mutable_model();
  auto grads = model.zero_grads();
  StepLosses losses;
  for (const auto& s : real_seq) losses.real_loss += wr * model.accumulate_gradient(s, 1.0, grads, wr);
  for (const auto& s : gen_seq) losses.generated_loss += wg * model.accumulate_gradient(s, 0.0, grads, wg);
  if (!std::isfinite(losses.real_loss) || !std::isfinite(losses.generated_loss)) {
    throw NumericError("NaN loss in discriminator step");
  }
  const double norm = std::sqrt(grads.squared_norm());
  if (!std::isfinite(norm)) throw NumericError("non-finite discriminator gradient");
  if (clip_norm > 0 && norm > clip_norm) grads.scale(clip_norm / norm);
  if (lr != 0.0) model.apply_gradients(grads, lr);
  return losses;
}

std::vector<ScoredRecord> generator_feedback(const corpus::Corpus& generated,
                                             const detector::ProbabilityModel& discriminator,
                                             std::size_t top_k) {
  if (top_k > generated.size()) throw ConfigError("top_k exceeds generated batch size");
  std::vector<ScoredRecord> scored;
  scored.reserve(generated.size());
  for (const auto& r : generated) scored.push_back({r, discriminator.probability(r.body())});
  std::sort(scored.begin(), scored.end(), [](const ScoredRecord& a, const ScoredRecord& b) {
    return a.score != b.score ? a.score > b.score : a.record.id() < b.record.id();
  });
  scored.erase(scored.begin() + static_cast<std::ptrdiff_t>(top_k), scored.end());
  return scored;
}

nlohmann::ordered_json RoundReport::to_json() const {
  nlohmann::ordered_json j;
  j["round"] = round;
  j["real_loss"] = real_loss;
  j["generated_loss"] = generated_loss;
  j["mean_generated_score"] = mean_generated_score;
  j["mean_real_score"] = mean_real_score;
  j["feedback_ids"] = feedback_ids;
  j["generated_batch_size"] = generated_batch_size;
  return j;
}

RoundReport RoundReport::from_json(const nlohmann::json& j) {
  RoundReport r;
  r.round = j.at("round").get<std::size_t>();
  r.real_loss = j.at("real_loss").get<double>();
  r.generated_loss = j.at("generated_loss").get<double>();
  r.mean_generated_score = j.at("mean_generated_score").get<double>();
  r.mean_real_score = j.at("mean_real_score").get<double>();
  r.feedback_ids = j.at("feedback_ids").get<std::vector<std::string>>();
  r.generated_batch_size = j.at("generated_batch_size").get<std::size_t>();
  return r;
}

std::vector<RoundReport> read_round_reports(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError(path, "round reports not found");
  std::vector<RoundReport> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) out.push_back(RoundReport::from_json(nlohmann::json::parse(line)));
  }
  return out;
}

namespace {

double mean_score(const detector::ProbabilityModel& model, std::span<const std::string> bodies) {
  double s = 0.0;
  for (const auto& b : bodies) s += model.probability(b);
  return bodies.empty() ? 0.0 : s / static_cast<double>(bodies.size());
}

}  // namespace

GanResult run_gan(llm::GeneratorBackend& generator, detector::TextClassifier& discriminator,
                  const corpus::Corpus& real, const prompt::TopicRegistry& topics,
                  const GanConfig& config,
                  const std::optional<std::filesystem::path>& reports_path) {
  if (config.rounds == 0) return {};
  if (real.empty()) throw ConfigError("run_gan needs a non-empty real corpus");
  if (topics.empty()) throw ConfigError("run_gan needs at least one topic");
  if (config.batch == 0 || config.top_k > config.batch) {
    throw ConfigError("run_gan needs batch >= 1 and top_k <= batch");
  }
  std::vector<std::string> real_bodies;
  for (const auto& r : real) real_bodies.push_back(r.body());

  std::optional<std::ofstream> sink;
  if (reports_path) {
    if (reports_path->has_parent_path()) std::filesystem::create_directories(reports_path->parent_path());
    sink.emplace(*reports_path, std::ios::app);
  }

  GanResult result;
  std::vector<std::string> exemplars;
  for (std::size_t round = 0; round < config.rounds; ++round) {
    Rng rng(derive_seed(config.seed, round));
    const auto& topic = topics.sets()[rng.uniform_index(topics.size())];
    if (round == 0 || exemplars.empty()) {
      exemplars = prompt::sample_exemplars(real_bodies, config.exemplars_per_prompt, rng);
    }
    auto rendered = prompt::build_prompt(config.label, topic, exemplars, prompt::Mode::kTrain,
                                         config.prompt_options);
    auto generated = llm::generate_candidates(rendered, config.batch, generator,
                                              derive_seed(config.seed, 1000 + round))
                         .records;
    std::vector<std::string> gen_bodies;
    for (const auto& r : generated) gen_bodies.push_back(r.body());
    auto real_batch = prompt::sample_exemplars(real_bodies, config.batch, rng);

    RoundReport report;
    report.round = round;
    report.generated_batch_size = generated.size();
    report.mean_generated_score = mean_score(discriminator, gen_bodies);
    report.mean_real_score = mean_score(discriminator, real_batch);
    for (std::size_t step = 0; step < config.steps_per_round; ++step) {
      auto losses = discriminator_step(discriminator, real_batch, gen_bodies, config.lr,
                                       config.clip_norm);
      report.real_loss += losses.real_loss / static_cast<double>(config.steps_per_round);
      report.generated_loss += losses.generated_loss / static_cast<double>(config.steps_per_round);
    }
    result.feedback = generator_feedback(generated, discriminator, config.top_k);
    exemplars.clear();
    for (const auto& f : result.feedback) {
      report.feedback_ids.push_back(f.record.id());
      exemplars.push_back(f.record.body());
    }
    if (sink) {
      *sink << report.to_json().dump() << "\n";
      sink->flush();
    }
    result.reports.push_back(std::move(report));
    result.last_batch = std::move(generated);
  }
  return result;
}

}  // namespace phishevo::advloop
