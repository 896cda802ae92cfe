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

// Bidirectional LSTM text classifier trained from scratch.
//
// The classifier embeds tokens, runs a forward and a backward LSTM over the
// unpadded part of the sequence, concatenates the two final hidden states and
// projects them to one logit. Gradients are computed by hand (backpropagation
// through time) and applied with plain SGD and global-norm clipping.
//
// Gate layout inside every 4H block: [input, forget, output, candidate].

#ifndef PHISHEVO_DETECTOR_H_
#define PHISHEVO_DETECTOR_H_

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "phishevo/corpus.h"

namespace phishevo::detector {

class Vocabulary {
 public:
  static constexpr std::int32_t kPad = 0;
  static constexpr std::int32_t kUnk = 1;
  static constexpr std::size_t kReserved = 2;

  Vocabulary();
  // `tokens` are the non-reserved entries in index order.
  explicit Vocabulary(const std::vector<std::string>& tokens);

  std::int32_t index(std::string_view token) const;
  const std::string& token(std::int32_t index) const { return itos_.at(static_cast<std::size_t>(index)); }
  std::size_t size() const { return itos_.size(); }
  bool contains(std::string_view token) const;

  nlohmann::ordered_json to_json() const;
  static Vocabulary from_json(const nlohmann::json& j);

 private:
  std::vector<std::string> itos_;
  std::unordered_map<std::string, std::int32_t> stoi_;
};

// Tokens with frequency >= min_freq, most frequent first, ties broken
// lexicographically, at most max_size non-reserved entries.
Vocabulary build_vocab(std::span<const std::string> bodies, std::size_t min_freq,
                       std::size_t max_size);

struct EncodedSequence {
  std::vector<std::int32_t> ids;  // padded to max_len
  std::size_t length = 0;         // unpadded length
};

EncodedSequence encode(std::string_view body, const Vocabulary& vocab,
                       std::size_t max_len = 512);

struct ClassifierShape {
  std::size_t vocab_size = 0;
  std::size_t embed_dim = 1024;
  std::size_t hidden_dim = 256;
};

struct LstmWeights {
  Eigen::MatrixXd wx;  // 4H x E
  Eigen::MatrixXd wh;  // 4H x H
  Eigen::VectorXd b;   // 4H
};

struct ClassifierParams {
  Eigen::MatrixXd embedding;  // V x E
  LstmWeights forward;
  LstmWeights backward;
  Eigen::VectorXd out_w;  // 2H
  double out_b = 0.0;
};

struct ClassifierGrads {
  std::map<std::int32_t, Eigen::VectorXd> embedding;  // touched rows only
  LstmWeights forward;
  LstmWeights backward;
  Eigen::VectorXd out_w;
  double out_b = 0.0;

  double squared_norm() const;
  void scale(double factor);
};

class RecurrentClassifier {
 public:
  // Weights are drawn from the seed; the output projection starts at zero.
  RecurrentClassifier(ClassifierShape shape, std::uint64_t seed);

  const ClassifierShape& shape() const { return shape_; }
  const ClassifierParams& params() const { return params_; }
  ClassifierParams& mutable_params() { return params_; }

  // [h_forward_final; h_backward_final] over the unpadded tokens.
  Eigen::VectorXd representation(const EncodedSequence& seq) const;
  double logit(const EncodedSequence& seq) const;
  // Sigmoid of the logit, clamped strictly inside (0, 1).
  double predict_proba(const EncodedSequence& seq) const;

  // Adds weight * d(BCE)/d(params) to `grads` and returns the unweighted loss.
  double accumulate_gradient(const EncodedSequence& seq, double target,
                             ClassifierGrads& grads, double weight = 1.0) const;
  ClassifierGrads zero_grads() const;
  void apply_gradients(const ClassifierGrads& grads, double lr);

  // Flat binary checkpoint (see README for the layout).
  std::string serialize() const;
  static RecurrentClassifier deserialize(std::string_view bytes);
  void save(const std::filesystem::path& path) const;
  static RecurrentClassifier load(const std::filesystem::path& path);

 private:
  RecurrentClassifier(ClassifierShape shape, ClassifierParams params);

  ClassifierShape shape_;
  ClassifierParams params_;
};

struct WeightedExample {
  const EncodedSequence* seq;
  double target;
  double weight;
};

// One SGD update on sum_i weight_i * loss_i with global-norm clipping.
// Returns the weighted loss before the update. Throws NumericError on NaN.
double sgd_step(RecurrentClassifier& model, std::span<const WeightedExample> batch,
                double lr, double clip_norm = 5.0);

struct TrainConfig {
  double lr = 0.1;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  std::size_t batch_size = 8;
  double clip_norm = 5.0;
};

struct LabeledSequence {
  EncodedSequence seq;
  double target = 0.0;  // 1 = positive
};

struct TrainResult {
  std::vector<double> loss_trace;  // mean loss per epoch
};

// Requires at least one example of each class.
TrainResult train(RecurrentClassifier& model, std::span<const LabeledSequence> examples,
                  const TrainConfig& config);

// Anything that maps a body to a positive-class probability.
class ProbabilityModel {
 public:
  virtual ~ProbabilityModel() = default;
  virtual double probability(std::string_view body) const = 0;
};

// Vocabulary + classifier; read-only calls are safe to share across threads.
class TextClassifier final : public ProbabilityModel {
 public:
  TextClassifier(Vocabulary vocab, RecurrentClassifier model, std::size_t max_len = 512);

  double probability(std::string_view body) const override;
  EncodedSequence encode(std::string_view body) const;

  const Vocabulary& vocab() const { return vocab_; }
  const RecurrentClassifier& model() const { return model_; }
  RecurrentClassifier& mutable_model() { return model_; }
  std::size_t max_len() const { return max_len_; }

  // Writes <prefix>.bin (checkpoint) and <prefix>.vocab.json.
  void save(const std::filesystem::path& prefix) const;
  static TextClassifier load(const std::filesystem::path& prefix);

 private:
  Vocabulary vocab_;
  RecurrentClassifier model_;
  std::size_t max_len_;
};

struct DetectorConfig {
  std::size_t embed_dim = 1024;
  std::size_t hidden_dim = 256;
  std::size_t max_len = 512;
  std::size_t min_freq = 1;
  std::size_t max_vocab = 20000;
  TrainConfig train;
};

struct LabeledText {
  std::string body;
  bool positive = false;
};

// Builds a vocabulary over the texts, initializes and trains a classifier.
TextClassifier fit_text_classifier(std::span<const LabeledText> data,
                                   const DetectorConfig& config,
                                   TrainResult* trace = nullptr);

// Continues training an existing classifier on new texts (fixed vocabulary).
TrainResult fine_tune(TextClassifier& classifier, std::span<const LabeledText> data,
                      const TrainConfig& config);

// Precision/recall are std::nullopt when their denominator is zero.
struct ConfusionMetrics {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::optional<double> precision;
  std::optional<double> recall;
  double accuracy = 0.0;

  static ConfusionMetrics from_counts(std::size_t tp, std::size_t fp, std::size_t tn,
                                      std::size_t fn);
  std::size_t total() const { return tp + fp + tn + fn; }
  std::optional<double> f1() const;
  std::optional<double> f2() const;
  nlohmann::ordered_json to_json() const;
};

// decision = probability >= threshold.
ConfusionMetrics evaluate(const ProbabilityModel& model, std::span<const LabeledText> data,
                          double threshold = 0.5);
// Positive class = phishing label.
ConfusionMetrics evaluate(const ProbabilityModel& model, const corpus::Corpus& data,
                          double threshold = 0.5);

// (1+b^2) P R / (b^2 P + R); std::nullopt when P = R = 0.
std::optional<double> f_beta(double precision, double recall, double beta);
std::optional<double> f_beta(std::optional<double> precision, std::optional<double> recall,
                             double beta);

std::vector<LabeledText> labeled_from_corpus(const corpus::Corpus& data);

}  // namespace phishevo::detector

#endif  // PHISHEVO_DETECTOR_H_
