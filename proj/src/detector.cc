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

#include "phishevo/detector.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "phishevo/common.h"

namespace phishevo::detector {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Vocabulary::Vocabulary() : itos_{"<pad>", "<unk>"} {}

Vocabulary::Vocabulary(const std::vector<std::string>& tokens) : Vocabulary() {
  for (const auto& t : tokens) {
    if (stoi_.count(t) || t == "<pad>" || t == "<unk>") {
      throw ConfigError("duplicate vocabulary token '" + t + "'");
    }
    stoi_.emplace(t, static_cast<std::int32_t>(itos_.size()));
    itos_.push_back(t);
  }
}

std::int32_t Vocabulary::index(std::string_view token) const {
  auto it = stoi_.find(std::string(token));
  return it == stoi_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return stoi_.count(std::string(token)) != 0;
}

nlohmann::ordered_json Vocabulary::to_json() const {
  nlohmann::ordered_json j;
  j["pad_index"] = kPad;
  j["unk_index"] = kUnk;
  j["tokens"] = itos_;
  return j;
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
  auto all = j.at("tokens").get<std::vector<std::string>>();
  if (all.size() < kReserved) throw ParseError("vocabulary is missing reserved entries");
  return Vocabulary(std::vector<std::string>(all.begin() + kReserved, all.end()));
}

Vocabulary build_vocab(std::span<const std::string> bodies, std::size_t min_freq,
                       std::size_t max_size) {
  std::unordered_map<std::string, std::size_t> freq;
  for (const auto& body : bodies) {
    for (auto& t : analysis_tokens(body)) ++freq[t];
  }
  std::vector<std::pair<std::string, std::size_t>> entries;
  for (auto& [t, f] : freq) {
    if (f >= min_freq) entries.emplace_back(t, f);
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (entries.size() > max_size) entries.resize(max_size);
  std::vector<std::string> tokens;
  tokens.reserve(entries.size());
  for (auto& e : entries) tokens.push_back(std::move(e.first));
  return Vocabulary(tokens);
}

EncodedSequence encode(std::string_view body, const Vocabulary& vocab, std::size_t max_len) {
  EncodedSequence out;
  out.ids.assign(max_len, Vocabulary::kPad);
  auto tokens = analysis_tokens(body);
  out.length = std::min(tokens.size(), max_len);
  for (std::size_t i = 0; i < out.length; ++i) out.ids[i] = vocab.index(tokens[i]);
  return out;
}

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(-|z|)) + max(z, 0) - z*y
double bce_with_logit(double z, double y) {
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

struct StepCache {
  std::int32_t token;
  VectorXd i, f, o, g, c, c_prev, h_prev, tanh_c;
};

std::vector<std::int32_t> direction_tokens(const EncodedSequence& seq, bool reverse) {
  std::vector<std::int32_t> out(seq.ids.begin(), seq.ids.begin() + static_cast<long>(seq.length));
  if (reverse) std::reverse(out.begin(), out.end());
  return out;
}

VectorXd run_lstm(const LstmWeights& w, const MatrixXd& embedding,
                  const std::vector<std::int32_t>& tokens, std::size_t hidden,
                  std::vector<StepCache>* cache) {
  const auto H = static_cast<Eigen::Index>(hidden);
  VectorXd h = VectorXd::Zero(H);
  VectorXd c = VectorXd::Zero(H);
  for (auto tok : tokens) {
    VectorXd z = w.wx * embedding.row(tok).transpose() + w.wh * h + w.b;
    VectorXd i = z.segment(0, H).unaryExpr(&sigmoid);
    VectorXd f = z.segment(H, H).unaryExpr(&sigmoid);
    VectorXd o = z.segment(2 * H, H).unaryExpr(&sigmoid);
    VectorXd g = z.segment(3 * H, H).array().tanh().matrix();
    VectorXd c_new = f.cwiseProduct(c) + i.cwiseProduct(g);
    VectorXd tanh_c = c_new.array().tanh().matrix();
    VectorXd h_new = o.cwiseProduct(tanh_c);
    if (cache) cache->push_back({tok, i, f, o, g, c_new, c, h, tanh_c});
    h = std::move(h_new);
    c = std::move(c_new);
  }
  return h;
}

void backprop_lstm(const LstmWeights& w, const MatrixXd& embedding,
                   const std::vector<StepCache>& cache, VectorXd dh, LstmWeights& gw,
                   std::map<std::int32_t, VectorXd>& gemb) {
  const auto H = dh.size();
  VectorXd dc = VectorXd::Zero(H);
  VectorXd dz(4 * H);
  for (auto it = cache.rbegin(); it != cache.rend(); ++it) {
    const auto& s = *it;
    VectorXd d_o = dh.cwiseProduct(s.tanh_c);
    dc += dh.cwiseProduct(s.o).cwiseProduct(
        (1.0 - s.tanh_c.array().square()).matrix());
    dz.segment(0, H) = dc.cwiseProduct(s.g).cwiseProduct(s.i.cwiseProduct((1.0 - s.i.array()).matrix()));
    dz.segment(H, H) =
        dc.cwiseProduct(s.c_prev).cwiseProduct(s.f.cwiseProduct((1.0 - s.f.array()).matrix()));
    dz.segment(2 * H, H) = d_o.cwiseProduct(s.o.cwiseProduct((1.0 - s.o.array()).matrix()));
    dz.segment(3 * H, H) = dc.cwiseProduct(s.i).cwiseProduct((1.0 - s.g.array().square()).matrix());

    gw.wx.noalias() += dz * embedding.row(s.token);
    gw.wh.noalias() += dz * s.h_prev.transpose();
    gw.b += dz;
    VectorXd de = w.wx.transpose() * dz;
    auto [slot, inserted] = gemb.try_emplace(s.token, VectorXd::Zero(de.size()));
    slot->second += de;
    dh = w.wh.transpose() * dz;
    dc = dc.cwiseProduct(s.f);
  }
}

LstmWeights zero_lstm(std::size_t embed, std::size_t hidden) {
  const auto E = static_cast<Eigen::Index>(embed);
  const auto H = static_cast<Eigen::Index>(hidden);
  return {MatrixXd::Zero(4 * H, E), MatrixXd::Zero(4 * H, H), VectorXd::Zero(4 * H)};
}

LstmWeights random_lstm(std::size_t embed, std::size_t hidden, Rng& rng) {
  auto w = zero_lstm(embed, hidden);
  const double k = 1.0 / std::sqrt(static_cast<double>(hidden));
  auto fill = [&](auto& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform(-k, k);
  };
  fill(w.wx);
  fill(w.wh);
  for (Eigen::Index r = 0; r < w.b.size(); ++r) w.b(r) = rng.uniform(-k, k);
  return w;
}

constexpr char kMagic[8] = {'P', 'H', 'E', 'V', 'B', 'L', 'S', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put_le(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(bytes, sizeof(T));
}

template <typename T>
T get_le(std::string_view in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw ParseError("checkpoint truncated");
  char bytes[sizeof(T)];
  std::memcpy(bytes, in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  pos += sizeof(T);
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

template <typename M>
void put_matrix(std::string& out, const M& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) put_le<double>(out, m(r, c));
}

template <typename M>
void get_matrix(std::string_view in, std::size_t& pos, M& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = get_le<double>(in, pos);
}

}  // namespace

double ClassifierGrads::squared_norm() const {
  double s = 0.0;
  for (const auto& [idx, row] : embedding) s += row.squaredNorm();
  for (const auto* w : {&forward, &backward}) {
    s += w->wx.squaredNorm() + w->wh.squaredNorm() + w->b.squaredNorm();
  }
  s += out_w.squaredNorm() + out_b * out_b;
  return s;
}

void ClassifierGrads::scale(double factor) {
  for (auto& [idx, row] : embedding) row *= factor;
  for (auto* w : {&forward, &backward}) {
    w->wx *= factor;
    w->wh *= factor;
    w->b *= factor;
  }
  out_w *= factor;
  out_b *= factor;
}

RecurrentClassifier::RecurrentClassifier(ClassifierShape shape, std::uint64_t seed)
    : shape_(shape) {
  if (shape.vocab_size < Vocabulary::kReserved || shape.embed_dim == 0 || shape.hidden_dim == 0) {
    throw ConfigError("invalid classifier shape");
  }
  Rng rng(seed);
  const auto V = static_cast<Eigen::Index>(shape.vocab_size);
  const auto E = static_cast<Eigen::Index>(shape.embed_dim);
  params_.embedding = MatrixXd::Zero(V, E);
  for (Eigen::Index r = 0; r < V; ++r)
    for (Eigen::Index c = 0; c < E; ++c) params_.embedding(r, c) = rng.normal(0.0, 1.0);
  params_.embedding.row(Vocabulary::kPad).setZero();
  params_.forward = random_lstm(shape.embed_dim, shape.hidden_dim, rng);
  params_.backward = random_lstm(shape.embed_dim, shape.hidden_dim, rng);
  params_.out_w = VectorXd::Zero(static_cast<Eigen::Index>(2 * shape.hidden_dim));
  params_.out_b = 0.0;
}

RecurrentClassifier::RecurrentClassifier(ClassifierShape shape, ClassifierParams params)
    : shape_(shape), params_(std::move(params)) {}

VectorXd RecurrentClassifier::representation(const EncodedSequence& seq) const {
  const auto H = static_cast<Eigen::Index>(shape_.hidden_dim);
  VectorXd r(2 * H);
  r.head(H) = run_lstm(params_.forward, params_.embedding, direction_tokens(seq, false),
                       shape_.hidden_dim, nullptr);
  r.tail(H) = run_lstm(params_.backward, params_.embedding, direction_tokens(seq, true),
                       shape_.hidden_dim, nullptr);
  return r;
}

double RecurrentClassifier::logit(const EncodedSequence& seq) const {
  return params_.out_w.dot(representation(seq)) + params_.out_b;
}

double RecurrentClassifier::predict_proba(const EncodedSequence& seq) const {
  constexpr double kEps = 1e-15;
  return std::clamp(sigmoid(logit(seq)), kEps, 1.0 - kEps);
}

ClassifierGrads RecurrentClassifier::zero_grads() const {
  ClassifierGrads g;
  g.forward = zero_lstm(shape_.embed_dim, shape_.hidden_dim);
  g.backward = zero_lstm(shape_.embed_dim, shape_.hidden_dim);
  g.out_w = VectorXd::Zero(static_cast<Eigen::Index>(2 * shape_.hidden_dim));
  return g;
}

double RecurrentClassifier::accumulate_gradient(const EncodedSequence& seq, double target,
                                                ClassifierGrads& grads, double weight) const {
  const auto H = static_cast<Eigen::Index>(shape_.hidden_dim);
  std::vector<StepCache> fw_cache, bw_cache;
  fw_cache.reserve(seq.length);
  bw_cache.reserve(seq.length);
  VectorXd r(2 * H);
  r.head(H) = run_lstm(params_.forward, params_.embedding, direction_tokens(seq, false),
                       shape_.hidden_dim, &fw_cache);
  r.tail(H) = run_lstm(params_.backward, params_.embedding, direction_tokens(seq, true),
                       shape_.hidden_dim, &bw_cache);
  const double z = params_.out_w.dot(r) + params_.out_b;
  const double loss = bce_with_logit(z, target);
  const double dz = weight * (sigmoid(z) - target);

  grads.out_w += dz * r;
  grads.out_b += dz;
  if (seq.length > 0) {
    VectorXd dr = dz * params_.out_w;
    backprop_lstm(params_.forward, params_.embedding, fw_cache, dr.head(H), grads.forward,
                  grads.embedding);
    backprop_lstm(params_.backward, params_.embedding, bw_cache, dr.tail(H), grads.backward,
                  grads.embedding);
  }
  return loss;
}

void RecurrentClassifier::apply_gradients(const ClassifierGrads& grads, double lr) {
  for (const auto& [idx, row] : grads.embedding) {
    params_.embedding.row(idx) -= lr * row.transpose();
  }
  params_.forward.wx -= lr * grads.forward.wx;
  params_.forward.wh -= lr * grads.forward.wh;
  params_.forward.b -= lr * grads.forward.b;
  params_.backward.wx -= lr * grads.backward.wx;
  params_.backward.wh -= lr * grads.backward.wh;
  params_.backward.b -= lr * grads.backward.b;
  params_.out_w -= lr * grads.out_w;
  params_.out_b -= lr * grads.out_b;
}

std::string RecurrentClassifier::serialize() const {
  std::string out(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint64_t>(out, shape_.vocab_size);
  put_le<std::uint64_t>(out, shape_.embed_dim);
  put_le<std::uint64_t>(out, shape_.hidden_dim);
  put_matrix(out, params_.embedding);
  for (const auto* w : {&params_.forward, &params_.backward}) {
    put_matrix(out, w->wx);
    put_matrix(out, w->wh);
    put_matrix(out, w->b);
  }
  put_matrix(out, params_.out_w);
  put_le<double>(out, params_.out_b);
  return out;
}

RecurrentClassifier RecurrentClassifier::deserialize(std::string_view bytes) {
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("not a classifier checkpoint (bad magic)");
  }
  std::size_t pos = sizeof(kMagic);
  if (get_le<std::uint32_t>(bytes, pos) != kVersion) {
    throw ParseError("unsupported checkpoint version");
  }
  ClassifierShape shape;
  shape.vocab_size = get_le<std::uint64_t>(bytes, pos);
  shape.embed_dim = get_le<std::uint64_t>(bytes, pos);
  shape.hidden_dim = get_le<std::uint64_t>(bytes, pos);
  const std::size_t expected =
      pos + 8 * (shape.vocab_size * shape.embed_dim +
                 2 * (4 * shape.hidden_dim * (shape.embed_dim + shape.hidden_dim + 1)) +
                 2 * shape.hidden_dim + 1);
  if (bytes.size() != expected) throw ParseError("checkpoint size does not match header dims");
  const auto V = static_cast<Eigen::Index>(shape.vocab_size);
  const auto E = static_cast<Eigen::Index>(shape.embed_dim);
  ClassifierParams p;
  p.embedding.resize(V, E);
  get_matrix(bytes, pos, p.embedding);
  for (auto* w : {&p.forward, &p.backward}) {
    *w = zero_lstm(shape.embed_dim, shape.hidden_dim);
    get_matrix(bytes, pos, w->wx);
    get_matrix(bytes, pos, w->wh);
    get_matrix(bytes, pos, w->b);
  }
  p.out_w.resize(static_cast<Eigen::Index>(2 * shape.hidden_dim));
  get_matrix(bytes, pos, p.out_w);
  p.out_b = get_le<double>(bytes, pos);
  return RecurrentClassifier(shape, std::move(p));
}

void RecurrentClassifier::save(const std::filesystem::path& path) const {
  write_file(path, serialize());
}

RecurrentClassifier RecurrentClassifier::load(const std::filesystem::path& path) {
  return deserialize(read_file(path));
}

double sgd_step(RecurrentClassifier& model, std::span<const WeightedExample> batch, double lr,
                double clip_norm) {
  auto grads = model.zero_grads();
  double loss = 0.0;
  for (const auto& ex : batch) {
    loss += ex.weight * model.accumulate_gradient(*ex.seq, ex.target, grads, ex.weight);
  }
  if (!std::isfinite(loss)) throw NumericError("non-finite loss in SGD step");
  const double norm = std::sqrt(grads.squared_norm());
  if (!std::isfinite(norm)) throw NumericError("non-finite gradient norm in SGD step");
  if (clip_norm > 0 && norm > clip_norm) grads.scale(clip_norm / norm);
  if (lr != 0.0) model.apply_gradients(grads, lr);
  return loss;
}

TrainResult train(RecurrentClassifier& model, std::span<const LabeledSequence> examples,
                  const TrainConfig& config) {
  bool has_pos = false, has_neg = false;
  for (const auto& ex : examples) (ex.target > 0.5 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) throw ConfigError("training needs at least one example per class");
  if (config.batch_size == 0) throw ConfigError("batch_size must be >= 1");

  TrainResult result;
  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    Rng rng(derive_seed(config.seed, epoch));
    rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t batch_no = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_no) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const double w = 1.0 / static_cast<double>(end - start);
      std::vector<WeightedExample> batch;
      for (std::size_t k = start; k < end; ++k) {
        batch.push_back({&examples[order[k]].seq, examples[order[k]].target, w});
      }
      double loss;
      try {
        loss = sgd_step(model, batch, config.lr, config.clip_norm);
      } catch (const NumericError& e) {
        throw NumericError("NaN loss at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_no) + ": " + e.what());
      }
      epoch_loss += loss * static_cast<double>(end - start);
    }
    result.loss_trace.push_back(epoch_loss / static_cast<double>(examples.size()));
  }
  return result;
}

TextClassifier::TextClassifier(Vocabulary vocab, RecurrentClassifier model, std::size_t max_len)
    : vocab_(std::move(vocab)), model_(std::move(model)), max_len_(max_len) {
  if (model_.shape().vocab_size != vocab_.size()) {
    throw ConfigError("classifier vocabulary size does not match vocabulary");
  }
}

EncodedSequence TextClassifier::encode(std::string_view body) const {
  return detector::encode(body, vocab_, max_len_);
}

double TextClassifier::probability(std::string_view body) const {
  return model_.predict_proba(encode(body));
}

void TextClassifier::save(const std::filesystem::path& prefix) const {
  model_.save(prefix.string() + ".bin");
  auto j = vocab_.to_json();
  j["max_len"] = max_len_;
  write_file(prefix.string() + ".vocab.json", j.dump(1));
}

TextClassifier TextClassifier::load(const std::filesystem::path& prefix) {
  auto j = nlohmann::json::parse(read_file(prefix.string() + ".vocab.json"));
  auto vocab = Vocabulary::from_json(j);
  auto model = RecurrentClassifier::load(prefix.string() + ".bin");
  return TextClassifier(std::move(vocab), std::move(model), j.value("max_len", std::size_t{512}));
}

namespace {

std::vector<LabeledSequence> encode_all(const TextClassifier& clf,
                                        std::span<const LabeledText> data) {
  std::vector<LabeledSequence> out;
  out.reserve(data.size());
  for (const auto& d : data) out.push_back({clf.encode(d.body), d.positive ? 1.0 : 0.0});
  return out;
}

}  // namespace

TextClassifier fit_text_classifier(std::span<const LabeledText> data,
                                   const DetectorConfig& config, TrainResult* trace) {
  std::vector<std::string> bodies;
  for (const auto& d : data) bodies.push_back(d.body);
  auto vocab = build_vocab(bodies, config.min_freq, config.max_vocab);
  ClassifierShape shape{vocab.size(), config.embed_dim, config.hidden_dim};
  TextClassifier clf(std::move(vocab), RecurrentClassifier(shape, config.train.seed),
                     config.max_len);
  auto result = fine_tune(clf, data, config.train);
  if (trace) *trace = std::move(result);
  return clf;
}

TrainResult fine_tune(TextClassifier& classifier, std::span<const LabeledText> data,
                      const TrainConfig& config) {
  auto examples = encode_all(classifier, data);
  return train(classifier.mutable_model(), examples, config);
}

ConfusionMetrics ConfusionMetrics::from_counts(std::size_t tp, std::size_t fp, std::size_t tn,
                                               std::size_t fn) {
  ConfusionMetrics m;
  m.tp = tp;
  m.fp = fp;
  m.tn = tn;
  m.fn = fn;
  if (tp + fp > 0) m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  const std::size_t n = tp + fp + tn + fn;
  m.accuracy = n ? static_cast<double>(tp + tn) / static_cast<double>(n) : 0.0;
  return m;
}

std::optional<double> ConfusionMetrics::f1() const { return f_beta(precision, recall, 1.0); }
std::optional<double> ConfusionMetrics::f2() const { return f_beta(precision, recall, 2.0); }

nlohmann::ordered_json ConfusionMetrics::to_json() const {
  auto opt = [](std::optional<double> v) -> nlohmann::ordered_json {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json j;
  j["tp"] = tp;
  j["fp"] = fp;
  j["tn"] = tn;
  j["fn"] = fn;
  j["precision"] = opt(precision);
  j["recall"] = opt(recall);
  j["accuracy"] = accuracy;
  j["f1"] = opt(f1());
  j["f2"] = opt(f2());
  return j;
}

ConfusionMetrics evaluate(const ProbabilityModel& model, std::span<const LabeledText> data,
                          double threshold) {
  if (data.empty()) throw ConfigError("evaluate needs a non-empty corpus");
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (const auto& d : data) {
    const bool predicted = model.probability(d.body) >= threshold;
    if (predicted && d.positive) ++tp;
    else if (predicted) ++fp;
    else if (d.positive) ++fn;
    else ++tn;
  }
  return ConfusionMetrics::from_counts(tp, fp, tn, fn);
}

std::vector<LabeledText> labeled_from_corpus(const corpus::Corpus& data) {
  std::vector<LabeledText> out;
  out.reserve(data.size());
  for (const auto& r : data) out.push_back({r.body(), r.label() == corpus::Label::kPhishing});
  return out;
}

ConfusionMetrics evaluate(const ProbabilityModel& model, const corpus::Corpus& data,
                          double threshold) {
  auto labeled = labeled_from_corpus(data);
  return evaluate(model, labeled, threshold);
}

std::optional<double> f_beta(double precision, double recall, double beta) {
  if (precision == 0.0 && recall == 0.0) return std::nullopt;
  const double b2 = beta * beta;
  return (1.0 + b2) * precision * recall / (b2 * precision + recall);
}

std::optional<double> f_beta(std::optional<double> precision, std::optional<double> recall,
                             double beta) {
  if (!precision || !recall) return std::nullopt;
  return f_beta(*precision, *recall, beta);
}

}  // namespace phishevo::detector
