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

#include "phishevo/pipeline.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>

#include "phishevo/advloop.h"
#include "phishevo/attacks.h"
#include "phishevo/common.h"
#include "phishevo/corpus.h"
#include "phishevo/detector.h"
#include "phishevo/isolation_forest.h"
#include "phishevo/lda.h"
#include "phishevo/llm_client.h"
#include "phishevo/mann_whitney.h"
#include "phishevo/ngram.h"
#include "phishevo/persuasion.h"
#include "phishevo/prompt.h"
#include "phishevo/tfidf.h"
#include "phishevo/validate.h"

namespace phishevo::pipeline {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Per-component seed streams.
enum Stream : std::uint64_t {
  kSplitStream = 1,
  kDiscriminatorStream,
  kGanStream,
  kGenerateStream,
  kCrossValStream,
  kForestStream,
  kLdaStream,
  kDetectorStream,
  kAttackStream,
};

const char* const kPathKeys[] = {"topics", "lexicon", "synonyms", "analysis_template",
                                 "output_dir"};

void check_schema(const json& defaults, const json& given, const std::string& where) {
  for (const auto& [key, value] : given.items()) {
    const std::string name = where.empty() ? key : where + "." + key;
    if (!defaults.contains(key)) throw ConfigError("unknown config key '" + name + "'");
    const auto& d = defaults.at(key);
    const bool ok = (d.is_number() && value.is_number()) || d.type() == value.type() ||
                    (d.is_boolean() && value.is_boolean());
    if (!ok) throw ConfigError("config key '" + name + "' has the wrong type");
    if (d.is_number_unsigned() && value.is_number_integer() && value.get<std::int64_t>() < 0) {
      throw ConfigError("config key '" + name + "' must be non-negative");
    }
    if (d.is_number_integer() && !value.is_number_integer()) {
      throw ConfigError("config key '" + name + "' must be an integer");
    }
    if (d.is_object()) check_schema(d, value, name);
  }
}

void resolve_paths(json& j, const fs::path& base) {
  auto fix = [&](json& v) {
    if (!v.is_string()) return;
    fs::path p = v.get<std::string>();
    if (!p.empty() && p.is_relative()) v = (base / p).lexically_normal().string();
  };
  for (const char* key : kPathKeys) {
    if (j.contains(key)) fix(j[key]);
  }
  if (j.contains("corpus") && j["corpus"].is_array()) {
    for (auto& v : j["corpus"]) fix(v);
  }
}

json parse_override_value(const std::string& text) {
  auto v = json::parse(text, nullptr, false);
  return v.is_discarded() ? json(text) : v;
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

ordered_json opt_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

// Artifact bookkeeping for one run directory.
class Run {
 public:
  Run(fs::path dir, std::optional<fs::path> from, RunManifest& manifest)
      : dir_(std::move(dir)), from_(std::move(from)), manifest_(manifest) {}

  const fs::path& dir() const { return dir_; }

  void begin(Step s) {
    manifest_.phases.push_back({std::string(step_name(s)), {}, {}, 0.0});
    start_ = std::chrono::steady_clock::now();
  }
  void end() {
    manifest_.phases.back().seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  fs::path out(const std::string& name) {
    const auto p = dir_ / name;
    fs::create_directories(p.parent_path());
    return p;
  }
  void wrote(const std::string& name) {
    manifest_.phases.back().outputs[name] = sha256_file(dir_ / name);
  }
  void write(const std::string& name, std::string_view contents) {
    write_file(out(name), contents);
    wrote(name);
  }

  bool has(const std::string& name) const {
    return fs::exists(dir_ / name) || (from_ && fs::exists(*from_ / name));
  }
  // Artifact from this run, else from the --from run.
  fs::path in(const std::string& name) {
    fs::path p = dir_ / name;
    if (!fs::exists(p)) {
      if (!from_ || !fs::exists(*from_ / name)) {
        throw MissingArtifactError(name, std::string("missing upstream artifact for step '") +
                                             manifest_.phases.back().name + "'");
      }
      p = *from_ / name;
    }
    manifest_.phases.back().inputs[name] = sha256_file(p);
    return p;
  }
  // External input recorded under its file name.
  fs::path external(const fs::path& p) {
    if (!fs::exists(p)) throw MissingArtifactError(p, "input file not found");
    manifest_.phases.back().inputs[p.filename().string()] = sha256_file(p);
    return p;
  }

 private:
  fs::path dir_;
  std::optional<fs::path> from_;
  RunManifest& manifest_;
  std::chrono::steady_clock::time_point start_;
};

std::vector<std::string> bodies_of(const corpus::Corpus& c) {
  std::vector<std::string> out;
  out.reserve(c.size());
  for (const auto& r : c) out.push_back(r.body());
  return out;
}

corpus::Corpus with_label(const corpus::Corpus& c, corpus::Label label) {
  corpus::Corpus out;
  for (const auto& r : c) {
    if (r.label() == label) out.push_back(r);
  }
  return out;
}

corpus::Corpus read_corpus(const fs::path& p) { return corpus::ingest_jsonl(p, true).records; }

llm::BackendConfig backend_config(const json& section, const fs::path& audit) {
  llm::BackendConfig bc;
  bc.endpoint = section.at("endpoint").get<std::string>();
  bc.api_key_env = section.at("api_key_env").get<std::string>();
  bc.timeout = std::chrono::milliseconds(section.at("timeout_ms").get<std::int64_t>());
  bc.max_retries = section.at("max_retries").get<int>();
  bc.max_parallel = section.at("max_parallel").get<int>();
  if (section.at("audit").get<bool>()) bc.audit_path = audit;
  return bc;
}

void require_backend_kind(const json& section, const char* which) {
  const auto kind = section.at("backend").get<std::string>();
  if (kind != "stub" && kind != "remote") {
    throw ConfigError(std::string(which) + ".backend must be 'stub' or 'remote'");
  }
}

std::unique_ptr<llm::GeneratorBackend> make_generator(const RunConfig& cfg,
                                                      std::vector<std::string> bodies,
                                                      Run& run) {
  const auto& section = cfg.json().at("generator");
  require_backend_kind(section, "generator");
  if (section.at("backend") == "stub") {
    llm::StubOptions so;
    so.order = section.at("order").get<std::size_t>();
    so.length_target = section.at("length_target").get<std::size_t>();
    return std::make_unique<llm::MarkovStubGenerator>(std::move(bodies), so);
  }
  auto client = std::make_shared<llm::ChatClient>(
      backend_config(section, run.out("audit/generator.jsonl")));
  return std::make_unique<llm::RemoteGenerator>(
      client, section.at("model").get<std::string>(), section.at("temperature").get<double>(),
      section.at("max_tokens").get<int>(), section.at("max_parallel").get<int>());
}

const std::vector<std::string>& phishing_cue_words() {
  static const std::vector<std::string> cues = {
      "verify",   "account",     "password", "click",   "link",     "login",   "suspended",
      "confirm",  "security",    "bank",     "invoice", "payment",  "update",  "credentials",
      "expire",   "expires",     "locked",   "unusual", "prize",    "winner",  "refund",
      "restore",  "verification", "ssn",     "wire",    "transfer", "gift",    "reset"};
  return cues;
}

std::unique_ptr<llm::CompletionBackend> make_analyzer(const RunConfig& cfg,
                                                      const persuasion::LexiconSet& lexicon,
                                                      Run& run) {
  const auto& section = cfg.json().at("analyzer");
  require_backend_kind(section, "analyzer");
  if (section.at("backend") == "stub") {
    auto cues = phishing_cue_words();
    for (const auto& e : lexicon.all_entries()) cues.push_back(e);
    return std::make_unique<validate::LexiconAnalyzerStub>(std::move(cues));
  }
  return std::make_unique<llm::ChatClient>(backend_config(section, run.out("audit/analyzer.jsonl")));
}

detector::DetectorConfig detector_config(const json& d, std::uint64_t seed) {
  detector::DetectorConfig c;
  c.embed_dim = d.at("embed_dim").get<std::size_t>();
  c.hidden_dim = d.at("hidden_dim").get<std::size_t>();
  c.max_len = d.at("max_len").get<std::size_t>();
  c.min_freq = d.at("min_freq").get<std::size_t>();
  c.max_vocab = d.at("max_vocab").get<std::size_t>();
  if (d.contains("epochs")) {
    c.train.epochs = d.at("epochs").get<std::size_t>();
    c.train.lr = d.at("lr").get<double>();
    c.train.batch_size = d.at("batch_size").get<std::size_t>();
    c.train.clip_norm = d.at("clip_norm").get<double>();
  }
  c.train.seed = seed;
  return c;
}

// ---- Phase A ----

void step_prep(const RunConfig& cfg, Run& run) {
  const auto& p = cfg.json().at("prep");
  corpus::CorpusManifest cm;
  corpus::Corpus all;
  for (const auto& path : cfg.corpus_paths()) {
    auto res = corpus::ingest_jsonl(run.external(path), p.at("strict").get<bool>());
    cm.malformed_skipped += res.skipped;
    all.insert(all.end(), res.records.begin(), res.records.end());
  }
  corpus::Corpus normalized;
  for (const auto& r : all) normalized.push_back(corpus::normalize_text(r));
  cm.record_stage("normalize", all, normalized);
  auto dd = corpus::dedup(normalized, p.at("shingle_size").get<std::size_t>(),
                          p.at("similarity_threshold").get<double>());
  cm.record_stage("dedup", normalized, dd.corpus);
  cm.dedup_removed = dd.exact_removed;
  cm.similarity_removed = dd.similar_removed;
  auto filtered = corpus::length_filter(dd.corpus, p.at("min_tokens").get<std::size_t>(),
                                        p.at("max_tokens").get<std::size_t>());
  cm.record_stage("length_filter", dd.corpus, filtered);
  if (filtered.empty()) throw ConfigError("no records left after corpus preparation");
  auto sp = corpus::split(filtered, p.at("train_fraction").get<double>(),
                          derive_seed(cfg.seed(), kSplitStream));
  cm.train_size = sp.train.size();
  cm.eval_size = sp.eval.size();
  run.write("corpus/clean.jsonl", corpus::to_jsonl(filtered));
  run.write("corpus/clean.manifest.json", cm.to_json().dump(2) + "\n");
  run.write("corpus/train.jsonl", corpus::to_jsonl(sp.train));
  run.write("corpus/eval.jsonl", corpus::to_jsonl(sp.eval));
}

void step_gan(const RunConfig& cfg, Run& run) {
  const auto& g = cfg.json().at("gan");
  const auto train = read_corpus(run.in("corpus/train.jsonl"));
  const auto label = corpus::parse_label(g.at("label").get<std::string>());
  const auto real = with_label(train, label);
  if (real.empty()) throw ConfigError("training corpus has no records labeled for the GAN");
  auto registry = prompt::register_topics(run.external(cfg.path("topics")));

  const auto dc = detector_config(cfg.json().at("discriminator"),
                                  derive_seed(cfg.seed(), kDiscriminatorStream));
  const auto train_bodies = bodies_of(train);
  auto vocab = detector::build_vocab(train_bodies, dc.min_freq, dc.max_vocab);
  detector::ClassifierShape shape{vocab.size(), dc.embed_dim, dc.hidden_dim};
  detector::TextClassifier disc(std::move(vocab), detector::RecurrentClassifier(shape, dc.train.seed),
                                dc.max_len);

  auto generator = make_generator(cfg, bodies_of(real), run);
  advloop::GanConfig gc;
  gc.rounds = g.at("rounds").get<std::size_t>();
  gc.batch = g.at("batch").get<std::size_t>();
  gc.top_k = g.at("top_k").get<std::size_t>();
  gc.steps_per_round = g.at("steps_per_round").get<std::size_t>();
  gc.exemplars_per_prompt = g.at("exemplars_per_prompt").get<std::size_t>();
  gc.lr = g.at("lr").get<double>();
  gc.clip_norm = g.at("clip_norm").get<double>();
  gc.seed = derive_seed(cfg.seed(), kGanStream);
  gc.label = label;
  auto result = advloop::run_gan(*generator, disc, real, registry, gc, run.out("gan_rounds.jsonl"));
  if (!fs::exists(run.dir() / "gan_rounds.jsonl")) write_file(run.out("gan_rounds.jsonl"), "");
  run.wrote("gan_rounds.jsonl");
  corpus::Corpus feedback;
  for (const auto& f : result.feedback) {
    auto r = f.record;
    r.mutable_meta()["discriminator_score"] = f.score;
    feedback.push_back(std::move(r));
  }
  run.write("gan_feedback.jsonl", corpus::to_jsonl(feedback));
  disc.save(run.out("discriminator"));
  run.wrote("discriminator.bin");
  run.wrote("discriminator.vocab.json");
}

void step_generate(const RunConfig& cfg, Run& run) {
  const auto& gen = cfg.json().at("generate");
  const auto& g = cfg.json().at("gan");
  const auto train = read_corpus(run.in("corpus/train.jsonl"));
  const auto label = corpus::parse_label(g.at("label").get<std::string>());
  const auto real = with_label(train, label);
  if (real.empty()) throw ConfigError("training corpus has no records of the generation label");
  auto registry = prompt::register_topics(run.external(cfg.path("topics")));
  if (registry.empty()) throw ConfigError("topic registry is empty");

  std::vector<std::string> exemplars;
  if (run.has("gan_feedback.jsonl")) exemplars = bodies_of(read_corpus(run.in("gan_feedback.jsonl")));
  const auto real_bodies = bodies_of(real);
  auto generator = make_generator(cfg, real_bodies, run);

  const auto count = gen.at("count").get<std::size_t>();
  const auto per_prompt = std::max<std::size_t>(1, gen.at("per_prompt").get<std::size_t>());
  const auto n_ex = g.at("exemplars_per_prompt").get<std::size_t>();
  const std::uint64_t seed = derive_seed(cfg.seed(), kGenerateStream);
  Rng rng(seed);
  corpus::Corpus out;
  std::size_t prompt_index = 0;
  while (out.size() < count) {
    const auto& topic = registry.sets()[rng.uniform_index(registry.size())];
    auto ex = exemplars.empty() ? prompt::sample_exemplars(real_bodies, n_ex, rng)
                                : prompt::sample_exemplars(exemplars, std::min(n_ex, exemplars.size()), rng);
    auto rendered = prompt::build_prompt(label, topic, ex, prompt::Mode::kTrain);
    const std::size_t n = std::min(per_prompt, count - out.size());
    auto res = llm::generate_candidates(rendered, n, *generator, derive_seed(seed, ++prompt_index),
                                        gen.at("lenient").get<bool>());
    if (res.records.empty() && !gen.at("lenient").get<bool>()) {
      throw BackendError("generator returned no candidates");
    }
    out.insert(out.end(), res.records.begin(), res.records.end());
    if (prompt_index > count * 4 + 16) throw BackendError("generator keeps failing; giving up");
  }
  run.write("generated.jsonl", corpus::to_jsonl(out));
}

// ---- Phase B ----

void step_validate(const RunConfig& cfg, Run& run) {
  const auto& v = cfg.json().at("validate");
  const auto generated = read_corpus(run.in("generated.jsonl"));
  if (generated.empty()) throw ConfigError("no generated emails to validate");
  const auto lexicon = persuasion::load_lexicon(run.external(cfg.path("lexicon")));
  const auto tmpl_path = cfg.path("analysis_template");
  const std::string tmpl =
      tmpl_path.empty() ? validate::default_analysis_template() : read_file(run.external(tmpl_path));
  auto analyzer = make_analyzer(cfg, lexicon, run);
  validate::AnalyzerOptions opts;
  const auto& section = cfg.json().at("analyzer");
  opts.model = section.at("model").get<std::string>();
  opts.temperature = section.at("temperature").get<double>();
  opts.max_tokens = section.at("max_tokens").get<int>();

  std::vector<validate::IdentifiedVerdict> verdicts;
  std::string lines;
  std::size_t unparsed = 0;
  for (const auto& rec : generated) {
    try {
      verdicts.push_back({rec.id(), validate::analyze_email(rec, *analyzer, tmpl, opts)});
      lines += validate::verdict_to_json(verdicts.back()).dump() + "\n";
    } catch (const ParseError& e) {
      ++unparsed;
      lines += ordered_json{{"id", rec.id()}, {"error", e.what()}}.dump() + "\n";
    }
  }
  run.write("verdicts.jsonl", lines);
  if (verdicts.empty()) throw BackendError("analyzer produced no parseable verdicts");
  const int retention = v.at("retention_score").get<int>();
  auto pas = validate::pas_summary(verdicts, retention);
  auto pas_json = pas.to_json();
  pas_json["unparsed"] = unparsed;
  run.write("pas_summary.json", pas_json.dump(2) + "\n");

  std::set<std::string> keep(pas.retained_ids.begin(), pas.retained_ids.end());
  corpus::Corpus retained;
  for (const auto& r : generated) {
    if (keep.count(r.id())) retained.push_back(r);
  }
  run.write("retained.jsonl", corpus::to_jsonl(retained));

  // Reliability of the analyzer on labeled real emails.
  const auto folds = v.at("cv_folds").get<std::size_t>();
  if (folds >= 2 && run.has("corpus/eval.jsonl")) {
    const auto eval = read_corpus(run.in("corpus/eval.jsonl"));
    std::size_t pos = 0;
    for (const auto& r : eval) pos += r.label() == corpus::Label::kPhishing ? 1 : 0;
    const std::size_t k = std::min({folds, pos, eval.size() - pos});
    ordered_json cvj;
    if (k >= 2) {
      auto cv = validate::cross_validate(eval, k, *analyzer, derive_seed(cfg.seed(), kCrossValStream),
                                         tmpl, opts);
      cvj = cv.to_json();
      cvj["k"] = k;
    } else {
      cvj = {{"skipped", "too few labeled records per class"}};
    }
    run.write("crossval.json", cvj.dump(2) + "\n");
  }
}

// ---- Phase C ----

std::vector<std::string> top_terms(std::string_view body, std::size_t n,
                                   const std::vector<std::string>& exclude) {
  std::map<std::string, std::size_t> tf;
  for (const auto& t : analysis_tokens(body)) {
    if (t.size() >= 4 && std::find(exclude.begin(), exclude.end(), t) == exclude.end()) ++tf[t];
  }
  std::vector<std::pair<std::string, std::size_t>> v(tf.begin(), tf.end());
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(n, v.size()); ++i) out.push_back(v[i].first);
  return out;
}

ordered_json describe(std::vector<double> v) {
  if (v.empty()) return nullptr;
  std::sort(v.begin(), v.end());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  const std::size_t m = v.size() / 2;
  const double median = v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
  return {{"n", v.size()}, {"mean", mean}, {"median", median}, {"min", v.front()}, {"max", v.back()}};
}

ordered_json mw_json(const textstats::MannWhitneyResult& r) {
  return {{"u", r.u}, {"u_a", r.u_a}, {"u_b", r.u_b}, {"z", r.z}, {"p", r.p}};
}

void step_analyze(const RunConfig& cfg, Run& run) {
  const auto& a = cfg.json().at("analysis");
  const auto generated_all = read_corpus(run.in("generated.jsonl"));
  corpus::Corpus gen;
  std::string analysis_set = "generated";
  if (run.has("retained.jsonl")) {
    gen = read_corpus(run.in("retained.jsonl"));
    analysis_set = "retained";
  }
  if (gen.size() < 2) {
    gen = generated_all;
    analysis_set = "generated";
  }
  const auto train = read_corpus(run.in("corpus/train.jsonl"));
  const auto real = with_label(train, corpus::Label::kPhishing);
  if (real.empty()) throw ConfigError("training corpus has no phishing records");
  const auto registry = prompt::register_topics(run.external(cfg.path("topics")));
  const auto lexicon = persuasion::load_lexicon(run.external(cfg.path("lexicon")));
  const auto gen_bodies = bodies_of(gen);
  const auto real_bodies = bodies_of(real);

  // Perplexity under a corpus-fit add-1 bigram model, and keyword coherence.
  const auto lm = textstats::fit_ngram(bodies_of(train), 2, 1.0);
  std::vector<double> ppl_gen, ppl_real, coherence;
  std::vector<std::string> reference = gen_bodies;
  reference.insert(reference.end(), real_bodies.begin(), real_bodies.end());
  for (const auto& r : gen) {
    ppl_gen.push_back(textstats::perplexity(lm, r.body()));
    std::vector<std::string> words;
    if (r.meta().contains("topic")) {
      const auto sets = registry.lookup(r.meta()["topic"].get<std::string>());
      if (!sets.empty()) {
        const auto& kw = sets.front()->keywords;
        words.assign(kw.begin(), kw.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(5, kw.size())));
      }
    }
    for (auto& t : top_terms(r.body(), 10 - words.size(), words)) words.push_back(t);
    if (words.size() >= 2) coherence.push_back(textstats::coherence_npmi({words}, reference, 10));
  }
  const auto eval = run.has("corpus/eval.jsonl") ? read_corpus(run.in("corpus/eval.jsonl")) : corpus::Corpus{};
  for (const auto& r : with_label(eval, corpus::Label::kPhishing)) {
    ppl_real.push_back(textstats::perplexity(lm, r.body()));
  }
  ordered_json quality;
  quality["analysis_set"] = analysis_set;
  quality["perplexity_generated"] = describe(ppl_gen);
  quality["perplexity_real_eval"] = describe(ppl_real);
  quality["coherence_generated"] = describe(coherence);
  run.write("quality.json", quality.dump(2) + "\n");

  // Isolation forest over TF-IDF of real and generated phishing.
  std::vector<std::string> docs = real_bodies;
  docs.insert(docs.end(), gen_bodies.begin(), gen_bodies.end());
  const auto tf = textstats::tfidf(docs, a.at("max_features").get<std::size_t>());
  textstats::IsoForestConfig fc;
  fc.trees = a.at("trees").get<std::size_t>();
  fc.psi = a.at("psi").get<std::size_t>();
  fc.threshold = a.at("threshold").get<double>();
  fc.seed = derive_seed(cfg.seed(), kForestStream);
  const auto forest = textstats::IsolationForest::fit(tf.rows, fc);
  run.write("forest.json", forest.to_json().dump() + "\n");

  std::vector<persuasion::PrincipleProfile> profiles;
  std::vector<double> ifs_real, ifs_gen;
  std::vector<bool> anomalous;
  std::string anomaly_lines, dps_lines;
  const double saturation = a.at("saturation").get<double>();
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const bool is_gen = i >= real.size();
    const auto& rec = is_gen ? gen[i - real.size()] : real[i];
    const auto s = forest.score(tf.rows[i]);
    (is_gen ? ifs_gen : ifs_real).push_back(s.score);
    anomalous.push_back(s.anomaly);
    std::vector<std::size_t> order(tf.vocabulary.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return tf.rows[i][x] > tf.rows[i][y]; });
    std::vector<std::string> features;
    for (std::size_t k = 0; k < std::min<std::size_t>(5, order.size()); ++k) {
      if (tf.rows[i][order[k]] > 0) features.push_back(tf.vocabulary[order[k]]);
    }
    anomaly_lines += ordered_json{{"id", rec.id()},
                                  {"set", is_gen ? "generated" : "real"},
                                  {"score", s.score},
                                  {"signed_score", s.signed_score},
                                  {"anomaly", s.anomaly},
                                  {"features", features}}
                         .dump() +
                     "\n";
    profiles.push_back(persuasion::dps(rec.body(), lexicon, saturation));
    auto pj = profiles.back().to_json();
    pj["id"] = rec.id();
    pj["set"] = is_gen ? "generated" : "real";
    dps_lines += pj.dump() + "\n";
  }
  run.write("anomalies.jsonl", anomaly_lines);
  run.write("dps.jsonl", dps_lines);

  ordered_json mw;
  mw["ifs_generated_vs_real"] = mw_json(textstats::mann_whitney(ifs_gen, ifs_real));
  ordered_json per_principle;
  std::vector<persuasion::PrincipleProfile> anom_profiles, normal_profiles;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    (anomalous[i] ? anom_profiles : normal_profiles).push_back(profiles[i]);
  }
  for (auto p : persuasion::kAllPrinciples) {
    std::vector<double> xa, xn;
    for (const auto& pr : anom_profiles) xa.push_back(pr.score(p));
    for (const auto& pr : normal_profiles) xn.push_back(pr.score(p));
    per_principle[std::string(persuasion::principle_name(p))] =
        xa.empty() || xn.empty() ? ordered_json(nullptr) : mw_json(textstats::mann_whitney(xa, xn));
  }
  mw["dps_anomalous_vs_normal"] = per_principle;
  mw["anomalous"] = anom_profiles.size();
  mw["normal"] = normal_profiles.size();
  run.write("mann_whitney.json", mw.dump(2) + "\n");

  // Persuasion histograms and matching contexts.
  auto hist = [](const std::vector<persuasion::PrincipleProfile>& ps) -> ordered_json {
    if (ps.empty()) return nullptr;
    const auto h = persuasion::principle_histogram(ps);
    return std::vector<double>(h.begin(), h.end());
  };
  auto mean_scores = [](const std::vector<persuasion::PrincipleProfile>& ps) -> ordered_json {
    if (ps.empty()) return nullptr;
    ordered_json j;
    for (auto p : persuasion::kAllPrinciples) {
      double s = 0;
      for (const auto& pr : ps) s += pr.score(p);
      j[std::string(persuasion::principle_name(p))] = s / static_cast<double>(ps.size());
    }
    return j;
  };
  std::vector<persuasion::PrincipleProfile> gen_profiles(profiles.begin() + static_cast<std::ptrdiff_t>(real.size()), profiles.end());
  std::vector<persuasion::PrincipleProfile> real_profiles(profiles.begin(), profiles.begin() + static_cast<std::ptrdiff_t>(real.size()));
  ordered_json pers;
  pers["histogram_generated"] = hist(gen_profiles);
  pers["histogram_real"] = hist(real_profiles);
  pers["histogram_anomalous"] = hist(anom_profiles);
  pers["histogram_normal"] = hist(normal_profiles);
  pers["mean_dps_generated"] = mean_scores(gen_profiles);
  pers["mean_dps_real"] = mean_scores(real_profiles);
  pers["reference"] = {{"anomalous_all_six", 0.0213}, {"anomalous_five_plus", 0.409},
                       {"normal_all_six", 0.0078}, {"normal_five_plus", 0.1711}};
  run.write("persuasion.json", pers.dump(2) + "\n");
  const auto contexts = persuasion::match_contexts(gen_bodies, lexicon,
                                                   a.at("context_window").get<std::size_t>(),
                                                   a.at("context_top_words").get<std::size_t>());
  run.write("contexts.csv", persuasion::contexts_to_csv(contexts));

  // Topic extraction for the loop-back.
  std::vector<std::size_t> ks;
  for (auto k = a.at("k_min").get<std::size_t>(); k <= a.at("k_max").get<std::size_t>(); ++k) ks.push_back(k);
  if (ks.empty()) throw ConfigError("analysis.k_min must not exceed analysis.k_max");
  const auto iters = a.at("lda_iters").get<std::size_t>();
  const auto top_n = a.at("top_n").get<std::size_t>();
  const std::uint64_t lda_seed = derive_seed(cfg.seed(), kLdaStream);
  const auto sel = textstats::select_k(gen_bodies, ks, lda_seed, iters, top_n);
  run.write("lda_selection.csv", sel.to_csv());
  textstats::LdaConfig lc;
  lc.k = sel.best_k;
  lc.iters = iters;
  lc.seed = derive_seed(lda_seed, sel.best_k);
  const auto model = textstats::LdaModel::fit(gen_bodies, lc);
  run.write("lda_model.json", model.to_json().dump() + "\n");

  std::vector<prompt::ExtractedTopic> extracted;
  for (std::size_t t = 0; t < model.k(); ++t) {
    auto words = model.top_words(t, top_n);
    // Attach to the registry topic sharing most keywords, else a new topic.
    std::string label = "lda-topic-" + std::to_string(t + 1);
    std::size_t best = 0;
    for (const auto& set : registry.sets()) {
      std::size_t overlap = 0;
      for (const auto& w : words) {
        overlap += std::count(set.keywords.begin(), set.keywords.end(), w);
      }
      if (overlap > best) {
        best = overlap;
        label = set.topic;
      }
    }
    extracted.push_back({label, words});
  }
  run.write("extracted_topics.json", prompt::extracted_to_json(extracted).dump(2) + "\n");
}

void step_attack(const RunConfig& cfg, Run& run) {
  const auto& at = cfg.json().at("attack");
  const auto train = read_corpus(run.in("corpus/train.jsonl"));
  const auto eval_all = read_corpus(run.in("corpus/eval.jsonl"));
  const auto max_samples = at.at("max_samples").get<std::size_t>();

  std::vector<attacks::Method> methods;
  for (const auto& m : at.at("methods")) methods.push_back(attacks::parse_method(m.get<std::string>()));
  attacks::PerturbationBudget budget;
  budget.max_word_fraction = at.at("max_word_fraction").get<double>();
  budget.max_queries = at.at("max_queries").get<std::size_t>();
  budget.similarity_floor = at.at("similarity_floor").get<double>();
  budget.validate();
  attacks::SynonymLexicon synonyms;
  const bool needs_synonyms = std::any_of(methods.begin(), methods.end(), [](attacks::Method m) {
    return m == attacks::Method::kPwws || m == attacks::Method::kTextFoolerLike;
  });
  if (needs_synonyms) synonyms = attacks::load_synonyms(run.external(cfg.path("synonyms")));
  attacks::AttackContext ctx{&synonyms, 0.5};

  const auto dc = detector_config(cfg.json().at("detector"), derive_seed(cfg.seed(), kDetectorStream));
  const auto train_data = detector::labeled_from_corpus(train);
  auto before = detector::fit_text_classifier(train_data, dc);
  before.save(run.out("detector_before"));
  run.wrote("detector_before.bin");
  run.wrote("detector_before.vocab.json");

  // Adversarial fine-tuning on successful perturbations of training phishing.
  const std::uint64_t attack_seed = derive_seed(cfg.seed(), kAttackStream);
  std::vector<attacks::AttackOutcome> train_outcomes;
  std::size_t used = 0;
  for (std::size_t i = 0; i < train.size() && used < max_samples; ++i) {
    if (train[i].label() != corpus::Label::kPhishing) continue;
    if (before.probability(train[i].body()) < ctx.threshold) continue;
    const auto m = methods[used % methods.size()];
    train_outcomes.push_back(attacks::perturb(train[i].body(), m, before, budget,
                                              derive_seed(attack_seed + 1, i), ctx));
    ++used;
  }
  auto adv = attacks::adversarial_examples(train_outcomes);
  auto tuned_data = train_data;
  tuned_data.insert(tuned_data.end(), adv.begin(), adv.end());
  auto after = before;
  auto ft = dc.train;
  ft.epochs = at.at("fine_tune_epochs").get<std::size_t>();
  ft.seed = derive_seed(attack_seed, 2);
  if (ft.epochs > 0) detector::fine_tune(after, tuned_data, ft);
  after.save(run.out("detector_after"));
  run.wrote("detector_after.bin");
  run.wrote("detector_after.vocab.json");

  // Attack a bounded evaluation subset: the first max_samples phishing
  // records plus every benign record.
  corpus::Corpus eval;
  std::size_t phishing = 0;
  for (const auto& r : eval_all) {
    if (r.label() != corpus::Label::kPhishing) eval.push_back(r);
    else if (phishing++ < max_samples) eval.push_back(r);
  }
  const attacks::RobustnessInput inputs[] = {{&before, "bilstm"}, {&after, "bilstm-adv"}};
  const auto report = attacks::robustness_report(inputs, eval, at.at("dataset").get<std::string>(),
                                                 methods, budget, attack_seed, ctx);
  run.write("robustness.csv", report.to_csv());
  ordered_json rj;
  rj["rows"] = report.to_json();
  rj["adversarial_training_examples"] = adv.size();
  rj["reference"] = {{"model", "RoBERTa"}, {"dataset", "D1"}, {"method", "deepwordbug"},
                     {"Acc", 0.91}, {"EVA-Acc", 0.77}, {"ASR_percent", 8.76}};
  run.write("robustness.json", rj.dump(2) + "\n");
  std::string lines;
  for (const auto& o : report.outcomes) lines += o.to_json().dump() + "\n";
  run.write("attack_outcomes.jsonl", lines);
}

// ---- Phase D ----

void step_loopback(const RunConfig& cfg, Run& run) {
  const auto extracted =
      prompt::extracted_from_json(json::parse(read_file(run.in("extracted_topics.json"))));
  auto registry = prompt::register_topics(run.external(cfg.path("topics")));
  auto merged = prompt::merge_loopback(std::move(registry), extracted);
  run.write("topics_next.csv", merged.to_csv());
  json next = cfg.json();
  next["topics"] = "topics_next.csv";  // relative to next_config.json
  next["seed"] = cfg.seed() + 1;
  run.write("next_config.json", next.dump(2) + "\n");
}

fs::path allocate_run_dir(const fs::path& root) {
  fs::create_directories(root);
  int highest = 0;
  for (const auto& e : fs::directory_iterator(root)) {
    const auto name = e.path().filename().string();
    if (name.rfind("run-", 0) == 0) {
      try {
        highest = std::max(highest, std::stoi(name.substr(4)));
      } catch (const std::exception&) {
      }
    }
  }
  for (int n = highest + 1;; ++n) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "run-%04d", n);
    if (fs::create_directory(root / buf)) return root / buf;
  }
}

void write_manifest(const fs::path& dir, const RunManifest& m) {
  write_file(dir / "manifest.json", m.to_json().dump(2) + "\n");
}

}  // namespace

// ---- configuration ----

json RunConfig::defaults() {
  return nlohmann::json::parse(R"({
    "seed": 7,
    "corpus": ["data/synthetic_corpus.jsonl"],
    "topics": "data/topics.csv",
    "lexicon": "data/persuasion_lexicon.toml",
    "synonyms": "data/synonyms.json",
    "analysis_template": "data/analysis_prompt.txt",
    "output_dir": "runs",
    "prep": {"strict": false, "min_tokens": 64, "max_tokens": 512, "shingle_size": 3,
             "similarity_threshold": 0.8, "train_fraction": 0.8},
    "generator": {"backend": "stub", "endpoint": "", "model": "llama-3.1-8b-instruct",
                  "api_key_env": "PHISHEVO_API_KEY", "timeout_ms": 60000, "max_retries": 3,
                  "max_parallel": 4, "temperature": 0.9, "max_tokens": 512, "audit": false,
                  "order": 2, "length_target": 120},
    "analyzer": {"backend": "stub", "endpoint": "", "model": "gpt-3.5-turbo",
                 "api_key_env": "PHISHEVO_API_KEY", "timeout_ms": 60000, "max_retries": 3,
                 "max_parallel": 1, "temperature": 0.0, "max_tokens": 512, "audit": false},
    "discriminator": {"embed_dim": 16, "hidden_dim": 16, "max_len": 96, "min_freq": 1,
                      "max_vocab": 5000},
    "gan": {"rounds": 5, "batch": 8, "top_k": 3, "steps_per_round": 5,
            "exemplars_per_prompt": 3, "lr": 0.3, "clip_norm": 5.0, "label": "phishing"},
    "generate": {"count": 40, "per_prompt": 4, "lenient": true},
    "validate": {"retention_score": 6, "cv_folds": 5},
    "analysis": {"max_features": 2000, "trees": 100, "psi": 256, "threshold": 0.6,
                 "k_min": 2, "k_max": 6, "lda_iters": 200, "top_n": 10, "saturation": 3.0,
                 "context_window": 3, "context_top_words": 6},
    "detector": {"embed_dim": 16, "hidden_dim": 16, "max_len": 96, "min_freq": 1,
                 "max_vocab": 5000, "epochs": 20, "lr": 0.2, "batch_size": 8, "clip_norm": 5.0},
    "attack": {"methods": ["deepwordbug", "pruthi", "pwws", "textfooler_like"],
               "max_word_fraction": 0.15, "max_queries": 200, "similarity_floor": 0.5,
               "max_samples": 10, "fine_tune_epochs": 4, "dataset": "synthetic"}
  })");
}

RunConfig RunConfig::from_json(nlohmann::json j) {
  const auto d = defaults();
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  check_schema(d, j, "");
  nlohmann::json merged = d;
  merged.merge_patch(j);
  for (const auto& c : merged.at("corpus")) {
    if (!c.is_string()) throw ConfigError("corpus entries must be paths");
  }
  if (merged.at("corpus").empty()) throw ConfigError("config lists no corpus files");
  for (const auto& m : merged.at("attack").at("methods")) {
    if (!m.is_string()) throw ConfigError("attack.methods must be strings");
    attacks::parse_method(m.get<std::string>());
  }
  // Paths become absolute so the config hash does not depend on the cwd.
  auto absolute = [](nlohmann::json& v) {
    if (v.is_string() && !v.get<std::string>().empty()) {
      v = fs::absolute(v.get<std::string>()).lexically_normal().string();
    }
  };
  for (const char* key : kPathKeys) absolute(merged[key]);
  for (auto& c : merged["corpus"]) absolute(c);
  RunConfig cfg;
  cfg.json_ = std::move(merged);
  for (const auto& p : cfg.corpus_paths()) {
    if (!fs::exists(p)) throw ConfigError("corpus file does not exist: " + p.string());
  }
  for (const char* key : {"topics", "lexicon"}) {
    if (!fs::exists(cfg.path(key))) {
      throw ConfigError(std::string(key) + " file does not exist: " + cfg.path(key).string());
    }
  }
  if (!cfg.path("analysis_template").empty() && !fs::exists(cfg.path("analysis_template"))) {
    throw ConfigError("analysis template does not exist: " + cfg.path("analysis_template").string());
  }
  bool synonyms_needed = false;
  for (const auto& m : cfg.json_["attack"]["methods"]) {
    synonyms_needed |= m == "pwws" || m == "textfooler_like";
  }
  if (synonyms_needed && !fs::exists(cfg.path("synonyms"))) {
    throw ConfigError("synonym lexicon does not exist: " + cfg.path("synonyms").string());
  }
  require_backend_kind(cfg.json_["generator"], "generator");
  require_backend_kind(cfg.json_["analyzer"], "analyzer");
  return cfg;
}

std::string RunConfig::hash() const { return sha256_hex(json_.dump()); }

fs::path RunConfig::path(std::string_view key) const {
  return fs::path(json_.at(std::string(key)).get<std::string>());
}

std::vector<fs::path> RunConfig::corpus_paths() const {
  std::vector<fs::path> out;
  for (const auto& c : json_.at("corpus")) out.emplace_back(c.get<std::string>());
  return out;
}

RunConfig load_config(const std::optional<fs::path>& file,
                      const std::vector<std::string>& overrides) {
  json j = json::object();
  if (file) {
    j = json::parse(read_file(*file), nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw ConfigError("config file is not a JSON object: " + file->string());
    }
    check_schema(RunConfig::defaults(), j, "");
    resolve_paths(j, fs::absolute(*file).parent_path());
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must be key=value: " + o);
    const auto keys = split(o.substr(0, eq), '.');
    json* node = &j;
    for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
      if (!node->contains(keys[i])) (*node)[keys[i]] = json::object();
      node = &(*node)[keys[i]];
      if (!node->is_object()) throw ConfigError("override path is not an object: " + o);
    }
    (*node)[keys.back()] = parse_override_value(o.substr(eq + 1));
  }
  return RunConfig::from_json(std::move(j));
}

// ---- manifest ----

std::string_view step_name(Step s) {
  switch (s) {
    case Step::kPrep: return "A.prep";
    case Step::kGan: return "A.gan";
    case Step::kGenerate: return "A.generate";
    case Step::kValidate: return "B.validate";
    case Step::kAnalyze: return "C.analyze";
    case Step::kAttack: return "C.attack";
    case Step::kLoopback: return "D.loopback";
  }
  return "?";
}

std::set<Step> steps_for_phases(std::string_view phases) {
  std::set<Step> out;
  for (char c : phases) {
    switch (std::toupper(static_cast<unsigned char>(c))) {
      case 'A': out.insert({Step::kPrep, Step::kGan, Step::kGenerate}); break;
      case 'B': out.insert(Step::kValidate); break;
      case 'C': out.insert({Step::kAnalyze, Step::kAttack}); break;
      case 'D': out.insert(Step::kLoopback); break;
      default: throw ConfigError(std::string("unknown phase '") + c + "'");
    }
  }
  if (out.empty()) throw ConfigError("no phases selected");
  return out;
}

std::map<std::string, std::string> RunManifest::artifact_hashes() const {
  std::map<std::string, std::string> out;
  for (const auto& p : phases) out.insert(p.outputs.begin(), p.outputs.end());
  return out;
}

ordered_json RunManifest::to_json() const {
  ordered_json j;
  j["tool_version"] = tool_version;
  j["config_hash"] = config_hash;
  j["run"] = run_name;
  j["status"] = status;
  if (!error.empty()) j["error"] = error;
  auto arr = ordered_json::array();
  for (const auto& p : phases) {
    arr.push_back({{"step", p.name}, {"inputs", p.inputs}, {"outputs", p.outputs},
                   {"seconds", p.seconds}});
  }
  j["phases"] = arr;
  return j;
}

RunManifest RunManifest::from_json(const json& j) {
  try {
    RunManifest m;
    m.tool_version = j.at("tool_version").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.run_name = j.at("run").get<std::string>();
    m.status = j.at("status").get<std::string>();
    m.error = j.value("error", "");
    for (const auto& p : j.at("phases")) {
      m.phases.push_back({p.at("step").get<std::string>(),
                          p.at("inputs").get<std::map<std::string, std::string>>(),
                          p.at("outputs").get<std::map<std::string, std::string>>(),
                          p.at("seconds").get<double>()});
    }
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("corrupt manifest: ") + e.what());
  }
}

// ---- orchestration ----

RunResult run_pipeline(const RunConfig& config, const RunOptions& options) {
  if (options.steps.empty()) throw ConfigError("no steps selected");
  if (options.from && !fs::is_directory(*options.from)) {
    throw MissingArtifactError(*options.from, "run directory not found");
  }
  RunResult result;
  result.run_dir = allocate_run_dir(config.output_dir());
  auto& m = result.manifest;
  m.tool_version = PHISHEVO_VERSION;
  m.config_hash = config.hash();
  m.run_name = result.run_dir.filename().string();
  m.status = "running";
  write_file(result.run_dir / "config.json", config.json().dump(2) + "\n");
  Run run(result.run_dir, options.from, m);
  try {
    for (Step s : options.steps) {
      run.begin(s);
      switch (s) {
        case Step::kPrep: step_prep(config, run); break;
        case Step::kGan: step_gan(config, run); break;
        case Step::kGenerate: step_generate(config, run); break;
        case Step::kValidate: step_validate(config, run); break;
        case Step::kAnalyze: step_analyze(config, run); break;
        case Step::kAttack: step_attack(config, run); break;
        case Step::kLoopback: step_loopback(config, run); break;
      }
      run.end();
      write_manifest(result.run_dir, m);
    }
  } catch (const std::exception& e) {
    m.phases.pop_back();  // the failed step produced nothing reliable
    m.status = "failed";
    m.error = e.what();
    write_manifest(result.run_dir, m);
    throw;
  }
  m.status = "complete";
  write_manifest(result.run_dir, m);
  return result;
}

std::vector<RunResult> run_iterations(const RunConfig& config, const RunOptions& options,
                                      std::size_t iterations) {
  if (iterations == 0) throw ConfigError("--iterate needs N >= 1");
  if (iterations > 1 && !options.steps.count(Step::kLoopback)) {
    throw ConfigError("chained iterations need the loop-back phase (D)");
  }
  std::vector<RunResult> out;
  RunConfig current = config;
  RunOptions opts = options;
  for (std::size_t i = 0; i < iterations; ++i) {
    out.push_back(run_pipeline(current, opts));
    if (i + 1 < iterations) {
      current = load_config(out.back().run_dir / "next_config.json");
      opts.from.reset();
    }
  }
  return out;
}

// ---- report ----

namespace {

std::optional<json> read_json_artifact(const fs::path& dir, const RunManifest& m,
                                       const std::string& name) {
  const auto hashes = m.artifact_hashes();
  if (!hashes.count(name)) return std::nullopt;
  return json::parse(read_file(dir / name));
}

std::vector<json> read_jsonl_artifact(const fs::path& dir, const std::string& name) {
  std::vector<json> out;
  std::istringstream in(read_file(dir / name));
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) out.push_back(json::parse(line));
  }
  return out;
}

}  // namespace

ordered_json emit_report(const fs::path& run_dir) {
  const auto mpath = run_dir / "manifest.json";
  if (!fs::exists(mpath)) throw MissingArtifactError(mpath, "run has no manifest");
  const auto mj = json::parse(read_file(mpath), nullptr, false);
  if (mj.is_discarded()) throw ParseError("corrupt manifest: " + mpath.string());
  const auto m = RunManifest::from_json(mj);
  const auto hashes = m.artifact_hashes();
  auto has = [&](const std::string& n) { return hashes.count(n) > 0; };

  ordered_json r;
  r["tool_version"] = m.tool_version;
  r["config_hash"] = m.config_hash;
  r["status"] = m.status;
  ordered_json artifacts;
  for (const auto& [name, h] : hashes) artifacts[name] = h;
  r["artifacts"] = artifacts;

  if (has("generated.jsonl") || has("gan_rounds.jsonl")) {
    ordered_json g;
    g["sources"] = ordered_json::array();
    if (has("gan_rounds.jsonl")) {
      g["sources"].push_back("gan_rounds.jsonl");
      auto rounds = ordered_json::array();
      for (const auto& line : read_jsonl_artifact(run_dir, "gan_rounds.jsonl")) {
        rounds.push_back({{"round", line.at("round")},
                          {"mean_generated_score", line.at("mean_generated_score")},
                          {"mean_real_score", line.at("mean_real_score")},
                          {"real_loss", line.at("real_loss")},
                          {"generated_loss", line.at("generated_loss")}});
      }
      g["gan_rounds"] = rounds;
    }
    if (has("generated.jsonl")) {
      g["sources"].push_back("generated.jsonl");
      g["generated_count"] = read_jsonl_artifact(run_dir, "generated.jsonl").size();
    }
    r["generation"] = g;
  } else {
    r["generation"] = "absent";
  }

  if (auto pas = read_json_artifact(run_dir, m, "pas_summary.json")) {
    ordered_json v;
    v["sources"] = {"pas_summary.json"};
    v["pas"] = *pas;
    if (auto cv = read_json_artifact(run_dir, m, "crossval.json")) {
      v["sources"].push_back("crossval.json");
      v["cross_validation"] = *cv;
    }
    r["validation"] = v;
  } else {
    r["validation"] = "absent";
  }

  if (auto q = read_json_artifact(run_dir, m, "quality.json")) {
    r["quality"] = {{"sources", {"quality.json"}}, {"metrics", *q}};
  } else {
    r["quality"] = "absent";
  }

  if (has("anomalies.jsonl")) {
    std::size_t gen = 0, real = 0, gen_anom = 0, real_anom = 0;
    for (const auto& line : read_jsonl_artifact(run_dir, "anomalies.jsonl")) {
      const bool is_gen = line.at("set") == "generated";
      const bool anom = line.at("anomaly").get<bool>();
      (is_gen ? gen : real) += 1;
      (is_gen ? gen_anom : real_anom) += anom ? 1 : 0;
    }
    ordered_json a;
    a["sources"] = {"anomalies.jsonl", "mann_whitney.json"};
    a["generated"] = gen;
    a["generated_anomalies"] = gen_anom;
    a["real"] = real;
    a["real_anomalies"] = real_anom;
    if (auto mw = read_json_artifact(run_dir, m, "mann_whitney.json")) a["mann_whitney"] = *mw;
    r["anomaly"] = a;
  } else {
    r["anomaly"] = "absent";
  }

  if (has("lda_selection.csv")) {
    ordered_json t;
    t["sources"] = {"lda_selection.csv", "extracted_topics.json"};
    auto rows = ordered_json::array();
    for (const auto& line : split(read_file(run_dir / "lda_selection.csv"), '\n')) {
      const auto f = parse_csv_line(line);
      if (f.size() != 3 || f[0] == "k") continue;
      rows.push_back({{"k", std::stoul(f[0])}, {"coherence", std::stod(f[1])}, {"selected", f[2] == "1"}});
    }
    t["coherence_by_k"] = rows;
    if (auto ex = read_json_artifact(run_dir, m, "extracted_topics.json")) t["extracted"] = *ex;
    r["topics"] = t;
  } else {
    r["topics"] = "absent";
  }

  if (auto p = read_json_artifact(run_dir, m, "persuasion.json")) {
    r["persuasion"] = {{"sources", {"persuasion.json", "dps.jsonl", "contexts.csv"}}, {"summary", *p}};
  } else {
    r["persuasion"] = "absent";
  }

  if (auto a = read_json_artifact(run_dir, m, "robustness.json")) {
    r["attacks"] = {{"sources", {"robustness.json", "robustness.csv"}}, {"table", *a}};
  } else {
    r["attacks"] = "absent";
  }

  if (has("topics_next.csv")) {
    const auto lines = split(trim(read_file(run_dir / "topics_next.csv")), '\n');
    std::size_t loop = 0;
    for (const auto& l : lines) loop += l.rfind("loopback,", 0) == 0 ? 1 : 0;
    r["loopback"] = {{"sources", {"topics_next.csv", "next_config.json"}},
                     {"topics", lines.empty() ? 0 : lines.size() - 1},
                     {"loopback_topics", loop}};
  } else {
    r["loopback"] = "absent";
  }

  write_file(run_dir / "report.json", r.dump(2) + "\n");
  write_file(run_dir / "report.txt", render_report_text(r));
  return r;
}

std::string render_report_text(const ordered_json& r) {
  std::ostringstream out;
  out << "phishevo report (tool " << r.value("tool_version", "?") << ", status "
      << r.value("status", "?") << ")\n";
  out << "config " << r.value("config_hash", "").substr(0, 16) << "\n\n";
  auto section = [&](const char* key, const char* title) -> const ordered_json* {
    out << "== " << title << " ==\n";
    const auto& s = r.at(key);
    if (s.is_string()) {
      out << "absent\n\n";
      return nullptr;
    }
    return &s;
  };
  if (const auto* g = section("generation", "Generation")) {
    if (g->contains("gan_rounds")) {
      for (const auto& rd : g->at("gan_rounds")) {
        out << "round " << rd.at("round").get<int>() << ": D(gen) "
            << fmt(rd.at("mean_generated_score").get<double>()) << ", D(real) "
            << fmt(rd.at("mean_real_score").get<double>()) << "\n";
      }
    }
    if (g->contains("generated_count")) out << "generated emails: " << g->at("generated_count") << "\n";
    out << "\n";
  }
  if (const auto* v = section("validation", "Validation")) {
    const auto& p = v->at("pas");
    out << "PAS >= 6: " << fmt(p.at("frac_score_ge_6").get<double>()) << ", PAS >= 8: "
        << fmt(p.at("frac_score_ge_8").get<double>()) << ", retained " << p.at("retained")
        << " of " << p.at("total") << "\n";
    if (v->contains("cross_validation") && v->at("cross_validation").contains("mean_f1") &&
        v->at("cross_validation").at("mean_f1").is_number()) {
      out << "analyzer mean F1 " << fmt(v->at("cross_validation").at("mean_f1").get<double>()) << "\n";
    }
    out << "\n";
  }
  if (const auto* q = section("quality", "Quality")) {
    const auto& mtr = q->at("metrics");
    for (const char* k : {"perplexity_generated", "perplexity_real_eval", "coherence_generated"}) {
      if (mtr.contains(k) && mtr.at(k).is_object()) {
        out << k << ": mean " << fmt(mtr.at(k).at("mean").get<double>()) << ", median "
            << fmt(mtr.at(k).at("median").get<double>()) << "\n";
      }
    }
    out << "\n";
  }
  if (const auto* a = section("anomaly", "Anomalies")) {
    out << "generated " << a->at("generated_anomalies") << "/" << a->at("generated") << ", real "
        << a->at("real_anomalies") << "/" << a->at("real") << "\n\n";
  }
  if (const auto* t = section("topics", "Topics")) {
    for (const auto& row : t->at("coherence_by_k")) {
      out << "K=" << row.at("k") << " coherence " << fmt(row.at("coherence").get<double>())
          << (row.at("selected").get<bool>() ? " (selected)" : "") << "\n";
    }
    out << "\n";
  }
  if (const auto* p = section("persuasion", "Persuasion")) {
    const auto& h = p->at("summary").at("histogram_generated");
    if (h.is_array()) {
      out << "generated, fraction with >= j principles:";
      for (const auto& v : h) out << " " << fmt(v.get<double>(), 3);
      out << "\n";
    }
    out << "\n";
  }
  if (const auto* a = section("attacks", "Attacks")) {
    for (const auto& row : a->at("table").at("rows")) {
      out << row.at("model").get<std::string>() << " " << row.at("method").get<std::string>()
          << ": Acc " << fmt(row.at("Acc").get<double>()) << ", EVA-Acc "
          << fmt(row.at("EVA-Acc").get<double>()) << ", ASR "
          << fmt(row.at("ASR_percent").get<double>(), 2) << "%\n";
    }
    out << "\n";
  }
  if (const auto* l = section("loopback", "Loop-back")) {
    out << "topics " << l->at("topics") << " (" << l->at("loopback_topics") << " loop-back)\n\n";
  }
  return out.str();
}

}  // namespace phishevo::pipeline
