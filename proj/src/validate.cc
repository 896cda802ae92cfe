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

#include "phishevo/validate.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "phishevo/common.h"

namespace phishevo::validate {

namespace {

// Index one past the brace closing the object that opens at `start`, or npos.
std::size_t match_object(std::string_view text, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) escaped = false;
      else if (c == '\\') escaped = true;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return i + 1;
  }
  return std::string_view::npos;
}

}  // namespace

AnalyzerVerdict parse_verdict(std::string_view text) {
  std::optional<nlohmann::json> last;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] == '{') {
      const std::size_t end = match_object(text, pos);
      if (end != std::string_view::npos) {
        auto j = nlohmann::json::parse(text.substr(pos, end - pos), nullptr, false);
        if (!j.is_discarded() && j.is_object()) {
          last = std::move(j);
          pos = end;
          continue;
        }
      }
    }
    ++pos;
  }
  if (!last) throw ParseError("no JSON object found in analyzer response");
  const auto& j = *last;

  AnalyzerVerdict v;
  v.raw = std::string(text);
  if (!j.contains("is_phishing") || !j["is_phishing"].is_boolean()) {
    throw ParseError("verdict is missing boolean 'is_phishing'");
  }
  v.is_phishing = j["is_phishing"].get<bool>();
  if (!j.contains("phishing_score") || !j["phishing_score"].is_number()) {
    throw ParseError("verdict is missing numeric 'phishing_score'");
  }
  const double score = j["phishing_score"].get<double>();
  if (score != std::floor(score)) throw ParseError("phishing_score is not an integer");
  if (score < 0 || score > 10) {
    throw VerdictRangeError("phishing_score " + j["phishing_score"].dump() +
                            " outside [0, 10]");
  }
  v.phishing_score = static_cast<int>(score);
  for (const char* key : {"rationales", "rationals"}) {
    if (!j.contains(key)) continue;
    const auto& r = j[key];
    if (r.is_string()) {
      v.rationales.push_back(r.get<std::string>());
    } else if (r.is_array()) {
      for (const auto& item : r) {
        v.rationales.push_back(item.is_string() ? item.get<std::string>() : item.dump());
      }
    } else {
      throw ParseError(std::string("'") + key + "' must be a string list");
    }
    break;
  }
  return v;
}

std::string default_analysis_template() {
  return R"(You are a cybersecurity analyst. Analyze the email body below for signs of phishing.
Consider the sender's claimed identity, the requested actions, links or credentials requested,
urgency or pressure, impersonated brands, and persuasion techniques.

Answer with a single JSON object and nothing else:
{"is_phishing": true|false, "phishing_score": <integer 0-10>, "rationales": ["<reason>", ...]}

phishing_score is 0 for a clearly legitimate email and 10 for a certain phishing attempt.

-----BEGIN EMAIL-----
{{EMAIL_BODY}}
-----END EMAIL-----
)";
}

std::string render_analysis_prompt(std::string_view tmpl, std::string_view body) {
  static constexpr std::string_view kPlaceholder = "{{EMAIL_BODY}}";
  std::string out(tmpl);
  const auto pos = out.find(kPlaceholder);
  if (pos == std::string::npos) {
    throw ConfigError("analysis template has no {{EMAIL_BODY}} placeholder");
  }
  out.replace(pos, kPlaceholder.size(), body);
  return out;
}

AnalyzerVerdict analyze_email(const corpus::EmailRecord& record, llm::CompletionBackend& backend,
                              std::string_view analysis_template,
                              const AnalyzerOptions& options) {
  llm::ChatRequest req;
  req.model = options.model;
  req.temperature = options.temperature;
  req.max_tokens = options.max_tokens;
  req.messages.push_back({llm::Role::kUser, render_analysis_prompt(analysis_template, record.body())});
  std::string response = backend.complete(req);
  try {
    return parse_verdict(response);
  } catch (const ParseError& first) {
    req.messages.push_back({llm::Role::kAssistant, response});
    req.messages.push_back(
        {llm::Role::kUser, std::string("Your answer could not be used (") + first.what() +
                               "). Reply with only the JSON object described above."});
    return parse_verdict(backend.complete(req));
  }
}

nlohmann::ordered_json verdict_to_json(const IdentifiedVerdict& v) {
  nlohmann::ordered_json j;
  j["id"] = v.id;
  j["is_phishing"] = v.verdict.is_phishing;
  j["phishing_score"] = v.verdict.phishing_score;
  j["rationales"] = v.verdict.rationales;
  return j;
}

nlohmann::ordered_json PasSummary::to_json() const {
  nlohmann::ordered_json j;
  j["total"] = total;
  j["histogram"] = histogram;
  j["frac_score_ge_6"] = frac_at_least_6;
  j["frac_score_ge_8"] = frac_at_least_8;
  j["frac_score_lt_5"] = frac_below_5;
  j["score_5_unclassified"] = score_5_count;
  j["retained"] = retained_ids.size();
  j["retained_ids"] = retained_ids;
  j["reference"] = {{"frac_score_ge_6", 0.848}, {"frac_score_ge_8", 0.713}};
  return j;
}

PasSummary pas_summary(std::span<const IdentifiedVerdict> verdicts, int retention_score) {
  if (verdicts.empty()) throw ConfigError("pas_summary needs at least one verdict");
  PasSummary s;
  s.total = verdicts.size();
  std::size_t ge6 = 0, ge8 = 0, lt5 = 0;
  for (const auto& v : verdicts) {
    const int score = v.verdict.phishing_score;
    ++s.histogram.at(static_cast<std::size_t>(score));
    if (score >= 6) ++ge6;
    if (score >= 8) ++ge8;
    if (score < 5) ++lt5;
    if (score == 5) ++s.score_5_count;
    if (v.verdict.is_phishing && score >= retention_score) s.retained_ids.push_back(v.id);
  }
  const auto n = static_cast<double>(s.total);
  s.frac_at_least_6 = static_cast<double>(ge6) / n;
  s.frac_at_least_8 = static_cast<double>(ge8) / n;
  s.frac_below_5 = static_cast<double>(lt5) / n;
  return s;
}

nlohmann::ordered_json CrossValidation::to_json() const {
  auto opt = [](std::optional<double> v) -> nlohmann::ordered_json {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json j;
  auto folds_json = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < folds.size(); ++i) {
    auto f = folds[i].metrics.to_json();
    f["fold"] = i + 1;
    f["size"] = folds[i].member_ids.size();
    folds_json.push_back(f);
  }
  j["folds"] = folds_json;
  j["mean_precision"] = opt(mean_precision);
  j["mean_recall"] = opt(mean_recall);
  j["mean_accuracy"] = mean_accuracy;
  j["mean_f1"] = opt(mean_f1);
  j["mean_f2"] = opt(mean_f2);
  j["reference"] = {{"mean_f1", 0.95}, {"mean_f2", 0.97}};
  return j;
}

std::vector<std::vector<std::size_t>> stratified_folds(const corpus::Corpus& data,
                                                       std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("cross-validation needs k >= 2");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < data.size(); ++i) {
    (data[i].label() == corpus::Label::kPhishing ? pos : neg).push_back(i);
  }
  if (pos.size() < k || neg.size() < k) {
    throw ConfigError("each class needs at least k=" + std::to_string(k) +
                      " records for stratified folds (phishing " + std::to_string(pos.size()) +
                      ", other " + std::to_string(neg.size()) + ")");
  }
  Rng rng(seed);
  rng.shuffle(pos);
  rng.shuffle(neg);
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t i = 0; i < pos.size(); ++i) folds[i % k].push_back(pos[i]);
  for (std::size_t i = 0; i < neg.size(); ++i) folds[i % k].push_back(neg[i]);
  return folds;
}

CrossValidation cross_validate(const corpus::Corpus& data, std::size_t k,
                               llm::CompletionBackend& backend, std::uint64_t seed,
                               std::string_view analysis_template,
                               const AnalyzerOptions& options) {
  CrossValidation cv;
  double f1_sum = 0, f2_sum = 0, p_sum = 0, r_sum = 0, acc_sum = 0;
  std::size_t f1_n = 0, f2_n = 0, p_n = 0, r_n = 0;
  for (const auto& fold : stratified_folds(data, k, seed)) {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    FoldResult fr;
    for (auto idx : fold) {
      const auto& rec = data[idx];
      fr.member_ids.push_back(rec.id());
      const bool predicted = analyze_email(rec, backend, analysis_template, options).is_phishing;
      const bool actual = rec.label() == corpus::Label::kPhishing;
      if (predicted && actual) ++tp;
      else if (predicted) ++fp;
      else if (actual) ++fn;
      else ++tn;
    }
    fr.metrics = detector::ConfusionMetrics::from_counts(tp, fp, tn, fn);
    fr.f1 = fr.metrics.f1();
    fr.f2 = fr.metrics.f2();
    if (fr.f1) f1_sum += *fr.f1, ++f1_n;
    if (fr.f2) f2_sum += *fr.f2, ++f2_n;
    if (fr.metrics.precision) p_sum += *fr.metrics.precision, ++p_n;
    if (fr.metrics.recall) r_sum += *fr.metrics.recall, ++r_n;
    acc_sum += fr.metrics.accuracy;
    cv.folds.push_back(std::move(fr));
  }
  if (f1_n) cv.mean_f1 = f1_sum / static_cast<double>(f1_n);
  if (f2_n) cv.mean_f2 = f2_sum / static_cast<double>(f2_n);
  if (p_n) cv.mean_precision = p_sum / static_cast<double>(p_n);
  if (r_n) cv.mean_recall = r_sum / static_cast<double>(r_n);
  cv.mean_accuracy = acc_sum / static_cast<double>(cv.folds.size());
  return cv;
}

LexiconAnalyzerStub::LexiconAnalyzerStub(std::vector<std::string> cue_words) {
  std::set<std::string> uniq;
  for (auto& w : cue_words) {
    auto t = analysis_tokens(w);
    if (t.size() == 1) uniq.insert(t[0]);
  }
  cue_words_.assign(uniq.begin(), uniq.end());
}

std::string LexiconAnalyzerStub::complete(const llm::ChatRequest& request) {
  request.validate();
  std::string_view content;
  for (const auto& m : request.messages) {
    if (m.role == llm::Role::kUser) {
      content = m.content;
      break;
    }
  }
  static constexpr std::string_view kBegin = "-----BEGIN EMAIL-----";
  static constexpr std::string_view kEnd = "-----END EMAIL-----";
  if (auto b = content.find(kBegin); b != std::string_view::npos) {
    content.remove_prefix(b + kBegin.size());
    if (auto e = content.rfind(kEnd); e != std::string_view::npos) content = content.substr(0, e);
  }
  std::set<std::string> hits;
  for (const auto& t : analysis_tokens(content)) {
    if (std::binary_search(cue_words_.begin(), cue_words_.end(), t)) hits.insert(t);
  }
  const int score = std::min<int>(10, static_cast<int>(hits.size()));
  nlohmann::ordered_json j;
  j["is_phishing"] = score >= 5;
  j["phishing_score"] = score;
  auto rationales = nlohmann::ordered_json::array();
  for (const auto& h : hits) {
    if (rationales.size() == 3) break;
    rationales.push_back("uses cue word '" + h + "'");
  }
  j["rationales"] = rationales;
  return j.dump();
}

}  // namespace phishevo::validate
