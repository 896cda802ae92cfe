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

#include "phishevo/attacks.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>

#include "phishevo/common.h"

namespace phishevo::attacks {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kDeepWordBug: return "deepwordbug";
    case Method::kPruthi: return "pruthi";
    case Method::kPwws: return "pwws";
    case Method::kTextFoolerLike: return "textfooler_like";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  const auto key = to_lower(trim(name));
  for (auto m : {Method::kDeepWordBug, Method::kPruthi, Method::kPwws, Method::kTextFoolerLike}) {
    if (method_name(m) == key) return m;
  }
  throw ConfigError("unknown attack method '" + std::string(name) + "'");
}

void PerturbationBudget::validate() const {
  if (!(max_word_fraction >= 0.0 && max_word_fraction <= 1.0)) {
    throw ConfigError("budget word fraction must lie in [0, 1]");
  }
  if (max_queries < 1) throw ConfigError("budget needs at least one query");
  if (!(similarity_floor >= 0.0 && similarity_floor <= 1.0)) {
    throw ConfigError("similarity floor must lie in [0, 1]");
  }
}

std::size_t PerturbationBudget::max_edits(std::size_t word_count) const {
  // The epsilon keeps e.g. 0.15 * 20 from rounding up to 4.
  return static_cast<std::size_t>(
      std::ceil(max_word_fraction * static_cast<double>(word_count) - 1e-9));
}

SynonymLexicon parse_synonyms(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("synonym lexicon must be a JSON object");
  SynonymLexicon out;
  for (const auto& [word, syns] : j.items()) {
    if (!syns.is_array()) throw ConfigError("synonyms of '" + word + "' must be an array");
    auto& list = out[to_lower(word)];
    for (const auto& s : syns) {
      if (!s.is_string()) throw ConfigError("synonyms of '" + word + "' must be strings");
      auto v = trim(s.get<std::string>());
      if (!v.empty() && v.find_first_of(" \t\r\n") == std::string::npos &&
          to_lower(v) != to_lower(word) && std::find(list.begin(), list.end(), v) == list.end()) {
        list.push_back(v);
      }
    }
  }
  return out;
}

SynonymLexicon load_synonyms(const std::filesystem::path& path) {
  auto j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw ConfigError("synonym lexicon is not valid JSON: " + path.string());
  return parse_synonyms(j);
}

double bigram_jaccard(std::string_view a, std::string_view b) {
  auto grams = [](std::string_view w) {
    const auto s = to_lower(w);
    std::set<std::string> g;
    if (s.size() == 1) g.insert(s);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) g.insert(s.substr(i, 2));
    return g;
  };
  const auto ga = grams(a), gb = grams(b);
  if (ga.empty() && gb.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& g : ga) inter += gb.count(g);
  return static_cast<double>(inter) / static_cast<double>(ga.size() + gb.size() - inter);
}

nlohmann::ordered_json AttackOutcome::to_json() const {
  nlohmann::ordered_json j;
  j["id"] = original_id;
  j["method"] = method_name(method);
  j["queries"] = queries;
  j["words_edited"] = words_edited;
  j["original_probability"] = original_probability;
  j["perturbed_probability"] = perturbed_probability;
  j["success"] = success;
  j["perturbed_body"] = perturbed_body;
  return j;
}

namespace {

struct Span {
  std::size_t begin, end;
};

std::vector<Span> word_spans(std::string_view body) {
  std::vector<Span> out;
  std::size_t i = 0;
  while (i < body.size()) {
    while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
    if (i == body.size()) break;
    const std::size_t b = i;
    while (i < body.size() && !std::isspace(static_cast<unsigned char>(body[i]))) ++i;
    out.push_back({b, i});
  }
  return out;
}

// Body with `words` substituted back into the original layout.
std::string rebuild(std::string_view body, const std::vector<Span>& spans,
                    const std::vector<std::string>& words) {
  std::string out;
  std::size_t prev = 0;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    out.append(body.substr(prev, spans[i].begin - prev));
    out += words[i];
    prev = spans[i].end;
  }
  out.append(body.substr(prev));
  return out;
}

std::string without_token(std::string_view body, const std::vector<Span>& spans, std::size_t i) {
  std::size_t b = spans[i].begin, e = spans[i].end;
  if (i + 1 < spans.size()) {
    e = spans[i + 1].begin;
  } else if (i > 0) {
    b = spans[i - 1].end;
  }
  std::string out(body.substr(0, b));
  out.append(body.substr(e));
  return out;
}

class Querier {
 public:
  Querier(const detector::ProbabilityModel& model, std::size_t limit)
      : model_(model), limit_(limit) {}
  std::optional<double> operator()(std::string_view body) {
    if (used_ >= limit_) return std::nullopt;
    ++used_;
    return model_.probability(body);
  }
  std::size_t used() const { return used_; }
  std::size_t remaining() const { return limit_ - used_; }

 private:
  const detector::ProbabilityModel& model_;
  std::size_t limit_;
  std::size_t used_ = 0;
};

struct WordParts {
  std::string prefix, core, suffix;
  std::string join() const { return prefix + core + suffix; }
};

WordParts split_word(const std::string& w) {
  std::size_t b = 0, e = w.size();
  while (b < e && std::ispunct(static_cast<unsigned char>(w[b]))) ++b;
  while (e > b && std::ispunct(static_cast<unsigned char>(w[e - 1]))) --e;
  return {w.substr(0, b), w.substr(b, e - b), w.substr(e)};
}

char random_letter(Rng& rng) { return static_cast<char>('a' + rng.uniform_index(26)); }

std::string deepwordbug_edit(const std::string& core, Rng& rng) {
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::string s = core;
    switch (rng.uniform_index(4)) {
      case 0:  // swap adjacent
        if (s.size() >= 2) {
          const auto i = rng.uniform_index(s.size() - 1);
          std::swap(s[i], s[i + 1]);
        }
        break;
      case 1: {  // substitute
        const auto i = rng.uniform_index(s.size());
        s[i] = random_letter(rng);
        break;
      }
      case 2:  // delete
        if (s.size() >= 2) s.erase(rng.uniform_index(s.size()), 1);
        break;
      default:  // insert
        s.insert(s.begin() + static_cast<std::ptrdiff_t>(rng.uniform_index(s.size() + 1)),
                 random_letter(rng));
        break;
    }
    if (s != core) return s;
  }
  return core;
}

const std::vector<std::string>& keyboard_rows() {
  static const std::vector<std::string> rows = {"qwertyuiop", "asdfghjkl", "zxcvbnm"};
  return rows;
}

std::string keyboard_neighbors(char c) {
  const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  const auto& rows = keyboard_rows();
  std::string out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto col = rows[r].find(lower);
    if (col == std::string::npos) continue;
    if (col > 0) out += rows[r][col - 1];
    if (col + 1 < rows[r].size()) out += rows[r][col + 1];
    if (r > 0 && col < rows[r - 1].size()) out += rows[r - 1][col];
    if (r + 1 < rows.size() && col < rows[r + 1].size()) out += rows[r + 1][col];
  }
  if (std::isupper(static_cast<unsigned char>(c))) {
    for (auto& ch : out) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  }
  return out;
}

std::vector<std::string> pruthi_edits(const std::string& core, Rng& rng) {
  std::vector<std::string> out;
  for (int attempt = 0; attempt < 6 && out.size() < 3; ++attempt) {
    std::string s = core;
    if (rng.uniform_index(2) == 0 && s.size() >= 2) {
      const auto i = rng.uniform_index(s.size() - 1);
      std::swap(s[i], s[i + 1]);
    } else {
      const auto i = rng.uniform_index(s.size());
      const auto nb = keyboard_neighbors(s[i]);
      if (nb.empty()) continue;
      s[i] = nb[rng.uniform_index(nb.size())];
    }
    if (s != core && std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

std::string match_case(const std::string& replacement, const std::string& original) {
  std::string s = replacement;
  if (!original.empty() && std::isupper(static_cast<unsigned char>(original[0])) && !s.empty()) {
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  }
  return s;
}

std::vector<std::string> candidates(Method method, const std::string& word, Rng& rng,
                                    const PerturbationBudget& budget,
                                    const AttackContext& ctx) {
  const auto parts = split_word(word);
  if (parts.core.empty()) return {};
  std::vector<std::string> cores;
  switch (method) {
    case Method::kDeepWordBug: {
      auto s = deepwordbug_edit(parts.core, rng);
      if (s != parts.core) cores.push_back(s);
      break;
    }
    case Method::kPruthi:
      cores = pruthi_edits(parts.core, rng);
      break;
    case Method::kPwws:
    case Method::kTextFoolerLike: {
      if (!ctx.synonyms) throw ConfigError("synonym attacks need a synonym lexicon");
      auto it = ctx.synonyms->find(to_lower(parts.core));
      if (it == ctx.synonyms->end()) break;
      for (const auto& syn : it->second) {
        if (method == Method::kTextFoolerLike &&
            bigram_jaccard(syn, parts.core) < budget.similarity_floor) {
          continue;
        }
        cores.push_back(match_case(syn, parts.core));
      }
      break;
    }
  }
  std::vector<std::string> out;
  for (const auto& c : cores) out.push_back(parts.prefix + c + parts.suffix);
  return out;
}

}  // namespace

std::vector<TokenImportance> token_saliency(std::string_view body,
                                            const detector::ProbabilityModel& detector) {
  const auto spans = word_spans(body);
  const double base = detector.probability(body);
  std::vector<TokenImportance> out;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    out.push_back({i, base - detector.probability(without_token(body, spans, i))});
  }
  std::stable_sort(out.begin(), out.end(), [](const TokenImportance& a, const TokenImportance& b) {
    return a.importance > b.importance;
  });
  return out;
}

AttackOutcome perturb(std::string_view body, Method method,
                      const detector::ProbabilityModel& detector,
                      const PerturbationBudget& budget, std::uint64_t seed,
                      const AttackContext& context) {
  budget.validate();
  if ((method == Method::kPwws || method == Method::kTextFoolerLike) && !context.synonyms) {
    throw ConfigError("synonym attacks need a synonym lexicon");
  }
  AttackOutcome out;
  out.method = method;
  out.original_body = std::string(body);
  out.perturbed_body = out.original_body;

  Querier query(detector, budget.max_queries);
  const double p0 = *query(body);
  out.original_probability = out.perturbed_probability = p0;
  const auto spans = word_spans(body);
  const std::size_t max_edits = budget.max_edits(spans.size());
  if (p0 < context.threshold || max_edits == 0) {
    out.queries = query.used();
    return out;
  }

  // Saliency for as many tokens as half the remaining budget allows; the
  // rest follow in reading order.
  const std::size_t ranked_n = std::min(spans.size(), query.remaining() / 2);
  std::vector<TokenImportance> ranked;
  for (std::size_t i = 0; i < ranked_n; ++i) {
    ranked.push_back({i, p0 - *query(without_token(body, spans, i))});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const TokenImportance& a, const TokenImportance& b) {
                     return a.importance > b.importance;
                   });
  for (std::size_t i = ranked_n; i < spans.size(); ++i) ranked.push_back({i, 0.0});

  std::vector<std::string> words;
  for (const auto& s : spans) words.emplace_back(body.substr(s.begin, s.end - s.begin));
  Rng rng(seed);
  double current = p0;
  for (const auto& t : ranked) {
    if (out.words_edited >= max_edits || query.remaining() == 0) break;
    const std::string original = words[t.position];
    std::optional<std::string> best;
    double best_p = current;
    for (const auto& cand : candidates(method, original, rng, budget, context)) {
      words[t.position] = cand;
      const auto p = query(rebuild(body, spans, words));
      if (!p) break;
      if (*p < best_p) {
        best_p = *p;
        best = cand;
      }
    }
    words[t.position] = best ? *best : original;
    if (best) {
      ++out.words_edited;
      current = best_p;
      if (current < context.threshold) break;
    }
  }
  out.perturbed_body = rebuild(body, spans, words);
  out.perturbed_probability = current;
  out.success = current < context.threshold;
  out.queries = query.used();
  return out;
}

double evaluate_asr(std::span<const AttackOutcome> outcomes) {
  if (outcomes.empty()) throw ConfigError("ASR needs at least one attack outcome");
  std::size_t s = 0;
  for (const auto& o : outcomes) s += o.success ? 1 : 0;
  return static_cast<double>(s) / static_cast<double>(outcomes.size());
}

namespace {

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string fmt(const std::optional<double>& v, int digits) { return v ? fmt(*v, digits) : ""; }

}  // namespace

std::string RobustnessReport::to_csv() const {
  std::string out = "model,dataset,method,Acc,F1,EVA-Acc,EVA-F1,ASR_percent\n";
  for (const auto& r : rows) {
    out += csv_escape(r.model) + "," + csv_escape(r.dataset) + "," +
           std::string(method_name(r.method)) + "," + fmt(r.acc, 4) + "," + fmt(r.f1, 4) + "," +
           fmt(r.eva_acc, 4) + "," + fmt(r.eva_f1, 4) + "," + fmt(r.asr_percent, 2) + "\n";
  }
  return out;
}

nlohmann::ordered_json RobustnessReport::to_json() const {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    j.push_back({{"model", r.model},
                 {"dataset", r.dataset},
                 {"method", method_name(r.method)},
                 {"Acc", r.acc},
                 {"F1", opt(r.f1)},
                 {"EVA-Acc", r.eva_acc},
                 {"EVA-F1", opt(r.eva_f1)},
                 {"ASR_percent", r.asr_percent},
                 {"attacked", r.attacked}});
  }
  return j;
}

RobustnessReport robustness_report(std::span<const RobustnessInput> detectors,
                                   const corpus::Corpus& eval, std::string_view dataset,
                                   std::span<const Method> methods,
                                   const PerturbationBudget& budget, std::uint64_t seed,
                                   const AttackContext& context) {
  budget.validate();
  RobustnessReport report;
  for (const auto& d : detectors) {
    if (!d.detector) throw ConfigError("robustness_report: null detector");
    const auto clean = detector::evaluate(*d.detector, eval, context.threshold);
    for (auto m : methods) {
      corpus::Corpus perturbed = eval;
      std::vector<AttackOutcome> outcomes;
      for (std::size_t i = 0; i < eval.size(); ++i) {
        const auto& rec = eval[i];
        if (rec.label() != corpus::Label::kPhishing) continue;
        if (d.detector->probability(rec.body()) < context.threshold) continue;
        auto o = perturb(rec.body(), m, *d.detector, budget,
                         derive_seed(derive_seed(seed, static_cast<std::uint64_t>(m)), i), context);
        o.original_id = rec.id();
        perturbed[i] = rec.with_body(o.perturbed_body);
        outcomes.push_back(std::move(o));
      }
      const auto adv = detector::evaluate(*d.detector, perturbed, context.threshold);
      RobustnessRow row;
      row.model = d.name;
      row.dataset = std::string(dataset);
      row.method = m;
      row.acc = clean.accuracy;
      row.f1 = clean.f1();
      row.eva_acc = adv.accuracy;
      row.eva_f1 = adv.f1();
      row.attacked = outcomes.size();
      row.asr_percent = outcomes.empty() ? 0.0 : 100.0 * evaluate_asr(outcomes);
      report.rows.push_back(std::move(row));
      for (auto& o : outcomes) report.outcomes.push_back(std::move(o));
    }
  }
  return report;
}

std::vector<detector::LabeledText> adversarial_examples(std::span<const AttackOutcome> outcomes) {
  std::vector<detector::LabeledText> out;
  for (const auto& o : outcomes) {
    if (o.success) out.push_back({o.perturbed_body, true});
  }
  return out;
}

}  // namespace phishevo::attacks
