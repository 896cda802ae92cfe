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

#include "phishevo/persuasion.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "phishevo/common.h"

namespace phishevo::persuasion {

std::string_view principle_name(Principle p) {
  switch (p) {
    case Principle::kAuthority: return "Authority";
    case Principle::kReciprocity: return "Reciprocity";
    case Principle::kScarcity: return "Scarcity";
    case Principle::kLiking: return "Liking";
    case Principle::kSocialProof: return "SocialProof";
    case Principle::kConsistency: return "Consistency";
  }
  return "?";
}

Principle parse_principle(std::string_view name) {
  std::string key;
  for (char c : to_lower(trim(name))) {
    if (c != ' ' && c != '_' && c != '-') key += c;
  }
  for (auto p : kAllPrinciples) {
    if (to_lower(principle_name(p)) == key) return p;
  }
  throw ConfigError("unknown persuasion principle '" + std::string(name) + "'");
}

namespace {

std::string normalize_entry(std::string_view entry) {
  auto tokens = analysis_tokens(entry);
  if (tokens.empty()) throw ConfigError("empty lexicon entry '" + std::string(entry) + "'");
  return join(tokens, " ");
}

}  // namespace

LexiconSet::LexiconSet(std::vector<PrincipleLexicon> lexicons) {
  std::map<std::string, Principle> owner;
  for (auto p : kAllPrinciples) {
    auto it = std::find_if(lexicons.begin(), lexicons.end(),
                           [p](const PrincipleLexicon& l) { return l.principle == p; });
    if (it == lexicons.end()) {
      throw ConfigError("lexicon is missing the " + std::string(principle_name(p)) + " section");
    }
    if (std::count_if(lexicons.begin(), lexicons.end(),
                      [p](const PrincipleLexicon& l) { return l.principle == p; }) > 1) {
      throw ConfigError("lexicon defines " + std::string(principle_name(p)) + " twice");
    }
    PrincipleLexicon lex{p, {}, it->liwc_categories};
    std::set<std::string> seen;
    for (const auto& raw : it->entries) {
      auto e = normalize_entry(raw);
      if (!seen.insert(e).second) continue;
      if (auto o = owner.find(e); o != owner.end()) {
        throw ConfigError("lexicon entry '" + e + "' appears under both " +
                          std::string(principle_name(o->second)) + " and " +
                          std::string(principle_name(p)));
      }
      owner.emplace(e, p);
      lex.entries.push_back(e);
    }
    if (lex.entries.empty()) {
      throw ConfigError("lexicon section " + std::string(principle_name(p)) + " has no entries");
    }
    lexicons_.push_back(std::move(lex));
  }
  for (const auto& lex : lexicons_) {
    for (const auto& e : lex.entries) {
      auto tokens = split_whitespace(e);
      by_first_[tokens[0]].push_back({tokens, lex.principle, e});
    }
  }
  for (auto& [first, phrases] : by_first_) {
    std::stable_sort(phrases.begin(), phrases.end(), [](const Phrase& a, const Phrase& b) {
      return a.tokens.size() > b.tokens.size();
    });
  }
}

const PrincipleLexicon& LexiconSet::lexicon(Principle p) const {
  return lexicons_[static_cast<std::size_t>(p)];
}

std::vector<std::string> LexiconSet::all_entries() const {
  std::vector<std::string> out;
  for (const auto& l : lexicons_) out.insert(out.end(), l.entries.begin(), l.entries.end());
  return out;
}

std::vector<LexiconSet::Match> LexiconSet::find_matches(
    std::span<const std::string> tokens) const {
  std::vector<Match> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    auto it = by_first_.find(tokens[i]);
    const Phrase* hit = nullptr;
    if (it != by_first_.end()) {
      for (const auto& ph : it->second) {
        if (i + ph.tokens.size() <= tokens.size() &&
            std::equal(ph.tokens.begin(), ph.tokens.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
          hit = &ph;
          break;
        }
      }
    }
    if (hit) {
      out.push_back({hit->principle, i, i + hit->tokens.size(), hit->entry});
      i += hit->tokens.size();
    } else {
      ++i;
    }
  }
  return out;
}

LexiconSet parse_lexicon(std::string_view text) {
  std::vector<PrincipleLexicon> lexicons;
  std::string pending_key, pending_value;
  int line_no = 0;

  auto flush = [&]() {
    if (pending_key.empty()) return;
    std::string value = trim(pending_value);
    // Allow a trailing comma before the closing bracket.
    if (auto close = value.rfind(']'); close != std::string::npos) {
      auto before = value.find_last_not_of(" \t\r\n", close - 1);
      if (before != std::string::npos && value[before] == ',') value.erase(before, 1);
    }
    auto j = nlohmann::json::parse(value, nullptr, false);
    if (j.is_discarded() || !j.is_array()) {
      throw ConfigError("lexicon: '" + pending_key + "' must be an array of strings");
    }
    std::vector<std::string> items;
    for (const auto& v : j) {
      if (!v.is_string()) throw ConfigError("lexicon: non-string item in '" + pending_key + "'");
      items.push_back(v.get<std::string>());
    }
    if (lexicons.empty()) throw ConfigError("lexicon: '" + pending_key + "' outside a section");
    if (pending_key == "entries") {
      lexicons.back().entries = std::move(items);
    } else if (pending_key == "liwc" || pending_key == "liwc_categories") {
      lexicons.back().liwc_categories = std::move(items);
    } else {
      throw ConfigError("lexicon: unknown key '" + pending_key + "'");
    }
    pending_key.clear();
    pending_value.clear();
  };
  auto depth = [](const std::string& s) {
    int d = 0;
    bool in_str = false, esc = false;
    for (char c : s) {
      if (in_str) {
        if (esc) esc = false;
        else if (c == '\\') esc = true;
        else if (c == '"') in_str = false;
      } else if (c == '"') {
        in_str = true;
      } else if (c == '[') {
        ++d;
      } else if (c == ']') {
        --d;
      }
    }
    return d;
  };

  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    // Strip comments outside strings.
    std::string line;
    bool in_str = false, esc = false;
    for (char c : raw) {
      if (in_str) {
        if (esc) esc = false;
        else if (c == '\\') esc = true;
        else if (c == '"') in_str = false;
      } else if (c == '"') {
        in_str = true;
      } else if (c == '#') {
        break;
      }
      line += c;
    }
    line = trim(line);
    if (!pending_key.empty()) {
      pending_value += " " + line;
      if (depth(pending_value) <= 0) flush();
      continue;
    }
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']' && line.find('"') == std::string::npos) {
      lexicons.push_back({parse_principle(line.substr(1, line.size() - 2)), {}, {}});
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("lexicon line " + std::to_string(line_no) + ": expected key = [...]");
    }
    pending_key = trim(line.substr(0, eq));
    pending_value = line.substr(eq + 1);
    if (depth(pending_value) <= 0) flush();
  }
  if (!pending_key.empty()) throw ConfigError("lexicon: unterminated array '" + pending_key + "'");
  return LexiconSet(std::move(lexicons));
}

LexiconSet load_lexicon(const std::filesystem::path& path) { return parse_lexicon(read_file(path)); }

nlohmann::ordered_json PrincipleProfile::to_json() const {
  nlohmann::ordered_json j;
  for (auto p : kAllPrinciples) {
    j[std::string(principle_name(p))] = {{"matches", count(p)}, {"score", score(p)}};
  }
  j["present"] = present;
  return j;
}

PrincipleProfile dps(std::string_view body, const LexiconSet& lexicons, double k) {
  if (!(k > 0)) throw ConfigError("saturation constant must be > 0");
  PrincipleProfile prof;
  const auto tokens = analysis_tokens(body);
  for (const auto& m : lexicons.find_matches(tokens)) {
    ++prof.matches[static_cast<std::size_t>(m.principle)];
    prof.matched_tokens += m.end - m.begin;
  }
  for (std::size_t i = 0; i < kPrincipleCount; ++i) {
    const auto m = static_cast<double>(prof.matches[i]);
    prof.scores[i] = m / (m + k);
    if (prof.matches[i] > 0) ++prof.present;
  }
  return prof;
}

std::array<double, kPrincipleCount + 1> principle_histogram(
    std::span<const PrincipleProfile> profiles) {
  if (profiles.empty()) throw ConfigError("principle_histogram needs at least one profile");
  std::array<double, kPrincipleCount + 1> out{};
  for (std::size_t j = 0; j <= kPrincipleCount; ++j) {
    std::size_t c = 0;
    for (const auto& p : profiles) c += p.present >= j ? 1 : 0;
    out[j] = static_cast<double>(c) / static_cast<double>(profiles.size());
  }
  return out;
}

namespace {

std::string most_frequent(const std::map<std::string, std::size_t>& counts) {
  std::string best;
  std::size_t best_n = 0;
  for (const auto& [gram, n] : counts) {
    if (n > best_n) {
      best = gram;
      best_n = n;
    }
  }
  return best;
}

}  // namespace

std::vector<ContextRow> match_contexts(std::span<const std::string> docs,
                                       const LexiconSet& lexicons, std::size_t window,
                                       std::size_t top_words) {
  if (window < 2) throw ConfigError("context window must be >= 2");
  const std::size_t span = window - 1;
  struct Stats {
    std::size_t frequency = 0;
    std::map<std::string, std::size_t> before, after;
  };
  std::array<std::map<std::string, Stats>, kPrincipleCount> stats;
  for (const auto& doc : docs) {
    const auto tokens = analysis_tokens(doc);
    for (const auto& m : lexicons.find_matches(tokens)) {
      auto& s = stats[static_cast<std::size_t>(m.principle)][m.entry];
      ++s.frequency;
      const std::size_t b0 = m.begin >= span ? m.begin - span : 0;
      if (b0 < m.begin) {
        ++s.before[join(std::span(tokens).subspan(b0, m.begin - b0), " ")];
      }
      const std::size_t a1 = std::min(tokens.size(), m.end + span);
      if (m.end < a1) {
        ++s.after[join(std::span(tokens).subspan(m.end, a1 - m.end), " ")];
      }
    }
  }
  std::vector<ContextRow> rows;
  for (auto p : kAllPrinciples) {
    const auto& per = stats[static_cast<std::size_t>(p)];
    std::vector<const std::pair<const std::string, Stats>*> ranked;
    for (const auto& kv : per) ranked.push_back(&kv);
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto* a, const auto* b) {
      return a->second.frequency > b->second.frequency;
    });
    if (ranked.size() > top_words) ranked.resize(top_words);
    for (const auto* kv : ranked) {
      rows.push_back({p, kv->first, kv->second.frequency, most_frequent(kv->second.before),
                      most_frequent(kv->second.after)});
    }
  }
  return rows;
}

std::string contexts_to_csv(std::span<const ContextRow> rows) {
  std::string out = "Principle,Matching,Context-before,Context-after\n";
  for (const auto& r : rows) {
    out += csv_escape(principle_name(r.principle)) + "," + csv_escape(r.match) + "," +
           csv_escape(r.before) + "," + csv_escape(r.after) + "\n";
  }
  return out;
}

}  // namespace phishevo::persuasion
