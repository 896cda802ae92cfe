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

// Lexicon-based detection of persuasion principles.

#ifndef PHISHEVO_PERSUASION_H_
#define PHISHEVO_PERSUASION_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace phishevo::persuasion {

enum class Principle { kAuthority, kReciprocity, kScarcity, kLiking, kSocialProof, kConsistency };

inline constexpr std::size_t kPrincipleCount = 6;
inline constexpr std::array<Principle, kPrincipleCount> kAllPrinciples = {
    Principle::kAuthority, Principle::kReciprocity, Principle::kScarcity,
    Principle::kLiking,    Principle::kSocialProof, Principle::kConsistency};

std::string_view principle_name(Principle p);  // "Authority", ..., "SocialProof"
// Accepts the names above, case-insensitively, plus "Social Proof".
Principle parse_principle(std::string_view name);

struct PrincipleLexicon {
  Principle principle;
  std::vector<std::string> entries;  // lowercase words or phrases
  std::vector<std::string> liwc_categories;
};

class LexiconSet {
 public:
  // Requires all six principles, each with entries, and no entry shared by
  // two principles.
  explicit LexiconSet(std::vector<PrincipleLexicon> lexicons);

  const PrincipleLexicon& lexicon(Principle p) const;
  const std::vector<PrincipleLexicon>& lexicons() const { return lexicons_; }
  std::vector<std::string> all_entries() const;

  struct Match {
    Principle principle;
    std::size_t begin;  // token offsets into the analysis tokens
    std::size_t end;
    std::string entry;
  };
  // Left to right; at each position the longest entry wins and matches do
  // not overlap.
  std::vector<Match> find_matches(std::span<const std::string> tokens) const;

 private:
  struct Phrase {
    std::vector<std::string> tokens;
    Principle principle;
    std::string entry;
  };
  std::vector<PrincipleLexicon> lexicons_;
  std::map<std::string, std::vector<Phrase>> by_first_;  // longest first
};

// Sections "[Authority]" holding `entries = ["...", ...]` and optionally
// `liwc = [...]`; '#' starts a comment and arrays may span lines.
LexiconSet parse_lexicon(std::string_view text);
LexiconSet load_lexicon(const std::filesystem::path& path);

inline constexpr double kDefaultSaturation = 3.0;

struct PrincipleProfile {
  std::array<std::size_t, kPrincipleCount> matches{};
  std::array<double, kPrincipleCount> scores{};
  std::size_t present = 0;
  std::size_t matched_tokens = 0;

  std::size_t count(Principle p) const { return matches[static_cast<std::size_t>(p)]; }
  double score(Principle p) const { return scores[static_cast<std::size_t>(p)]; }
  nlohmann::ordered_json to_json() const;
};

// score = m / (m + k)
PrincipleProfile dps(std::string_view body, const LexiconSet& lexicons,
                     double k = kDefaultSaturation);

// Entry j is the fraction of profiles with at least j principles present.
std::array<double, kPrincipleCount + 1> principle_histogram(
    std::span<const PrincipleProfile> profiles);

struct ContextRow {
  Principle principle;
  std::string match;
  std::size_t frequency = 0;
  std::string before;  // up to window-1 preceding words
  std::string after;
};

// Per principle, the top_words most frequent matches (ties alphabetical)
// with their most frequent preceding and following grams.
std::vector<ContextRow> match_contexts(std::span<const std::string> docs,
                                       const LexiconSet& lexicons, std::size_t window = 3,
                                       std::size_t top_words = 6);

// Columns: Principle, Matching, Context-before, Context-after.
std::string contexts_to_csv(std::span<const ContextRow> rows);

}  // namespace phishevo::persuasion

#endif  // PHISHEVO_PERSUASION_H_
