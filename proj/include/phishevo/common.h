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

// Shared plumbing: error types, a portable seeded RNG, text helpers, hashing
// and small file utilities used by every module.

#ifndef PHISHEVO_COMMON_H_
#define PHISHEVO_COMMON_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace phishevo {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or precondition on user-provided parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An input artifact that a phase depends on does not exist.
class MissingArtifactError : public Error {
 public:
  MissingArtifactError(const std::filesystem::path& path, std::string_view what)
      : Error(std::string(what) + ": " + path.string()), path_(path) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Malformed input text (JSONL line, CSV row, lexicon section, verdict...).
class ParseError : public Error {
 public:
  using Error::Error;
};

// A remote or stub backend failed.
class BackendError : public Error {
 public:
  using Error::Error;
};

// Numerical failure during training (NaN loss).
class NumericError : public Error {
 public:
  using Error::Error;
};

// Seeded generator whose draws are identical on every platform: the engine
// is fully specified by the standard, and the distributions below are ours
// (std:: distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  // Uniform real in [0, 1).
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  double normal(double mean, double stddev);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Derives an independent seed for a sub-stream (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Whitespace-delimited tokens, no normalization.
std::vector<std::string> split_whitespace(std::string_view text);
std::size_t count_whitespace_tokens(std::string_view text);

// Lowercased word tokens with leading/trailing punctuation stripped; used by
// the lexical analyses (tf-idf, LDA, lexicons, detector input).
std::vector<std::string> analysis_tokens(std::string_view text);

std::string to_lower(std::string_view text);
std::string trim(std::string_view text);
std::string join(std::span<const std::string> parts, std::string_view sep);
std::vector<std::string> split(std::string_view text, char sep);

// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// Minimal RFC 4180 field handling for the CSV artifacts.
std::vector<std::string> parse_csv_line(std::string_view line);
std::string csv_escape(std::string_view field);

}  // namespace phishevo

#endif  // PHISHEVO_COMMON_H_
