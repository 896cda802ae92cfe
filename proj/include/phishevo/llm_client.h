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

// Text completion backends. ChatClient speaks the common
// `POST <endpoint>/chat/completions` JSON protocol; MarkovStubGenerator is an
// offline, seeded stand-in for the generator model.

#ifndef PHISHEVO_LLM_CLIENT_H_
#define PHISHEVO_LLM_CLIENT_H_

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "phishevo/common.h"
#include "phishevo/corpus.h"
#include "phishevo/prompt.h"

namespace phishevo::llm {

enum class Role { kSystem, kUser, kAssistant };
std::string_view role_name(Role role);

struct ChatMessage {
  Role role;
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.7;
  int max_tokens = 512;
  std::optional<std::uint64_t> seed;

  // Throws ConfigError when messages are empty, the first message is from the
  // assistant, or temperature/max_tokens are out of range.
  void validate() const;
  nlohmann::ordered_json to_json() const;
};

struct BackendConfig {
  std::string endpoint;  // e.g. http://localhost:8000/v1
  std::string api_key_env = "PHISHEVO_API_KEY";
  std::chrono::milliseconds timeout{60000};
  int max_retries = 3;
  int max_parallel = 4;
  std::chrono::milliseconds backoff_base{1000};
  double backoff_factor = 2.0;
  // Extra random delay as a fraction of each backoff step.
  double backoff_jitter = 0.1;
  std::optional<std::filesystem::path> audit_path;

  void validate() const;
};

class AuthError : public BackendError {
 public:
  using BackendError::BackendError;
};

class RetriesExhaustedError : public BackendError {
 public:
  RetriesExhaustedError(int last_status, const std::string& what)
      : BackendError(what), last_status_(last_status) {}
  int last_status() const { return last_status_; }

 private:
  int last_status_;
};

class MalformedResponseError : public BackendError {
 public:
  using BackendError::BackendError;
};

// Anything that turns a chat request into completion text.
class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
  virtual std::string name() const = 0;
};

// Thread-safe HTTP client. At most `max_parallel` requests are in flight.
class ChatClient final : public CompletionBackend {
 public:
  // Reads the API key from the environment; throws ConfigError if unset.
  explicit ChatClient(BackendConfig config);

  std::string complete(const ChatRequest& request) override;
  std::string name() const override { return "chat:" + config_.endpoint; }

  // Number of HTTP attempts issued so far (including retries).
  std::size_t attempts() const { return attempts_.load(); }

 private:
  void audit(const ChatRequest& request, int status, std::string_view body);

  BackendConfig config_;
  std::string api_key_;
  std::string host_;
  std::string path_;
  std::counting_semaphore<> in_flight_;
  std::atomic<std::size_t> attempts_{0};
  std::mutex audit_mu_;
  std::mutex rng_mu_;
  Rng jitter_rng_{0x5eed};
};

// Extracts choices[0].message.content; throws MalformedResponseError.
std::string parse_completion_body(std::string_view body);

// chat_complete as a free function over a fresh client.
std::string chat_complete(const ChatRequest& request, const BackendConfig& config);

// Word-level Markov chain of a fixed order, fit on whitespace tokens.
class MarkovChain {
 public:
  // Throws ConfigError when order == 0 or the corpus has fewer than order+1
  // tokens in total.
  MarkovChain(std::span<const std::string> bodies, std::size_t order);

  // Adds documents with an integer weight applied to every transition count.
  void add(std::span<const std::string> bodies, std::uint32_t weight);

  // Walk from a seeded start state until `length_target` words or a state
  // with no successors. `boost` multiplies the weight of listed successors.
  std::string sample(std::uint64_t seed, std::size_t length_target,
                     std::span<const std::string> boost = {},
                     std::uint32_t boost_factor = 1) const;

  std::size_t order() const { return order_; }
  std::size_t state_count() const { return transitions_.size(); }

 private:
  std::size_t order_;
  std::size_t total_tokens_ = 0;
  std::vector<std::vector<std::string>> starts_;
  std::map<std::vector<std::string>, std::map<std::string, std::uint64_t>> transitions_;
};

// Fit an order-`order` chain on the corpus and sample one text.
std::string stub_sample(std::span<const std::string> corpus_bodies, std::size_t order,
                        std::uint64_t seed, std::size_t length_target);

// Produces email bodies for a rendered prompt.
class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;
  virtual std::string name() const = 0;
  // Returns up to n bodies; a failed slot is reported as std::nullopt.
  virtual std::vector<std::optional<std::string>> generate(const prompt::RenderedPrompt& prompt,
                                                           std::size_t n,
                                                           std::uint64_t seed) = 0;
};

struct StubOptions {
  std::size_t order = 2;
  std::size_t length_target = 120;
  std::uint32_t exemplar_weight = 2;
  std::uint32_t keyword_boost = 3;
};

// Offline generator: a Markov chain fit on the real corpus, refit per prompt
// with the prompt's exemplars added at `exemplar_weight`.
class MarkovStubGenerator final : public GeneratorBackend {
 public:
  MarkovStubGenerator(std::vector<std::string> corpus_bodies, StubOptions options = {});
  std::string name() const override { return "markov-stub"; }
  std::vector<std::optional<std::string>> generate(const prompt::RenderedPrompt& prompt,
                                                   std::size_t n, std::uint64_t seed) override;

 private:
  std::vector<std::string> bodies_;
  StubOptions options_;
};

// Generator over a chat backend; one request per sample, issued concurrently
// up to `parallelism` threads.
class RemoteGenerator final : public GeneratorBackend {
 public:
  RemoteGenerator(std::shared_ptr<CompletionBackend> backend, std::string model,
                  double temperature = 0.9, int max_tokens = 512, int parallelism = 4);
  std::string name() const override { return backend_->name(); }
  std::vector<std::optional<std::string>> generate(const prompt::RenderedPrompt& prompt,
                                                   std::size_t n, std::uint64_t seed) override;

 private:
  std::shared_ptr<CompletionBackend> backend_;
  std::string model_;
  double temperature_;
  int max_tokens_;
  int parallelism_;
};

struct GenerationResult {
  corpus::Corpus records;
  std::size_t warnings = 0;
};

// n records with origin=generated and the prompt's label. Strict mode throws
// unless all n succeed; lenient mode drops failures and counts them.
GenerationResult generate_candidates(const prompt::RenderedPrompt& prompt, std::size_t n,
                                     GeneratorBackend& backend, std::uint64_t seed,
                                     bool lenient = false);

}  // namespace phishevo::llm

#endif  // PHISHEVO_LLM_CLIENT_H_
