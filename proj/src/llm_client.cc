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

#include "phishevo/llm_client.h"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

#include "httplib.h"

namespace phishevo::llm {

std::string_view role_name(Role role) {
  switch (role) {
    case Role::kSystem: return "system";
    case Role::kUser: return "user";
    case Role::kAssistant: return "assistant";
  }
  return "user";
}

void ChatRequest::validate() const {
  if (messages.empty()) throw ConfigError("chat request has no messages");
  if (messages.front().role == Role::kAssistant) {
    throw ConfigError("first chat message must be from system or user");
  }
  if (!(temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
  if (max_tokens <= 0) throw ConfigError("max_tokens must be positive");
}

nlohmann::ordered_json ChatRequest::to_json() const {
  nlohmann::ordered_json j;
  j["model"] = model;
  auto msgs = nlohmann::ordered_json::array();
  for (const auto& m : messages) {
    msgs.push_back({{"role", role_name(m.role)}, {"content", m.content}});
  }
  j["messages"] = msgs;
  j["temperature"] = temperature;
  j["max_tokens"] = max_tokens;
  if (seed) j["seed"] = *seed;
  return j;
}

void BackendConfig::validate() const {
  if (endpoint.empty()) throw ConfigError("backend endpoint is empty");
  if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (max_parallel < 1) throw ConfigError("max_parallel must be >= 1");
  if (backoff_factor < 1.0) throw ConfigError("backoff_factor must be >= 1");
}

std::string parse_completion_body(std::string_view body) {
  nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) throw MalformedResponseError("completion body is not JSON");
  try {
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw MalformedResponseError("content is not a string");
    return content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw MalformedResponseError(std::string("unexpected completion shape: ") + e.what());
  }
}

namespace {

struct SplitEndpoint {
  std::string host;  // scheme://host[:port]
  std::string path;  // base path without trailing slash
};

SplitEndpoint split_endpoint(const std::string& endpoint) {
  auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint must start with http:// or https://: " + endpoint);
  }
  auto path_start = endpoint.find('/', scheme_end + 3);
  SplitEndpoint out;
  out.host = endpoint.substr(0, path_start);
  out.path = path_start == std::string::npos ? "" : endpoint.substr(path_start);
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

// Releases a semaphore slot on scope exit.
class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<>& sem) : sem_(sem) { sem_.acquire(); }
  ~SlotGuard() { sem_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<>& sem_;
};

}  // namespace

ChatClient::ChatClient(BackendConfig config)
    : config_(std::move(config)), in_flight_(std::max(1, config_.max_parallel)) {
  config_.validate();
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw ConfigError("environment variable " + config_.api_key_env + " is not set");
  }
  api_key_ = key;
  auto split = split_endpoint(config_.endpoint);
  host_ = split.host;
  path_ = split.path + "/chat/completions";
}

void ChatClient::audit(const ChatRequest& request, int status, std::string_view body) {
  if (!config_.audit_path) return;
  nlohmann::ordered_json j;
  j["model"] = request.model;
  j["status"] = status;
  j["response"] = std::string(body);
  std::lock_guard<std::mutex> lock(audit_mu_);
  std::ofstream out(*config_.audit_path, std::ios::app);
  out << j.dump() << "\n";
}

std::string ChatClient::complete(const ChatRequest& request) {
  request.validate();
  const std::string payload = request.to_json().dump();
  const httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
  const auto timeout_s = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto timeout_us = std::chrono::duration_cast<std::chrono::microseconds>(
                              config_.timeout - timeout_s)
                              .count();

  int last_status = -1;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    int status = -1;
    std::string body;
    {
      SlotGuard slot(in_flight_);
      ++attempts_;
      httplib::Client client(host_);
      client.set_connection_timeout(timeout_s.count(), timeout_us);
      client.set_read_timeout(timeout_s.count(), timeout_us);
      client.set_write_timeout(timeout_s.count(), timeout_us);
      auto res = client.Post(path_, headers, payload, "application/json");
      if (res) {
        status = res->status;
        body = res->body;
      }
    }
    audit(request, status, body);
    last_status = status;
    if (status >= 200 && status < 300) return parse_completion_body(body);
    if (status == 401 || status == 403) {
      throw AuthError("backend rejected credentials (HTTP " + std::to_string(status) + ")");
    }
    const bool transient = status < 0 || status == 408 || status == 429 || status >= 500;
    if (!transient) {
      throw BackendError("backend returned HTTP " + std::to_string(status));
    }
    if (attempt == config_.max_retries) break;
    double jitter;
    {
      std::lock_guard<std::mutex> lock(rng_mu_);
      jitter = jitter_rng_.uniform01() * config_.backoff_jitter;
    }
    const double delay_ms = static_cast<double>(config_.backoff_base.count()) *
                            std::pow(config_.backoff_factor, attempt) * (1.0 + jitter);
    std::this_thread::sleep_for(std::chrono::microseconds(static_cast<long long>(delay_ms * 1000)));
  }
  throw RetriesExhaustedError(last_status, "retries exhausted; last HTTP status " +
                                               std::to_string(last_status));
}

std::string chat_complete(const ChatRequest& request, const BackendConfig& config) {
  ChatClient client(config);
  return client.complete(request);
}

MarkovChain::MarkovChain(std::span<const std::string> bodies, std::size_t order)
    : order_(order) {
  if (order == 0) throw ConfigError("markov order must be >= 1");
  add(bodies, 1);
  if (total_tokens_ < order + 1 || starts_.empty()) {
    throw ConfigError("markov corpus has fewer tokens than order+1");
  }
}

void MarkovChain::add(std::span<const std::string> bodies, std::uint32_t weight) {
  for (const auto& body : bodies) {
    auto words = split_whitespace(body);
    total_tokens_ += words.size();
    if (words.size() < order_ + 1) continue;
    std::vector<std::string> start(words.begin(), words.begin() + static_cast<long>(order_));
    for (std::uint32_t w = 0; w < weight; ++w) starts_.push_back(start);
    for (std::size_t i = order_; i < words.size(); ++i) {
      std::vector<std::string> state(words.begin() + static_cast<long>(i - order_),
                                     words.begin() + static_cast<long>(i));
      transitions_[std::move(state)][words[i]] += weight;
    }
  }
}

std::string MarkovChain::sample(std::uint64_t seed, std::size_t length_target,
                                std::span<const std::string> boost,
                                std::uint32_t boost_factor) const {
  Rng rng(seed);
  std::set<std::string> boosted(boost.begin(), boost.end());
  std::vector<std::string> out = starts_[rng.uniform_index(starts_.size())];
  std::vector<std::string> state = out;
  while (out.size() < length_target) {
    auto it = transitions_.find(state);
    if (it == transitions_.end()) break;
    std::vector<std::pair<const std::string*, std::uint64_t>> weighted;
    std::uint64_t total = 0;
    for (const auto& [word, count] : it->second) {
      std::uint64_t w = count;
      if (!boosted.empty()) {
        auto norm = analysis_tokens(word);
        if (norm.size() == 1 && boosted.count(norm[0])) w *= boost_factor;
      }
      weighted.emplace_back(&word, w);
      total += w;
    }
    std::uint64_t r = rng.uniform_index(total);
    const std::string* next = weighted.back().first;
    for (const auto& [word, w] : weighted) {
      if (r < w) {
        next = word;
        break;
      }
      r -= w;
    }
    out.push_back(*next);
    state.erase(state.begin());
    state.push_back(*next);
  }
  if (out.size() > length_target) out.resize(length_target);
  return join(out, " ");
}

std::string stub_sample(std::span<const std::string> corpus_bodies, std::size_t order,
                        std::uint64_t seed, std::size_t length_target) {
  if (corpus_bodies.empty()) throw ConfigError("stub corpus is empty");
  MarkovChain chain(corpus_bodies, order);
  return chain.sample(seed, length_target);
}

MarkovStubGenerator::MarkovStubGenerator(std::vector<std::string> corpus_bodies,
                                         StubOptions options)
    : bodies_(std::move(corpus_bodies)), options_(options) {
  if (bodies_.empty()) throw ConfigError("stub generator needs a non-empty corpus");
}

std::vector<std::optional<std::string>> MarkovStubGenerator::generate(
    const prompt::RenderedPrompt& prompt, std::size_t n, std::uint64_t seed) {
  MarkovChain chain(bodies_, options_.order);
  if (!prompt.bundle.exemplars.empty()) {
    chain.add(prompt.bundle.exemplars, options_.exemplar_weight);
  }
  std::vector<std::optional<std::string>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.emplace_back(chain.sample(derive_seed(seed, i), options_.length_target,
                                  prompt.bundle.topics.keywords, options_.keyword_boost));
  }
  return out;
}

RemoteGenerator::RemoteGenerator(std::shared_ptr<CompletionBackend> backend,
                                 std::string model, double temperature, int max_tokens,
                                 int parallelism)
    : backend_(std::move(backend)),
      model_(std::move(model)),
      temperature_(temperature),
      max_tokens_(max_tokens),
      parallelism_(std::max(1, parallelism)) {}

std::vector<std::optional<std::string>> RemoteGenerator::generate(
    const prompt::RenderedPrompt& prompt, std::size_t n, std::uint64_t seed) {
  std::vector<std::optional<std::string>> out(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mu;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      ChatRequest req;
      req.model = model_;
      req.messages = {{Role::kSystem, prompt.system}, {Role::kUser, prompt.user}};
      req.temperature = temperature_;
      req.max_tokens = max_tokens_;
      req.seed = derive_seed(seed, i);
      try {
        out[i] = backend_->complete(req);
      } catch (const AuthError&) {
        std::lock_guard<std::mutex> lock(fatal_mu);
        if (!fatal) fatal = std::current_exception();
        next = n;
      } catch (const ConfigError&) {
        std::lock_guard<std::mutex> lock(fatal_mu);
        if (!fatal) fatal = std::current_exception();
        next = n;
      } catch (const Error&) {
        out[i] = std::nullopt;
      }
    }
  };
  std::vector<std::thread> threads;
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(parallelism_), n);
  for (std::size_t t = 0; t < workers; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (fatal) std::rethrow_exception(fatal);
  return out;
}

GenerationResult generate_candidates(const prompt::RenderedPrompt& prompt, std::size_t n,
                                     GeneratorBackend& backend, std::uint64_t seed,
                                     bool lenient) {
  if (n == 0) throw ConfigError("generate_candidates needs n >= 1");
  const std::string prompt_hash = prompt.hash();
  auto bodies = backend.generate(prompt, n, seed);
  GenerationResult result;
  for (std::size_t i = 0; i < n; ++i) {
    std::string body = i < bodies.size() && bodies[i] ? corpus::normalize_body(*bodies[i]) : "";
    if (body.empty()) {
      ++result.warnings;
      continue;
    }
    const std::string id =
        "g" + sha256_hex(prompt_hash + ":" + std::to_string(seed) + ":" + std::to_string(i))
                  .substr(0, 16);
    corpus::EmailRecord rec(id, "generated", prompt.bundle.label, std::move(body),
                            corpus::Origin::kGenerated);
    rec.mutable_meta()["backend"] = backend.name();
    rec.mutable_meta()["prompt_hash"] = prompt_hash;
    rec.mutable_meta()["topic"] = prompt.bundle.topics.topic;
    result.records.push_back(std::move(rec));
  }
  if (!lenient && result.warnings > 0) {
    throw BackendError(std::to_string(result.warnings) + " of " + std::to_string(n) +
                       " generations failed");
  }
  return result;
}

}  // namespace phishevo::llm
