// Text-completion providers. The pipeline only ever sees the Provider
// interface; determinism for tests comes from the scripted and replay
// implementations, while HttpProvider talks to a real endpoint.
#pragma once

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

namespace vaprop {

struct ProviderError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProviderRequest {
  std::string prompt;
  std::string model;
  double temperature = 0.0;
  int max_tokens = 4096;
};

struct ProviderResult {
  std::string text;
  std::int64_t latency_ms = 0;
};

// One request/response pair, keyed by the prompt hash so a transcript can be
// replayed against the exact prompts that produced it.
struct ProviderExchange {
  std::string prompt_hash;
  std::string prompt;
  std::string response;
  std::int64_t latency_ms = 0;
  std::string provider;
  std::string model;
};

inline std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string prompt_hash(const std::string& prompt) {
  static const char* hex = "0123456789abcdef";
  std::uint64_t h = fnv1a64(prompt);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string id() const = 0;
  virtual ProviderResult complete(const ProviderRequest& req) = 0;
};

// Canned responses consumed in order, regardless of prompt content. Used to
// author fixture transcripts and to drive unit tests.
class ScriptedProvider : public Provider {
 public:
  explicit ScriptedProvider(std::vector<std::string> responses)
      : responses_(responses.begin(), responses.end()) {}

  std::string id() const override { return "scripted"; }

  ProviderResult complete(const ProviderRequest&) override {
    if (responses_.empty())
      throw ProviderError("scripted provider ran out of responses");
    ProviderResult r{std::move(responses_.front()), 0};
    responses_.pop_front();
    return r;
  }

  std::size_t remaining() const { return responses_.size(); }

 private:
  std::deque<std::string> responses_;
};

inline void save_transcript(const std::filesystem::path& file,
                            const std::vector<ProviderExchange>& exchanges) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["exchanges"] = nlohmann::ordered_json::array();
  for (const ProviderExchange& e : exchanges) {
    nlohmann::ordered_json entry;
    entry["prompt_hash"] = e.prompt_hash;
    entry["prompt"] = e.prompt;
    entry["response"] = e.response;
    entry["latency_ms"] = e.latency_ms;
    entry["provider"] = e.provider;
    entry["model"] = e.model;
    j["exchanges"].push_back(std::move(entry));
  }
  std::ofstream out(file);
  if (!out)
    throw ProviderError("transcript: cannot write " + file.string());
  out << j.dump(2) << "\n";
}

inline std::vector<ProviderExchange> load_transcript(
    const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ProviderError("transcript: cannot read " + file.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError("transcript: " + file.string() + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("exchanges") || !j["exchanges"].is_array())
    throw ProviderError("transcript: " + file.string() +
                        " has no exchanges array");
  std::vector<ProviderExchange> out;
  for (const auto& entry : j["exchanges"]) {
    ProviderExchange e;
    e.prompt_hash = entry.value("prompt_hash", "");
    e.prompt = entry.value("prompt", "");
    e.response = entry.value("response", "");
    e.latency_ms = entry.value("latency_ms", std::int64_t{0});
    e.provider = entry.value("provider", "");
    e.model = entry.value("model", "");
    if (e.prompt_hash.empty() && !e.prompt.empty())
      e.prompt_hash = prompt_hash(e.prompt);
    out.push_back(std::move(e));
  }
  return out;
}

// Replays a recorded transcript. Lookup is by prompt hash with FIFO order
// within a hash; a prompt the transcript never saw is an error, which is what
// makes replay runs honest regression tests.
class ReplayProvider : public Provider {
 public:
  explicit ReplayProvider(const std::vector<ProviderExchange>& exchanges) {
    for (const ProviderExchange& e : exchanges)
      queues_[e.prompt_hash].push_back(e);
  }

  static ReplayProvider from_file(const std::filesystem::path& file) {
    return ReplayProvider(load_transcript(file));
  }

  std::string id() const override { return "replay"; }

  ProviderResult complete(const ProviderRequest& req) override {
    std::string h = prompt_hash(req.prompt);
    auto it = queues_.find(h);
    if (it == queues_.end() || it->second.empty())
      throw ProviderError(
          "replay: no transcript entry for prompt hash " + h +
          " (the run diverged from the recording)");
    ProviderExchange e = std::move(it->second.front());
    it->second.pop_front();
    if (!e.prompt.empty() && e.prompt != req.prompt)
      throw ProviderError("replay: hash collision on " + h +
                          ", prompts differ");
    return {std::move(e.response), e.latency_ms};
  }

 private:
  std::map<std::string, std::deque<ProviderExchange>> queues_;
};

struct HttpProviderConfig {
  std::string host;  // scheme://host:port
  std::string path = "/v1/complete";
  std::string api_key;
  std::string model = "default";
  double temperature = 0.0;
  int max_tokens = 4096;
  int attempts = 3;
  int backoff_ms = 100;
};

// Declared here, defined in http_provider.hpp to keep the socket dependency
// out of translation units that never go over the wire.
class HttpProvider;

inline HttpProviderConfig http_config_from_env() {
  HttpProviderConfig cfg;
  if (const char* url = std::getenv("VAPROP_PROVIDER_URL")) cfg.host = url;
  if (const char* key = std::getenv("VAPROP_PROVIDER_KEY")) cfg.api_key = key;
  if (const char* model = std::getenv("VAPROP_PROVIDER_MODEL"))
    cfg.model = model;
  return cfg;
}

}  // namespace vaprop
