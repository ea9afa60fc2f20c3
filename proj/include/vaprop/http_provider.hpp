// HTTP-backed provider. Kept in its own header because httplib pulls in the
// socket stack; only the CLI and the provider tests need it.
#pragma once

#include <chrono>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "vaprop/provider.hpp"

namespace vaprop {

// POSTs {model, prompt, temperature, max_tokens} and expects {"text": ...}
// back. Transient failures (connect errors, 5xx) retry with exponential
// backoff; anything else is surfaced immediately. The api key travels only in
// the Authorization header and is never echoed into errors or reports.
class HttpProvider : public Provider {
 public:
  explicit HttpProvider(HttpProviderConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.host.empty())
      throw ProviderError("http provider: no endpoint configured");
  }

  std::string id() const override { return "http"; }

  ProviderResult complete(const ProviderRequest& req) override {
    nlohmann::json body;
    body["model"] = req.model.empty() ? cfg_.model : req.model;
    body["prompt"] = req.prompt;
    body["temperature"] =
        req.temperature != 0.0 ? req.temperature : cfg_.temperature;
    body["max_tokens"] = req.max_tokens > 0 ? req.max_tokens : cfg_.max_tokens;
    std::string payload = body.dump();

    httplib::Headers headers;
    if (!cfg_.api_key.empty())
      headers.emplace("Authorization", "Bearer " + cfg_.api_key);

    std::string last_error = "no attempts made";
    int delay = cfg_.backoff_ms;
    for (int attempt = 0; attempt < cfg_.attempts; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        delay *= 2;
      }
      auto start = std::chrono::steady_clock::now();
      httplib::Client client(cfg_.host);
      client.set_connection_timeout(10);
      client.set_read_timeout(60);
      httplib::Result res =
          client.Post(cfg_.path, headers, payload, "application/json");
      auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
      if (!res) {
        last_error = "connection failed (" + httplib::to_string(res.error()) + ")";
        continue;
      }
      if (res->status >= 500) {
        last_error = "server returned " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200)
        throw ProviderError("http provider: endpoint returned " +
                            std::to_string(res->status));
      nlohmann::json reply;
      try {
        reply = nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::exception&) {
        throw ProviderError("http provider: response is not JSON");
      }
      std::string text;
      if (reply.contains("text") && reply["text"].is_string())
        text = reply["text"].get<std::string>();
      else if (reply.contains("completion") && reply["completion"].is_string())
        text = reply["completion"].get<std::string>();
      else
        throw ProviderError("http provider: response has no text field");
      return {std::move(text), elapsed};
    }
    throw ProviderError("http provider: " + last_error + " after " +
                        std::to_string(cfg_.attempts) + " attempt(s)");
  }

 private:
  HttpProviderConfig cfg_;
};

}  // namespace vaprop
