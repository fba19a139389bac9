#pragma once

// OpenAI-compatible wire backend: POST /chat/completions and /embeddings
// against a configurable base URL, bearer auth from an environment
// variable, bounded retries with exponential backoff. Safe for concurrent
// requests; every call uses its own connection.

#include <chrono>
#include <cstdlib>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "absa/error.hpp"
#include "absa/providers.hpp"

namespace absa {

class WireBackend : public Backend {
 public:
  explicit WireBackend(ProviderConfig config) : config_(std::move(config)) {
    config_.validate();
    split_endpoint(config_.endpoint, host_, path_prefix_);
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
      api_key_ = key;
    }
  }

  bool supports_concurrency() const override { return true; }

  std::string complete(const CompletionRequest& request) override {
    ++completion_calls_;
    nlohmann::json body;
    body["model"] = config_.model;
    body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}});
    body["temperature"] = 0;
    const nlohmann::json response =
        post_json("/chat/completions", body, "sentence id " + request.sentence_id);
    try {
      return response.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw IoError("malformed chat completion response for sentence id " + request.sentence_id +
                    ": " + e.what());
    }
  }

  std::vector<std::vector<double>> embed(const std::vector<std::string>& ids,
                                         const std::vector<std::string>& texts) override {
    ++embedding_calls_;
    nlohmann::json body;
    body["model"] = config_.model;
    body["input"] = texts;
    const std::string context =
        ids.empty() ? std::string("empty batch") : "sentence ids " + ids.front() + ".." + ids.back();
    const nlohmann::json response = post_json("/embeddings", body, context);
    try {
      std::vector<std::vector<double>> out(texts.size());
      std::vector<bool> seen(texts.size(), false);
      for (const auto& item : response.at("data")) {
        const auto index = item.at("index").get<std::size_t>();
        if (index >= out.size()) throw IoError("embedding response index out of range");
        out[index] = item.at("embedding").get<std::vector<double>>();
        seen[index] = true;
      }
      for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) {
          throw IoError("embedding response is missing a vector for input " + std::to_string(i) +
                        " (" + context + ")");
        }
      }
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw IoError("malformed embedding response (" + context + "): " + e.what());
    }
  }

 private:
  static void split_endpoint(const std::string& endpoint, std::string& host,
                             std::string& path_prefix) {
    const auto scheme = endpoint.find("://");
    const std::size_t host_begin = scheme == std::string::npos ? 0 : scheme + 3;
    const auto slash = endpoint.find('/', host_begin);
    if (slash == std::string::npos) {
      host = endpoint;
      path_prefix.clear();
    } else {
      host = endpoint.substr(0, slash);
      path_prefix = endpoint.substr(slash);
      while (!path_prefix.empty() && path_prefix.back() == '/') path_prefix.pop_back();
    }
  }

  nlohmann::json post_json(const std::string& route, const nlohmann::json& body,
                           const std::string& context) {
    const std::string payload = body.dump();
    std::string last_error;
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
      if (attempt > 0) {
        const auto delay = config_.backoff_base_seconds * static_cast<double>(1 << (attempt - 1));
        std::this_thread::sleep_for(std::chrono::duration<double>(delay));
      }
      httplib::Client client(host_);
      const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
      client.set_connection_timeout(timeout);
      client.set_read_timeout(timeout);
      client.set_write_timeout(timeout);
      httplib::Headers headers;
      if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
      const auto res = client.Post(path_prefix_ + route, headers, payload, "application/json");
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status < 200 || res->status >= 300) {
        throw IoError("request to " + route + " failed with HTTP " + std::to_string(res->status) +
                      " (" + context + ")");
      }
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::parse_error& e) {
        throw IoError("request to " + route + " returned unparseable JSON (" + context +
                      "): " + e.what());
      }
    }
    throw IoError("request to " + route + " failed after " + std::to_string(config_.retries + 1) +
                  " attempts (" + context + "): " + last_error);
  }

  ProviderConfig config_;
  std::string host_;
  std::string path_prefix_;
  std::string api_key_;
};

}  // namespace absa
