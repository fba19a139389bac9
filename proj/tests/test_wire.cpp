#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "absa/providers.hpp"
#include "absa/providers_wire.hpp"

using namespace absa;

namespace {

// In-process OpenAI-style endpoint bound to an ephemeral port.
class MockServer {
 public:
  MockServer() = default;
  ~MockServer() { stop(); }

  void start() {
    port_ = server.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  void stop() {
    if (thread_.joinable()) {
      server.stop();
      thread_.join();
    }
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

  httplib::Server server;

 private:
  int port_ = 0;
  std::thread thread_;
};

std::string chat_response(const std::string& content) {
  nlohmann::json res;
  res["choices"] = {{{"message", {{"role", "assistant"}, {"content", content}}}}};
  return res.dump();
}

ParsedSentence text_only(std::string id, std::string text) {
  ParsedSentence s;
  s.id = std::move(id);
  s.text = std::move(text);
  return s;
}

ProviderConfig fast_config(const std::string& endpoint) {
  ProviderConfig config;
  config.endpoint = endpoint;
  config.timeout_seconds = 5.0;
  config.retries = 2;
  config.backoff_base_seconds = 0.01;
  return config;
}

}  // namespace

TEST_CASE("wire backend round-trips a chat completion") {
  MockServer mock;
  mock.server.Post("/v1/chat/completions", [](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    REQUIRE(body.at("temperature").get<double>() == 0.0);
    REQUIRE(body.at("messages").at(0).at("role").get<std::string>() == "user");
    const auto prompt = body.at("messages").at(0).at("content").get<std::string>();
    REQUIRE(prompt.starts_with("Extract aspect terms"));
    res.set_content(chat_response("food"), "application/json");
  });
  mock.start();

  WireBackend backend(fast_config(mock.endpoint()));
  const auto result = annotate_ate({text_only("s1", "The food was fine.")}, backend, {});
  REQUIRE(result.corpus.size() == 1);
  REQUIRE(result.corpus[0].annotations.size() == 1);
  CHECK(result.corpus[0].annotations[0].term == "food");
  CHECK(backend.completion_calls() == 1);
}

TEST_CASE("wire backend sends the bearer key from the configured env var") {
  setenv("ABSA_TEST_KEY", "sekrit", 1);
  std::atomic<bool> saw_header{false};
  MockServer mock;
  mock.server.Post("/v1/chat/completions",
                   [&](const httplib::Request& req, httplib::Response& res) {
                     saw_header = req.get_header_value("Authorization") == "Bearer sekrit";
                     res.set_content(chat_response("none"), "application/json");
                   });
  mock.start();

  ProviderConfig config = fast_config(mock.endpoint());
  config.api_key_env = "ABSA_TEST_KEY";
  WireBackend backend(config);
  (void)annotate_ate({text_only("s1", "x")}, backend, {});
  CHECK(saw_header.load());
  unsetenv("ABSA_TEST_KEY");
}

TEST_CASE("results keep input order under concurrency with a shuffling server") {
  MockServer mock;
  std::atomic<int> hits{0};
  mock.server.Post("/v1/chat/completions",
                   [&](const httplib::Request& req, httplib::Response& res) {
                     const auto body = nlohmann::json::parse(req.body);
                     const auto prompt = body.at("messages").at(0).at("content").get<std::string>();
                     // Input text looks like "item<i> review"; answer with its
                     // first word after a per-request random delay.
                     const auto at = prompt.find("input: ") + 7;
                     const auto space = prompt.find(' ', at);
                     std::mt19937 rng(static_cast<unsigned>(hits.fetch_add(1)) * 2654435761u);
                     std::this_thread::sleep_for(
                         std::chrono::milliseconds(std::uniform_int_distribution<int>(0, 25)(rng)));
                     res.set_content(chat_response(prompt.substr(at, space - at)),
                                     "application/json");
                   });
  mock.start();

  std::vector<ParsedSentence> corpus;
  for (int i = 0; i < 24; ++i) {
    corpus.push_back(text_only("s" + std::to_string(i),
                               "item" + std::to_string(i) + " review text"));
  }
  ProviderConfig config = fast_config(mock.endpoint());
  config.max_in_flight = 6;
  WireBackend backend(config);
  const auto result = annotate_ate(corpus, backend, config);
  REQUIRE(result.corpus.size() == corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    REQUIRE(result.corpus[i].sentence.id == corpus[i].id);
    REQUIRE(result.corpus[i].annotations.size() == 1);
    CHECK(result.corpus[i].annotations[0].term == "item" + std::to_string(i));
  }
  CHECK(result.rejects.empty());
}

TEST_CASE("wire backend retries transient failures") {
  MockServer mock;
  std::atomic<int> attempts{0};
  mock.server.Post("/v1/chat/completions",
                   [&](const httplib::Request&, httplib::Response& res) {
                     if (attempts.fetch_add(1) < 2) {
                       res.status = attempts.load() == 1 ? 500 : 429;
                       return;
                     }
                     res.set_content(chat_response("none"), "application/json");
                   });
  mock.start();

  WireBackend backend(fast_config(mock.endpoint()));
  const auto result = annotate_ate({text_only("s1", "quiet")}, backend, {});
  CHECK(result.corpus.size() == 1);
  CHECK(attempts.load() == 3);
}

TEST_CASE("wire backend gives up after the retry budget, naming the sentence") {
  MockServer mock;
  mock.server.Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    res.status = 503;
  });
  mock.start();

  ProviderConfig config = fast_config(mock.endpoint());
  config.retries = 1;
  WireBackend backend(config);
  REQUIRE_THROWS_MATCHES(annotate_ate({text_only("s7", "x")}, backend, config), IoError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("s7") &&
                             Catch::Matchers::ContainsSubstring("2 attempts")));
}

TEST_CASE("wire backend does not retry non-transient HTTP errors") {
  MockServer mock;
  std::atomic<int> attempts{0};
  mock.server.Post("/v1/chat/completions",
                   [&](const httplib::Request&, httplib::Response& res) {
                     attempts.fetch_add(1);
                     res.status = 401;
                   });
  mock.start();

  WireBackend backend(fast_config(mock.endpoint()));
  REQUIRE_THROWS_AS(annotate_ate({text_only("s1", "x")}, backend, {}), IoError);
  CHECK(attempts.load() == 1);
}

TEST_CASE("wire backend reorders embedding responses by index") {
  MockServer mock;
  mock.server.Post("/v1/embeddings", [](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    const auto inputs = body.at("input").get<std::vector<std::string>>();
    nlohmann::json data = nlohmann::json::array();
    // Deliberately answer back to front.
    for (std::size_t i = inputs.size(); i-- > 0;) {
      data.push_back({{"index", i},
                      {"embedding", {static_cast<double>(inputs[i].size()), 1.0, 0.0}}});
    }
    res.set_content(nlohmann::json{{"data", data}}.dump(), "application/json");
  });
  mock.start();

  WireBackend backend(fast_config(mock.endpoint()));
  const auto vectors = embed({text_only("a", "x"), text_only("b", "xx"), text_only("c", "xxx")},
                             backend, {}, std::nullopt);
  REQUIRE(vectors.size() == 3);
  CHECK(vectors[0].values[0] == 1.0);
  CHECK(vectors[1].values[0] == 2.0);
  CHECK(vectors[2].values[0] == 3.0);
}

TEST_CASE("wire backend surfaces connection failures as IoError") {
  ProviderConfig config = fast_config("http://127.0.0.1:1");  // nothing listens here
  config.retries = 0;
  config.timeout_seconds = 0.5;
  WireBackend backend(config);
  REQUIRE_THROWS_AS(annotate_ate({text_only("s1", "x")}, backend, config), IoError);
}
