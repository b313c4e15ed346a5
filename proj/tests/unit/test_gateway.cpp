#include <doctest.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "attackqa/gateway/chat.hpp"
#include "attackqa/gateway/client.hpp"
#include "attackqa/gateway/http.hpp"

using namespace attackqa;
using namespace attackqa::gateway;

namespace {

EndpointConfig mock_cfg(const std::string& role = "generator") {
    EndpointConfig cfg;
    cfg.role = role;
    cfg.base_url = "mock";
    cfg.backoff_ms = 0;
    return cfg;
}

double norm(const Vector& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Counts overlapping calls so the limiter can be observed from the backend side.
class SlowBackend final : public Backend {
public:
    std::string complete(const std::string& prompt) override {
        const int now = ++active_;
        int seen = peak_.load();
        while (now > seen && !peak_.compare_exchange_weak(seen, now)) {
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
        --active_;
        return prompt;
    }
    std::vector<Vector> embed(const std::vector<std::string>& texts) override {
        return std::vector<Vector>(texts.size(), Vector{1.0});
    }
    int peak() const { return peak_.load(); }

private:
    std::atomic<int> active_{0};
    std::atomic<int> peak_{0};
};

// OpenAI-compatible stand-in on an ephemeral local port.
class FakeServer {
public:
    FakeServer() {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            record(req);
            if (throttle_ > 0) {
                --throttle_;
                res.status = 429;
                res.set_content(R"({"error":"slow down"})", "application/json");
                return;
            }
            if (reject_) {
                res.status = 400;
                res.set_content(R"({"error":{"message":"context length exceeded"}})", "application/json");
                return;
            }
            json out{{"choices", {{{"message", {{"role", "assistant"}, {"content", "chat reply"}}}}}}};
            res.set_content(out.dump(), "application/json");
        });
        server_.Post("/v1/completions", [this](const httplib::Request& req, httplib::Response& res) {
            record(req);
            json out{{"choices", {{{"text", "plain reply"}}}}};
            res.set_content(out.dump(), "application/json");
        });
        server_.Post("/v1/embeddings", [this](const httplib::Request& req, httplib::Response& res) {
            record(req);
            const auto body = json::parse(req.body);
            json data = json::array();
            const auto n = body.at("input").size();
            for (std::size_t i = n; i-- > 0;) {  // out of order on purpose
                data.push_back({{"index", i}, {"embedding", {static_cast<double>(i), 1.0}}});
            }
            res.set_content(json{{"data", data}}.dump(), "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~FakeServer() {
        server_.stop();
        thread_.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

    void record(const httplib::Request& req) {
        std::lock_guard lock(mutex_);
        paths.push_back(req.path);
        bodies.push_back(req.body);
        auth.push_back(req.get_header_value("Authorization"));
    }

    std::vector<std::string> paths, bodies, auth;
    std::atomic<int> throttle_{0};
    std::atomic<bool> reject_{false};

private:
    httplib::Server server_;
    std::thread thread_;
    std::mutex mutex_;
    int port_ = 0;
};

EndpointConfig http_cfg(const FakeServer& s) {
    EndpointConfig cfg;
    cfg.role = "generator";
    cfg.base_url = s.url();
    cfg.model = "test-model";
    cfg.backoff_ms = 0;
    cfg.timeout_s = 5;
    return cfg;
}

}  // namespace

TEST_CASE("mock script returns scripted completions and the responder fills gaps") {
    MockScript script;
    script.add("hello", "scripted");
    auto backend = std::make_shared<MockBackend>(
        script, [](const std::string& p) -> std::optional<std::string> {
            if (p == "echo") return "echoed";
            return std::nullopt;
        },
        8);
    Client client(mock_cfg(), backend);
    CHECK(client.complete("hello").text == "scripted");
    CHECK(client.complete("echo").text == "echoed");
    CHECK_THROWS_AS(client.complete("unknown"), TransportError);
    CHECK(client.usage().failures == 1);
}

TEST_CASE("two transient failures then success takes three attempts") {
    MockScript script;
    script.add("p", "ok", 2);
    std::vector<int> sleeps;
    auto cfg = mock_cfg();
    cfg.max_retries = 3;
    cfg.backoff_ms = 10;
    Client client(cfg, std::make_shared<MockBackend>(script, Responder{}, 8),
                  [&](int ms) { sleeps.push_back(ms); });
    const auto c = client.complete("p");
    CHECK(c.text == "ok");
    CHECK(c.attempts == 3);
    const auto u = client.usage();
    CHECK(u.requests == 1);
    CHECK(u.attempts == 3);
    CHECK(u.retries == 2);
    CHECK(u.failures == 0);
    CHECK(sleeps == std::vector<int>{10, 20});
}

TEST_CASE("retries are bounded") {
    MockScript script;
    script.add("p", "ok", 5);
    auto cfg = mock_cfg();
    cfg.max_retries = 2;
    Client client(cfg, std::make_shared<MockBackend>(script, Responder{}, 8), [](int) {});
    try {
        client.complete("p");
        FAIL("expected TransportError");
    } catch (const TransportError& e) {
        CHECK(e.attempt_log.size() == 3);
    }
    CHECK(client.usage().attempts == 3);
    CHECK(client.usage().failures == 1);
}

TEST_CASE("mock embeddings are unit norm, deterministic and order preserving") {
    auto cfg = mock_cfg("embedder");
    cfg.dimension = 16;
    cfg.batch_size = 3;
    auto client = make_client(cfg);
    const std::vector<std::string> texts{"a", "b", "c", "d", "e", "a"};
    const auto v1 = client->embed(texts);
    const auto v2 = client->embed(texts);
    REQUIRE(v1.size() == texts.size());
    CHECK(v1 == v2);
    for (const auto& v : v1) {
        CHECK(v.size() == 16);
        CHECK(norm(v) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(v1[0] == v1[5]);
    CHECK(v1[0] != v1[1]);
    for (std::size_t i = 0; i < texts.size(); ++i) CHECK(v1[i] == pseudo_embedding(texts[i], 16));
    CHECK(client->usage().requests == 4);  // two calls of two batches
}

TEST_CASE("oracle embedding maps a question onto its target text") {
    MockBackend backend({}, {}, 12, {{"what is X?", "Document about X"}});
    const auto v = backend.embed({"what is X?", "Document about X", "other"});
    CHECK(v[0] == v[1]);
    CHECK(v[0] != v[2]);
}

TEST_CASE("in-flight limit holds under concurrent callers") {
    auto cfg = mock_cfg();
    cfg.max_in_flight = 2;
    auto backend = std::make_shared<SlowBackend>();
    Client client(cfg, backend);
    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i) {
        threads.emplace_back([&, i] {
            for (int j = 0; j < 4; ++j) client.complete(std::to_string(i * 10 + j));
        });
    }
    for (auto& t : threads) t.join();
    CHECK(backend->peak() <= 2);
    CHECK(client.usage().max_in_flight_observed <= 2);
    CHECK(client.usage().requests == 32);
}

TEST_CASE("to_chat_messages splits Llama 3 tags") {
    const std::string prompt =
        "<|begin_of_text|><|start_header_id|>system<|end_header_id|>\n  Be terse<|eot_id|>"
        "<|start_header_id|>user<|end_header_id|>\nQuestion here\n<|eot_id|>"
        "<|start_header_id|>machine-readable JSON<|end_header_id|>";
    const auto msgs = to_chat_messages(prompt);
    REQUIRE(msgs.size() == 2);
    CHECK(msgs[0] == ChatMessage{"system", "Be terse"});
    CHECK(msgs[1] == ChatMessage{"user", "Question here"});

    const auto plain = to_chat_messages("  just text ");
    REQUIRE(plain.size() == 1);
    CHECK(plain[0] == ChatMessage{"user", "just text"});
    CHECK(strip_special_tags("a<|eot_id|>b<|x") == "ab<|x");
}

TEST_CASE("config validation names the field") {
    EndpointConfig cfg;
    cfg.role = "judge";
    try {
        cfg.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field == "judge.base_url");
    }
    cfg.base_url = "ftp://x";
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.base_url = "http://x/v1";
    try {
        cfg.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field == "judge.model");
    }
    cfg.model = "m";
    cfg.max_in_flight = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("HTTP chat completion wire format and credential header") {
    FakeServer server;
    ::setenv("ATTACKQA_TEST_KEY", "sk-test-123", 1);
    auto cfg = http_cfg(server);
    cfg.api_key_env = "ATTACKQA_TEST_KEY";
    auto client = make_client(cfg);
    const auto c = client->complete(
        "<|start_header_id|>system<|end_header_id|>S<|eot_id|><|start_header_id|>user<|end_header_id|>U");
    CHECK(c.text == "chat reply");
    REQUIRE(server.paths.size() == 1);
    CHECK(server.paths[0] == "/v1/chat/completions");
    CHECK(server.auth[0] == "Bearer sk-test-123");
    const auto body = json::parse(server.bodies[0]);
    CHECK(body.at("model") == "test-model");
    CHECK(body.at("temperature") == 0.0);
    CHECK(body.at("messages") == json::parse(R"([{"role":"system","content":"S"},{"role":"user","content":"U"}])"));
    ::unsetenv("ATTACKQA_TEST_KEY");
}

TEST_CASE("HTTP completion style and embeddings") {
    FakeServer server;
    auto cfg = http_cfg(server);
    cfg.style = PromptStyle::Completion;
    cfg.batch_size = 2;
    auto client = make_client(cfg);
    CHECK(client->complete("raw prompt").text == "plain reply");
    CHECK(json::parse(server.bodies[0]).at("prompt") == "raw prompt");
    CHECK(server.auth[0].empty());

    const auto v = client->embed({"x", "y", "z"});
    REQUIRE(v.size() == 3);
    CHECK(v[0] == Vector{0.0, 1.0});
    CHECK(v[1] == Vector{1.0, 1.0});
    CHECK(v[2] == Vector{0.0, 1.0});  // second batch restarts its indices
    CHECK(server.paths.back() == "/v1/embeddings");
}

TEST_CASE("HTTP 429 is retried and 400 surfaces the body") {
    FakeServer server;
    auto cfg = http_cfg(server);
    cfg.max_retries = 3;
    auto client = make_client(cfg);
    server.throttle_ = 2;
    const auto c = client->complete("q");
    CHECK(c.text == "chat reply");
    CHECK(c.attempts == 3);
    CHECK(client->usage().retries == 2);

    server.reject_ = true;
    try {
        client->complete("q");
        FAIL("expected TransportError");
    } catch (const TransportError& e) {
        const std::string what = e.what();
        CHECK(what.find("HTTP 400") != std::string::npos);
        CHECK(what.find(R"({"error":{"message":"context length exceeded"}})") != std::string::npos);
        CHECK(e.attempt_log.size() == 1);
    }
}

TEST_CASE("missing credential variable fails without a request") {
    FakeServer server;
    ::unsetenv("ATTACKQA_TEST_MISSING_KEY");
    auto cfg = http_cfg(server);
    cfg.api_key_env = "ATTACKQA_TEST_MISSING_KEY";
    auto client = make_client(cfg);
    try {
        client->complete("q");
        FAIL("expected TransportError");
    } catch (const TransportError& e) {
        CHECK(std::string(e.what()).find("ATTACKQA_TEST_MISSING_KEY") != std::string::npos);
    }
    CHECK(server.paths.empty());
}

TEST_CASE("unreachable endpoint is a transient failure") {
    EndpointConfig cfg;
    cfg.role = "embedder";
    cfg.base_url = "http://127.0.0.1:1/v1";
    cfg.model = "m";
    cfg.max_retries = 1;
    cfg.backoff_ms = 0;
    cfg.timeout_s = 1;
    auto client = make_client(cfg);
    CHECK_THROWS_AS(client->embed({"x"}), TransportError);
    CHECK(client->usage().retries == 1);
}
