#include "attackqa/gateway/client.hpp"

#include <chrono>
#include <thread>

#include "attackqa/gateway/http.hpp"

namespace attackqa::gateway {

ordered_json Usage::to_json() const {
    ordered_json j;
    j["requests"] = requests;
    j["attempts"] = attempts;
    j["retries"] = retries;
    j["failures"] = failures;
    j["prompt_chars"] = prompt_chars;
    j["completion_chars"] = completion_chars;
    j["embedded_texts"] = embedded_texts;
    j["max_in_flight_observed"] = max_in_flight_observed;
    return j;
}

Client::Client(EndpointConfig cfg, std::shared_ptr<Backend> backend, SleepFn sleep)
    : cfg_(std::move(cfg)), backend_(std::move(backend)), sleep_(std::move(sleep)) {
    if (!sleep_) {
        sleep_ = [](int ms) { std::this_thread::sleep_for(std::chrono::milliseconds(ms)); };
    }
}

void Client::acquire() {
    std::unique_lock lock(mutex_);
    slot_free_.wait(lock, [&] { return in_flight_ < cfg_.max_in_flight; });
    ++in_flight_;
    ++usage_.attempts;
    if (in_flight_ > usage_.max_in_flight_observed) usage_.max_in_flight_observed = in_flight_;
}

void Client::release() {
    {
        std::lock_guard lock(mutex_);
        --in_flight_;
    }
    slot_free_.notify_one();
}

template <typename F>
auto Client::with_retries(const char* op, F&& call) -> decltype(call()) {
    {
        std::lock_guard lock(mutex_);
        ++usage_.requests;
    }
    std::vector<std::string> log;
    const int max_attempts = cfg_.max_retries + 1;
    for (int attempt = 1;; ++attempt) {
        acquire();
        try {
            auto result = call();
            release();
            return result;
        } catch (const TransientError& e) {
            release();
            log.push_back("attempt " + std::to_string(attempt) + ": " + e.what());
            if (attempt >= max_attempts) break;
            {
                std::lock_guard lock(mutex_);
                ++usage_.retries;
            }
            sleep_(cfg_.backoff_ms << (attempt - 1));
        } catch (const FatalError& e) {
            release();
            log.push_back("attempt " + std::to_string(attempt) + ": " + e.what());
            std::lock_guard lock(mutex_);
            ++usage_.failures;
            const auto message =
                std::string(op) + " on " + cfg_.role + " endpoint failed: " + e.what();
            throw TransportError(message, std::move(log));
        }
    }
    std::lock_guard lock(mutex_);
    ++usage_.failures;
    const auto message = std::string(op) + " on " + cfg_.role + " endpoint failed after " +
                         std::to_string(max_attempts) + " attempts: " + log.back();
    throw TransportError(message, std::move(log));
}

Completion Client::complete(const std::string& prompt) {
    int attempts = 0;
    auto text = with_retries("completion", [&] {
        ++attempts;
        return backend_->complete(prompt);
    });
    std::lock_guard lock(mutex_);
    usage_.prompt_chars += prompt.size();
    usage_.completion_chars += text.size();
    return Completion{std::move(text), attempts};
}

std::vector<Vector> Client::embed(const std::vector<std::string>& texts) {
    std::vector<Vector> out;
    out.reserve(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += cfg_.batch_size) {
        const auto end = std::min(texts.size(), start + cfg_.batch_size);
        std::vector<std::string> batch(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                       texts.begin() + static_cast<std::ptrdiff_t>(end));
        auto vectors = with_retries("embedding", [&] { return backend_->embed(batch); });
        if (vectors.size() != batch.size()) {
            throw TransportError("embedding on " + cfg_.role + " endpoint returned " +
                                     std::to_string(vectors.size()) + " vectors for " +
                                     std::to_string(batch.size()) + " inputs",
                                 {});
        }
        for (auto& v : vectors) out.push_back(std::move(v));
    }
    std::lock_guard lock(mutex_);
    usage_.embedded_texts += texts.size();
    return out;
}

Usage Client::usage() const {
    std::lock_guard lock(mutex_);
    return usage_;
}

std::shared_ptr<Client> make_client(const EndpointConfig& cfg, Responder responder) {
    cfg.validate();
    std::shared_ptr<Backend> backend;
    if (cfg.is_mock()) {
        auto script = cfg.mock_script.empty() ? MockScript{} : MockScript::load(cfg.mock_script);
        auto oracle = cfg.oracle_file.empty()
                          ? std::unordered_map<std::string, std::string>{}
                          : MockBackend::load_oracle(cfg.oracle_file);
        backend = std::make_shared<MockBackend>(std::move(script), std::move(responder),
                                                cfg.dimension, std::move(oracle));
    } else {
        backend = std::make_shared<HttpBackend>(cfg);
    }
    return std::make_shared<Client>(cfg, std::move(backend));
}

}  // namespace attackqa::gateway
