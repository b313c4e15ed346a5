#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "attackqa/common/jsonl.hpp"
#include "attackqa/gateway/backend.hpp"
#include "attackqa/gateway/config.hpp"
#include "attackqa/gateway/mock.hpp"

namespace attackqa::gateway {

/// Raised once retries are exhausted or a non-retryable error occurs.
struct TransportError : std::runtime_error {
    std::vector<std::string> attempt_log;  // one line per failed attempt
    TransportError(const std::string& what, std::vector<std::string> log)
        : std::runtime_error(what), attempt_log(std::move(log)) {}
};

struct Usage {
    std::size_t requests = 0;   // complete/embed calls that reached the backend
    std::size_t attempts = 0;   // backend calls, retries included
    std::size_t retries = 0;
    std::size_t failures = 0;   // requests that ended in TransportError
    std::size_t prompt_chars = 0;
    std::size_t completion_chars = 0;
    std::size_t embedded_texts = 0;
    std::size_t max_in_flight_observed = 0;
    ordered_json to_json() const;
};

struct Completion {
    std::string text;
    int attempts = 1;
};

/// Retry, concurrency cap and usage accounting in front of a backend. Safe to
/// share across threads; the in-flight limiter is the only shared state
/// besides the counters.
class Client {
public:
    using SleepFn = std::function<void(int ms)>;

    Client(EndpointConfig cfg, std::shared_ptr<Backend> backend, SleepFn sleep = {});

    Completion complete(const std::string& prompt);
    /// One vector per text, in order, split into batch_size requests.
    std::vector<Vector> embed(const std::vector<std::string>& texts);

    Usage usage() const;
    const EndpointConfig& config() const { return cfg_; }

private:
    template <typename F>
    auto with_retries(const char* op, F&& call) -> decltype(call());

    void acquire();
    void release();

    EndpointConfig cfg_;
    std::shared_ptr<Backend> backend_;
    SleepFn sleep_;
    mutable std::mutex mutex_;
    std::condition_variable slot_free_;
    std::size_t in_flight_ = 0;
    Usage usage_;
};

/// Backend for a validated config: MockBackend (with `responder` and the
/// configured script/oracle files) when base_url is "mock", else HttpBackend.
std::shared_ptr<Client> make_client(const EndpointConfig& cfg, Responder responder = {});

}  // namespace attackqa::gateway
