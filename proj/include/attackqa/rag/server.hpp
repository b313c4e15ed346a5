#pragma once

#include <memory>
#include <optional>
#include <string>

#include "attackqa/gateway/client.hpp"
#include "attackqa/rag/service.hpp"
#include "attackqa/retrieval/index.hpp"

namespace httplib {
class Server;
}

namespace attackqa {

struct ServerOptions {
    std::size_t default_k = kDefaultK;
    std::size_t max_k = 50;
    std::optional<std::string> bearer_token;  // required on /api/ask and /api/doc when set
    std::optional<std::filesystem::path> interaction_log;
};

/// HTTP front end:
///   POST /api/ask {question, k?} -> {answer, thought, references, refusal, retrieved, ...}
///   GET  /api/health             -> {status, index_fingerprint, models}
///   GET  /api/doc/<doc_id>       -> the document
/// Generation or retrieval transport failures answer 502 with the record as body;
/// unparseable completions answer 200 with parse_ok false and an error field.
class RagServer {
public:
    RagServer(const VectorIndex& index, gateway::Client& embedder, gateway::Client& generator,
              ServerOptions options = {});
    ~RagServer();
    RagServer(const RagServer&) = delete;
    RagServer& operator=(const RagServer&) = delete;

    /// Binds and returns the port (an ephemeral one when `port` is 0). Throws on failure.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    void listen();
    void stop();

private:
    void routes();

    const VectorIndex& index_;
    gateway::Client& embedder_;
    gateway::Client& generator_;
    ServerOptions options_;
    std::unique_ptr<InteractionLog> log_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace attackqa
