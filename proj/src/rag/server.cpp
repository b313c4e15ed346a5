#include "attackqa/rag/server.hpp"

#include <httplib.h>

namespace attackqa {

namespace {

void send_json(httplib::Response& res, int status, const ordered_json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    ordered_json body;
    body["error"] = message;
    send_json(res, status, body);
}

}  // namespace

RagServer::RagServer(const VectorIndex& index, gateway::Client& embedder,
                     gateway::Client& generator, ServerOptions options)
    : index_(index),
      embedder_(embedder),
      generator_(generator),
      options_(std::move(options)),
      server_(std::make_unique<httplib::Server>()) {
    if (options_.interaction_log) {
        log_ = std::make_unique<InteractionLog>(*options_.interaction_log);
    }
    routes();
}

RagServer::~RagServer() { stop(); }

int RagServer::bind(const std::string& host, int port) {
    const int bound = port == 0 ? server_->bind_to_any_port(host)
                                : (server_->bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    return bound;
}

void RagServer::listen() { server_->listen_after_bind(); }

void RagServer::stop() {
    if (server_) server_->stop();
}

void RagServer::routes() {
    auto authorized = [this](const httplib::Request& req, httplib::Response& res) {
        if (!options_.bearer_token) return true;
        if (req.get_header_value("Authorization") == "Bearer " + *options_.bearer_token) {
            return true;
        }
        send_error(res, 401, "missing or invalid bearer token");
        return false;
    };

    server_->set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                  {"Access-Control-Allow-Headers", "Authorization, Content-Type"},
                                  {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server_->set_exception_handler(
        [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            std::string what = "internal error";
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                what = e.what();
            } catch (...) {
            }
            send_error(res, 500, what);
        });
    server_->Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.status = 204;
    });

    server_->Get("/api/health", [this](const httplib::Request&, httplib::Response& res) {
        ordered_json body;
        body["status"] = "ok";
        body["index_fingerprint"] = index_.fingerprint();
        body["documents"] = index_.size();
        body["models"] = {{"embedder", embedder_.config().model},
                          {"generator", generator_.config().model}};
        send_json(res, 200, body);
    });

    server_->Get(R"(/api/doc/([^/]+))",
                 [this, authorized](const httplib::Request& req, httplib::Response& res) {
                     if (!authorized(req, res)) return;
                     const auto id = req.matches[1].str();
                     auto at = index_.find(id);
                     if (!at) return send_error(res, 404, "unknown doc_id " + id);
                     auto body = to_json(index_.doc(*at));
                     body["text"] = index_.doc(*at).text();
                     send_json(res, 200, body);
                 });

    server_->Post("/api/ask", [this, authorized](const httplib::Request& req,
                                                 httplib::Response& res) {
        if (!authorized(req, res)) return;
        auto body = json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.is_object()) {
            return send_error(res, 400, "request body must be a JSON object");
        }
        auto q = body.find("question");
        if (q == body.end() || !q->is_string() || q->get<std::string>().empty()) {
            return send_error(res, 400, "\"question\" must be a non-empty string");
        }
        std::size_t k = options_.default_k;
        if (auto kj = body.find("k"); kj != body.end() && !kj->is_null()) {
            if (!kj->is_number_integer() || kj->get<long long>() < 1 ||
                kj->get<long long>() > static_cast<long long>(options_.max_k)) {
                return send_error(res, 400,
                                  "\"k\" must be an integer from 1 to " +
                                      std::to_string(options_.max_k));
            }
            k = kj->get<std::size_t>();
        }
        const auto record =
            answer_question(q->get<std::string>(), k, index_, embedder_, generator_);
        auto out = record.to_json(index_);
        if (log_) {
            ordered_json row = out;
            row["k"] = k;
            row["completion"] = record.completion;
            log_->append(row);
        }
        send_json(res, record.transport_failure ? 502 : 200, out);
    });
}

}  // namespace attackqa
