#include "attackqa/gateway/http.hpp"

#include <cstdlib>

#include <httplib.h>

#include "attackqa/common/jsonl.hpp"
#include "attackqa/gateway/chat.hpp"

namespace attackqa::gateway {

namespace {

std::string truncate_body(const std::string& body) {
    constexpr std::size_t kMax = 2000;
    return body.size() <= kMax ? body : body.substr(0, kMax) + "...";
}

}  // namespace

HttpBackend::HttpBackend(EndpointConfig cfg) : cfg_(std::move(cfg)) {
    const auto scheme_end = cfg_.base_url.find("://");
    const auto path_start = cfg_.base_url.find('/', scheme_end + 3);
    scheme_host_port_ = cfg_.base_url.substr(0, path_start);
    path_prefix_ = path_start == std::string::npos ? "" : cfg_.base_url.substr(path_start);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::bearer() {
    if (cfg_.api_key_env.empty()) return {};
    const char* value = std::getenv(cfg_.api_key_env.c_str());
    if (!value || !*value) {
        throw FatalError("credential environment variable " + cfg_.api_key_env +
                         " is not set (" + cfg_.role + " endpoint)");
    }
    return value;
}

std::string HttpBackend::post(const std::string& route, const std::string& body) {
    const auto key = bearer();
    httplib::Client client(scheme_host_port_);
    const auto secs = static_cast<time_t>(cfg_.timeout_s);
    const auto usecs = static_cast<time_t>((cfg_.timeout_s - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    httplib::Headers headers;
    if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);

    auto res = client.Post(path_prefix_ + route, headers, body, "application/json");
    if (!res) {
        throw TransientError("POST " + path_prefix_ + route + " failed: " +
                             httplib::to_string(res.error()));
    }
    if (res->status == 429 || res->status == 408 || res->status >= 500) {
        throw TransientError("HTTP " + std::to_string(res->status) + ": " +
                             truncate_body(res->body));
    }
    if (res->status < 200 || res->status >= 300) {
        throw FatalError("HTTP " + std::to_string(res->status) + ": " + truncate_body(res->body));
    }
    return res->body;
}

std::string HttpBackend::complete(const std::string& prompt) {
    json req;
    req["model"] = cfg_.model;
    req["temperature"] = cfg_.temperature;
    req["max_tokens"] = cfg_.max_tokens;
    const bool chat = cfg_.style == PromptStyle::Chat;
    if (chat) {
        req["messages"] = json::array();
        for (const auto& m : to_chat_messages(prompt)) {
            req["messages"].push_back({{"role", m.role}, {"content", m.content}});
        }
    } else {
        req["prompt"] = prompt;
    }
    const auto raw = post(chat ? "/chat/completions" : "/completions", req.dump());
    auto j = json::parse(raw, nullptr, false);
    try {
        if (j.is_discarded()) throw std::runtime_error("not JSON");
        const auto& choice = j.at("choices").at(0);
        return chat ? choice.at("message").at("content").get<std::string>()
                    : choice.at("text").get<std::string>();
    } catch (const std::exception&) {
        throw FatalError("unexpected completion response: " + truncate_body(raw));
    }
}

std::vector<Vector> HttpBackend::embed(const std::vector<std::string>& texts) {
    json req;
    req["model"] = cfg_.model;
    req["input"] = texts;
    const auto raw = post("/embeddings", req.dump());
    auto j = json::parse(raw, nullptr, false);
    try {
        if (j.is_discarded()) throw std::runtime_error("not JSON");
        const auto& data = j.at("data");
        std::vector<Vector> out(texts.size());
        std::vector<bool> filled(texts.size(), false);
        for (std::size_t i = 0; i < data.size(); ++i) {
            const auto idx = data[i].value("index", i);
            if (idx >= out.size() || filled[idx]) throw std::runtime_error("bad index");
            out[idx] = data[i].at("embedding").get<Vector>();
            filled[idx] = true;
        }
        for (bool f : filled) {
            if (!f) throw std::runtime_error("missing embedding");
        }
        return out;
    } catch (const std::exception&) {
        throw FatalError("unexpected embedding response: " + truncate_body(raw));
    }
}

}  // namespace attackqa::gateway
