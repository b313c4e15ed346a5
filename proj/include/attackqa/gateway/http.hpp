#pragma once

#include <memory>
#include <mutex>
#include <string>

#include "attackqa/gateway/backend.hpp"
#include "attackqa/gateway/config.hpp"

namespace attackqa::gateway {

/// OpenAI-compatible endpoint: /chat/completions or /completions depending on
/// the prompt style, and /embeddings. base_url includes any version prefix,
/// e.g. "http://localhost:8000/v1". The API key is read from the configured
/// environment variable on first use.
class HttpBackend final : public Backend {
public:
    explicit HttpBackend(EndpointConfig cfg);
    ~HttpBackend() override;

    std::string complete(const std::string& prompt) override;
    std::vector<Vector> embed(const std::vector<std::string>& texts) override;

private:
    std::string post(const std::string& route, const std::string& body);
    std::string bearer();

    EndpointConfig cfg_;
    std::string scheme_host_port_;
    std::string path_prefix_;
};

}  // namespace attackqa::gateway
