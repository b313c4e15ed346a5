#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace attackqa::gateway {

/// Raised for invalid configuration; `field` is the dotted path of the offending key.
struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(std::string field_path, const std::string& message)
        : std::runtime_error(field_path + ": " + message), field(std::move(field_path)) {}
};

enum class PromptStyle { Chat, Completion };

struct EndpointConfig {
    std::string role;      // generator, grader, judge, embedder
    std::string base_url;  // "mock" selects the in-process backend
    std::string model;
    std::string api_key_env;  // name of the variable holding the key, never the key
    double timeout_s = 60.0;
    int max_retries = 3;
    std::size_t max_in_flight = 4;
    int backoff_ms = 250;
    double temperature = 0.0;
    int max_tokens = 1024;
    PromptStyle style = PromptStyle::Chat;
    std::size_t batch_size = 32;  // embedding inputs per request
    // Mock backend only.
    std::string mock_script;  // JSONL of {fingerprint|prompt, response, fail_times?}
    std::string oracle_file;  // JSONL of {text, target} or {question, document}
    std::size_t dimension = 64;

    bool is_mock() const { return base_url == "mock"; }
    /// Throws ConfigError with "<role>.<field>" paths.
    void validate() const;
};

std::string_view prompt_style_name(PromptStyle s) noexcept;
PromptStyle prompt_style_from_name(const std::string& name, const std::string& field_path);

}  // namespace attackqa::gateway
