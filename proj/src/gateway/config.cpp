#include "attackqa/gateway/config.hpp"

namespace attackqa::gateway {

void EndpointConfig::validate() const {
    const std::string p = role.empty() ? "endpoint" : role;
    if (base_url.empty()) throw ConfigError(p + ".base_url", "must be set (use \"mock\" for the mock backend)");
    if (!is_mock() && base_url.rfind("http://", 0) != 0 && base_url.rfind("https://", 0) != 0) {
        throw ConfigError(p + ".base_url", "must start with http:// or https://, or be \"mock\"");
    }
    if (!is_mock() && model.empty()) throw ConfigError(p + ".model", "must be set");
    if (!(timeout_s > 0)) throw ConfigError(p + ".timeout", "must be > 0");
    if (max_in_flight < 1) throw ConfigError(p + ".max_in_flight", "must be >= 1");
    if (max_retries < 0) throw ConfigError(p + ".max_retries", "must be >= 0");
    if (backoff_ms < 0) throw ConfigError(p + ".backoff_ms", "must be >= 0");
    if (temperature < 0) throw ConfigError(p + ".temperature", "must be >= 0");
    if (max_tokens < 1) throw ConfigError(p + ".max_tokens", "must be >= 1");
    if (batch_size < 1) throw ConfigError(p + ".batch_size", "must be >= 1");
    if (dimension < 1) throw ConfigError(p + ".dimension", "must be >= 1");
}

std::string_view prompt_style_name(PromptStyle s) noexcept {
    return s == PromptStyle::Chat ? "chat" : "completion";
}

PromptStyle prompt_style_from_name(const std::string& name, const std::string& field_path) {
    if (name == "chat") return PromptStyle::Chat;
    if (name == "completion") return PromptStyle::Completion;
    throw ConfigError(field_path, "must be \"chat\" or \"completion\", got \"" + name + "\"");
}

}  // namespace attackqa::gateway
