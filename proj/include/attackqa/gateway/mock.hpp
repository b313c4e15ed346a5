#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "attackqa/gateway/backend.hpp"

namespace attackqa::gateway {

/// Key used to look up canned responses: fingerprint() of the full prompt.
std::string request_fingerprint(const std::string& prompt);

struct ScriptEntry {
    std::string response;
    int fail_times = 0;  // transient failures served before the response
};

struct MockScript {
    std::map<std::string, ScriptEntry> entries;  // fingerprint -> entry

    void add(const std::string& prompt, std::string response, int fail_times = 0);
    /// JSONL rows of {"fingerprint" or "prompt", "response", "fail_times"?}.
    static MockScript load(const std::filesystem::path& path);
};

/// Deterministic unit-norm vector seeded by a hash of `text`.
Vector pseudo_embedding(const std::string& text, std::size_t dimension);

/// Completion fallback consulted when the script has no entry. Returning
/// nullopt makes the request fail.
using Responder = std::function<std::optional<std::string>(const std::string& prompt)>;

/// In-process endpoint. Completions come from the script, then the responder.
/// Embeddings are pseudo-random unit vectors; texts listed in the oracle map
/// are embedded as their target text instead, so a question lands exactly on
/// its golden document.
class MockBackend final : public Backend {
public:
    MockBackend(MockScript script, Responder responder, std::size_t dimension,
                std::unordered_map<std::string, std::string> oracle = {});

    std::string complete(const std::string& prompt) override;
    std::vector<Vector> embed(const std::vector<std::string>& texts) override;

    /// Loads {text, target} or {question, document} rows.
    static std::unordered_map<std::string, std::string> load_oracle(
        const std::filesystem::path& path);

private:
    MockScript script_;
    Responder responder_;
    std::size_t dimension_;
    std::unordered_map<std::string, std::string> oracle_;
    std::mutex mutex_;
    std::map<std::string, int> served_failures_;
};

}  // namespace attackqa::gateway
