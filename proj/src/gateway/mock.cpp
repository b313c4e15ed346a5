#include "attackqa/gateway/mock.hpp"

#include <cmath>

#include "attackqa/common/hash.hpp"
#include "attackqa/common/jsonl.hpp"
#include "attackqa/common/rng.hpp"

namespace attackqa::gateway {

std::string request_fingerprint(const std::string& prompt) { return fingerprint(prompt); }

void MockScript::add(const std::string& prompt, std::string response, int fail_times) {
    entries[request_fingerprint(prompt)] = ScriptEntry{std::move(response), fail_times};
}

MockScript MockScript::load(const std::filesystem::path& path) {
    MockScript script;
    for (const auto& row : read_jsonl(path)) {
        std::string key;
        if (row.contains("fingerprint")) {
            key = row.at("fingerprint").get<std::string>();
        } else if (row.contains("prompt")) {
            key = request_fingerprint(row.at("prompt").get<std::string>());
        } else {
            throw IoError(path.string() + ": script row needs \"fingerprint\" or \"prompt\"");
        }
        script.entries[key] =
            ScriptEntry{row.at("response").get<std::string>(), row.value("fail_times", 0)};
    }
    return script;
}

Vector pseudo_embedding(const std::string& text, std::size_t dimension) {
    DetRng rng(fnv1a64(text));
    Vector v(dimension);
    double norm2 = 0.0;
    for (auto& x : v) {
        x = rng.unit() * 2.0 - 1.0;
        norm2 += x * x;
    }
    if (norm2 == 0.0) {
        v[0] = 1.0;
        return v;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& x : v) x *= inv;
    return v;
}

MockBackend::MockBackend(MockScript script, Responder responder, std::size_t dimension,
                         std::unordered_map<std::string, std::string> oracle)
    : script_(std::move(script)),
      responder_(std::move(responder)),
      dimension_(dimension),
      oracle_(std::move(oracle)) {}

std::string MockBackend::complete(const std::string& prompt) {
    const auto key = request_fingerprint(prompt);
    if (auto it = script_.entries.find(key); it != script_.entries.end()) {
        {
            std::lock_guard lock(mutex_);
            auto& served = served_failures_[key];
            if (served < it->second.fail_times) {
                ++served;
                throw TransientError("mock: scripted transient failure " + std::to_string(served) +
                                     " of " + std::to_string(it->second.fail_times));
            }
        }
        return it->second.response;
    }
    if (responder_) {
        if (auto r = responder_(prompt)) return *r;
    }
    throw FatalError("mock: no scripted response for request " + key);
}

std::vector<Vector> MockBackend::embed(const std::vector<std::string>& texts) {
    std::vector<Vector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        auto it = oracle_.find(t);
        out.push_back(pseudo_embedding(it == oracle_.end() ? t : it->second, dimension_));
    }
    return out;
}

std::unordered_map<std::string, std::string> MockBackend::load_oracle(
    const std::filesystem::path& path) {
    std::unordered_map<std::string, std::string> oracle;
    for (const auto& row : read_jsonl(path)) {
        if (row.contains("text")) {
            oracle[row.at("text").get<std::string>()] = row.at("target").get<std::string>();
        } else {
            oracle[row.at("question").get<std::string>()] = row.at("document").get<std::string>();
        }
    }
    return oracle;
}

}  // namespace attackqa::gateway
