#include "attackqa/qa/parse.hpp"

#include "attackqa/common/json_repair.hpp"

namespace attackqa {

std::optional<json> parse_json_lenient(std::string_view text, bool* repaired) {
    if (repaired) *repaired = false;
    auto attempt = [](std::string_view s) -> std::optional<json> {
        auto j = json::parse(s.begin(), s.end(), nullptr, false);
        if (j.is_discarded()) return std::nullopt;
        return j;
    };
    if (auto j = attempt(text)) return j;
    if (repaired) *repaired = true;
    const auto escaped = json_repair::escape_lone_backslashes(text);
    if (auto j = attempt(escaped)) return j;
    if (auto j = attempt(json_repair::escape_raw_controls(escaped))) return j;
    return std::nullopt;
}

namespace {

bool string_field(const json& obj, const char* key, std::string& out) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) return false;
    out = it->get<std::string>();
    return true;
}

}  // namespace

QaParse parse_qa_completion(std::string_view completion, bool require_question) {
    QaParse result;
    auto span = json_repair::outer_span(completion, '[', ']');
    if (!span) {
        result.failure = "no JSON list in completion";
        return result;
    }
    auto parsed = parse_json_lenient(*span, &result.repaired);
    if (!parsed) {
        result.failure = "invalid JSON after repair";
        return result;
    }
    if (!parsed->is_array()) {
        result.failure = "schema";
        return result;
    }
    if (parsed->empty()) {
        result.failure = "empty list";
        return result;
    }
    std::vector<GeneratedEntry> entries;
    for (const auto& item : *parsed) {
        GeneratedEntry e;
        const bool fields_ok = item.is_object() &&
                               (!require_question || string_field(item, "question", e.question)) &&
                               string_field(item, "thought", e.thought) &&
                               string_field(item, "answer", e.answer);
        auto refs = fields_ok ? item.find("references") : item.end();
        if (!fields_ok || refs == item.end() || !refs->is_array()) {
            result.failure = "schema";
            return result;
        }
        for (const auto& r : *refs) {
            if (!r.is_string()) {
                result.failure = "schema";
                return result;
            }
            e.references.push_back(r.get<std::string>());
        }
        entries.push_back(std::move(e));
    }
    result.entries = std::move(entries);
    return result;
}

}  // namespace attackqa
