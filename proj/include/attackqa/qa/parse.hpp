#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "attackqa/common/jsonl.hpp"

namespace attackqa {

/// Parses `text` as JSON as-is; failing that, after escaping lone backslashes;
/// failing that, after also escaping raw control characters inside strings.
/// `repaired` is set when a rewrite was needed.
std::optional<json> parse_json_lenient(std::string_view text, bool* repaired = nullptr);

struct GeneratedEntry {
    std::string question;  // empty in templated mode
    std::string thought;
    std::string answer;
    std::vector<std::string> references;
    friend bool operator==(const GeneratedEntry&, const GeneratedEntry&) = default;
};

struct QaParse {
    std::vector<GeneratedEntry> entries;
    std::optional<std::string> failure;  // reason; entries is empty when set
    bool repaired = false;
    bool ok() const { return !failure.has_value(); }
};

/// Reads the list between the first '[' and the last ']' of a generator
/// completion. Every element must carry question (unless `require_question` is
/// false), thought and answer strings and a list of string references.
QaParse parse_qa_completion(std::string_view completion, bool require_question = true);

}  // namespace attackqa
