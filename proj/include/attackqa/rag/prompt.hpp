#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "attackqa/corpus/document.hpp"

namespace attackqa {

inline constexpr std::string_view kRefusalSentinel =
    "I am sorry, I do not have the answer to the question.";
inline constexpr std::string_view kThoughtPrefix = "To answer the question, I need";

/// One-shot RAG prompt: instructions, the fixed T1562 example, then
/// "Document i: <url>\n\n<text>" blocks in the given order and the question.
/// Throws std::invalid_argument when `docs` is empty.
std::string build_answer_prompt(std::string_view question, const std::vector<Document>& docs);

struct AnswerParse {
    bool ok = false;
    std::string thought;
    std::string answer;
    std::vector<std::string> references;
    bool refusal = false;
    bool repaired = false;
    std::optional<std::string> warning;  // e.g. thought without the required prefix
    std::optional<std::string> failure;
};

/// Reads the object between the first '{' and the last '}' of a completion.
AnswerParse parse_answer(std::string_view completion);

/// The completion text a fine-tuned generator is trained to emit.
std::string render_completion(const std::string& thought, const std::string& answer,
                              const std::vector<std::string>& references);

}  // namespace attackqa
