#include "attackqa/cli/mock_models.hpp"

#include <string_view>

#include "attackqa/common/hash.hpp"
#include "attackqa/common/jsonl.hpp"
#include "attackqa/common/text.hpp"

namespace attackqa {

namespace {

constexpr std::string_view kThought = "To answer the question, I need ";

std::optional<std::string> between(const std::string& s, std::string_view open,
                                   std::string_view close, std::size_t from = 0) {
    const auto a = s.find(open, from);
    if (a == std::string::npos) return std::nullopt;
    const auto start = a + open.size();
    const auto b = s.find(close, start);
    if (b == std::string::npos) return std::nullopt;
    return s.substr(start, b - start);
}

std::string grade(int score, const std::string& reason) {
    return json{{"score", score}, {"reason", reason}}.dump();
}

std::optional<std::string> docgen(const std::string& prompt) {
    auto doc = between(prompt, "Document:\n            ", "\n            Instruction:");
    if (!doc) return std::nullopt;
    auto q_at = doc->find("\n            Question:\n            ");
    const bool templated = q_at != std::string::npos;
    if (templated) doc->resize(q_at);
    auto sents = text::sentences(*doc);
    if (sents.empty()) return std::nullopt;

    json list = json::array();
    if (templated) {
        list.push_back({{"thought", std::string(kThought) + "the opening statement of the document."},
                        {"answer", sents.front()},
                        {"references", {sents.front()}}});
        return list.dump();
    }
    std::size_t sets = 1;
    if (prompt.find("Generate two sets") != std::string::npos) sets = 2;
    if (prompt.find("Generate three sets") != std::string::npos) sets = 3;
    const auto label = fingerprint(*doc);
    for (std::size_t i = 0; i < sets && i < sents.size(); ++i) {
        const auto n = std::to_string(i + 1);
        list.push_back({{"question", "What does statement " + n + " of document " + label + " say?"},
                        {"thought", std::string(kThought) + "statement " + n + " of the document."},
                        {"answer", sents[i]},
                        {"references", {sents[i]}}});
    }
    return list.dump();
}

std::optional<std::string> rag_answer(const std::string& prompt) {
    // Skip the one-shot example, which ends with the closing brace of its response.
    const auto example_end = prompt.find("\n}\n\n");
    if (example_end == std::string::npos) return std::nullopt;
    const auto from = example_end + 4;
    auto url = between(prompt, "Document 1: ", "\n\n", from);
    if (!url) return std::nullopt;
    const auto text_start = prompt.find("\n\n", prompt.find("Document 1: ", from)) + 2;
    auto end = prompt.find("\n\nDocument 2: ", text_start);
    if (end == std::string::npos) end = prompt.find("\n\nQuestion: ", text_start);
    if (end == std::string::npos) return std::nullopt;
    const auto text = prompt.substr(text_start, end - text_start);
    json out{{"thought", std::string(kThought) + "the first document. The answer is contained in "
                                                 "the provided document with URL '" + *url + "'."},
             {"answer", text},
             {"references", {*url}}};
    return out.dump();
}

std::optional<std::string> judge(const std::string& prompt) {
    auto truth = between(prompt, "True answer:\n", "\n\nGenerated answer:\n");
    auto generated = between(prompt, "Generated answer:\n", "\n\nJSON:\n");
    if (!truth || !generated) return std::nullopt;
    const bool contains = text::normalize_ws(*generated).find(text::normalize_ws(*truth)) !=
                          std::string::npos;
    return contains ? grade(10, "contains the expected output") : grade(0, "misses the expected output");
}

}  // namespace

std::optional<std::string> mock_model_response(const std::string& prompt) {
    if (prompt.find("<|start_header_id|>JSON list<|end_header_id|>") != std::string::npos) {
        return docgen(prompt);
    }
    if (prompt.find("machine-readable JSON<|end_header_id|>") != std::string::npos) {
        return rag_answer(prompt);
    }
    if (text::starts_with(prompt, "You grade the quality")) return grade(10, "mock grader");
    if (text::starts_with(prompt, "You judge whether")) return judge(prompt);
    return std::nullopt;
}

}  // namespace attackqa
