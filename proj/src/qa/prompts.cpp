#include "attackqa/qa/prompts.hpp"

namespace attackqa {

namespace {

// Indentation and the trailing blanks after the question line are part of the
// template the generator was prompted with; keep them byte for byte.
constexpr std::string_view kHead =
    "<|begin_of_text|><|start_header_id|>system<|end_header_id|>\n"
    "    You are a JSON generator who generates machine-readable JSON<|eot_id|>"
    "<|start_header_id|>user<|end_header_id|>\n"
    "            Based on the following document, follow the instruction below\n"
    "            Document:\n"
    "            ";

constexpr std::string_view kSchemaOpen =
    "            JSON format:\n"
    "            [\n"
    "                {\n";

constexpr std::string_view kQuestionLine =
    "                    \"question\": \"<generated question>\",            \n";

constexpr std::string_view kSchemaRest =
    "                    \"thought\": \"<generated thought on what is needed to answer the "
    "question. Start with 'To answer the question, I need'>\",\n"
    "                    \"answer\": \"<generated answer>\",\n"
    "                    \"references\": [\n"
    "                        \"<verbatim text from document that supports the answer>\",\n"
    "                        \"<verbatim text from document that supports the answer>\"\n"
    "                    ]\n"
    "                }\n"
    "            ]\n"
    "            The first character of the response must be '[' and the last character must "
    "be ']'. No header text should be included.\n"
    "            <|eot_id|><|start_header_id|>JSON list<|end_header_id|>\n"
    "            ";

}  // namespace

std::string_view set_count_phrase(SetCount count) noexcept {
    switch (count) {
        case SetCount::One: return "one set";
        case SetCount::Two: return "two sets";
        case SetCount::Three: return "three sets";
    }
    return "one set";
}

SetCount choose_set_count(std::size_t doc_tokens) noexcept {
    if (doc_tokens < 80) return SetCount::One;
    if (doc_tokens <= 250) return SetCount::Two;
    return SetCount::Three;
}

std::string build_docgen_prompt(std::string_view doc_text, SetCount count) {
    return build_docgen_prompt(doc_text, set_count_phrase(count));
}

std::string build_docgen_prompt(std::string_view doc_text, std::string_view count_phrase) {
    std::string p(kHead);
    p += doc_text;
    p += "\n            Instruction:\n            Generate ";
    p += count_phrase;
    p += "\n";
    p += kSchemaOpen;
    p += kQuestionLine;
    p += kSchemaRest;
    return p;
}

std::string build_templated_prompt(std::string_view doc_text, std::string_view question) {
    std::string p(kHead);
    p += doc_text;
    p += "\n            Question:\n            ";
    p += question;
    p += "\n            Instruction:\n            Generate one set\n";
    p += kSchemaOpen;
    p += kSchemaRest;
    return p;
}

}  // namespace attackqa
