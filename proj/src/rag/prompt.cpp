#include "attackqa/rag/prompt.hpp"

#include "attackqa/common/json_repair.hpp"
#include "attackqa/common/jsonl.hpp"
#include "attackqa/common/text.hpp"
#include "attackqa/qa/parse.hpp"

namespace attackqa {

namespace {

// The example's first document keeps its double space after "Document 1:" and
// its stray closing quote; both are part of the prompt the models were tuned on.
constexpr std::string_view kPreamble =
    "<|begin_of_text|><|start_header_id|>system<|end_header_id|>\n"
    "You are an assistant for generating JSON formatted responses\n"
    "<|eot_id|><|start_header_id|>user<|end_header_id|>\n"
    "Respond with a JSON dictionary that includes a thought, answer, and references\n"
    "The answer must contain text obtained strictly from the given documents.\n"
    "Avoid any text that is not in the given documents.\n"
    "Answer using concise, self-contained, grammatically complete sentences. \n"
    "The answer must be a string with less than four sentences.\n"
    "Do not mention the documents by number or the context in the answers.\n"
    "Answer the question strictly using the provided documents.\n"
    "If you cannot answer the question using the documents, the answer should be \"I am sorry, "
    "I do not have the answer to the question.\"\n"
    "Along with the answer, include a thought that begins with \"To answer the question, I "
    "need\".\n"
    "The references must contain URLs that exactly match the full URLs in the document headers "
    "relevant to by the answer.\n"
    "There may be multiple references in the references list.\n"
    "Follow the example below:\n"
    "\n"
    "Document 1:  https://attack.mitre.org/techniques/T1562/001\n"
    "\n"
    "The campaigns that used attack technique 'T1562.001: Disable or Modify Tools' were: 'C0002: "
    "Night Dragon', 'C0024: SolarWinds Compromise', 'C0028: 2015 Ukraine Electric Power Attack', "
    "'C0029: Cutting Edge'\"\n"
    "\n"
    "Document 2: https://attack.mitre.org/techniques/T1562/002\n"
    "\n"
    "The campaigns that used attack technique 'T1562.002: Disable Windows Event Logging' were: "
    "'C0024: SolarWinds Compromise', 'C0025: 2016 Ukraine Electric Power Attack'\n"
    "\n"
    "Document 3: https://attack.mitre.org/techniques/T1070/001\n"
    "\n"
    "The campaigns that used attack technique 'T1070.001: Clear Windows Event Logs' were: 'C0014: "
    "Operation Wocao'\n"
    "\n"
    "Question: What campaigns used attack technique 'T1562.002: Disable Windows Event Logging'?\n"
    "Response:\n"
    "{\n"
    "    \"thought\": \"To answer the question, I need to know what campaigns used attack "
    "technique 'T1562.002: Disable Windows Event Logging'. The answer is contained in the "
    "provided document with URL 'https://attack.mitre.org/techniques/T1562/002'.\",\n"
    "    \"answer\": \"The campaigns that used attack technique 'T1562.002: Disable Windows Event "
    "Logging' were: 'C0024: SolarWinds Compromise', 'C0025: 2016 Ukraine Electric Power "
    "Attack'\",\n"
    "    \"references\": [\"https://attack.mitre.org/techniques/T1562/002\"]\n"
    "}\n"
    "\n";

constexpr std::string_view kClosing =
    "The response must be formatted as a JSON instance that conforms to the JSON schema above.\n"
    "No text should appear before or after the JSON instance.\n"
    "Response:\n"
    "<|eot_id|><|start_header_id|>machine-readable JSON<|end_header_id|>";

std::string json_string(const std::string& s) { return json(s).dump(); }

}  // namespace

std::string build_answer_prompt(std::string_view question, const std::vector<Document>& docs) {
    if (docs.empty()) throw std::invalid_argument("build_answer_prompt: no documents");
    std::string p(kPreamble);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (i > 0) p += "\n\n";
        p += "Document " + std::to_string(i + 1) + ": " + docs[i].url + "\n\n" + docs[i].text();
    }
    p += "\n\nQuestion: ";
    p += question;
    p += "\n";
    p += kClosing;
    return p;
}

AnswerParse parse_answer(std::string_view completion) {
    AnswerParse out;
    auto span = json_repair::outer_span(completion, '{', '}');
    if (!span) {
        out.failure = "no JSON object in completion";
        return out;
    }
    auto j = parse_json_lenient(*span, &out.repaired);
    if (!j) {
        out.failure = "invalid JSON after repair";
        return out;
    }
    auto str = [&](const char* key) -> const json* {
        auto it = j->find(key);
        return it != j->end() && it->is_string() ? &*it : nullptr;
    };
    const auto* thought = j->is_object() ? str("thought") : nullptr;
    const auto* answer = j->is_object() ? str("answer") : nullptr;
    auto refs = j->is_object() ? j->find("references") : j->end();
    if (!thought || !answer || refs == j->end() || !refs->is_array()) {
        out.failure = "schema";
        return out;
    }
    std::vector<std::string> references;
    for (const auto& r : *refs) {
        if (!r.is_string()) {
            out.failure = "schema";
            return out;
        }
        references.push_back(r.get<std::string>());
    }
    out.ok = true;
    out.thought = thought->get<std::string>();
    out.answer = answer->get<std::string>();
    out.references = std::move(references);
    out.refusal = out.answer == kRefusalSentinel;
    if (!text::starts_with(out.thought, kThoughtPrefix)) {
        out.warning = "thought does not begin with \"" + std::string(kThoughtPrefix) + "\"";
    }
    return out;
}

std::string render_completion(const std::string& thought, const std::string& answer,
                              const std::vector<std::string>& references) {
    std::string refs = "[";
    for (std::size_t i = 0; i < references.size(); ++i) {
        if (i > 0) refs += ", ";
        refs += json_string(references[i]);
    }
    refs += "]";
    return "{\n\"thought\": " + json_string(thought) + ",\n\"answer\": " + json_string(answer) +
           ",\n\"references\": " + refs + "\n}";
}

}  // namespace attackqa
