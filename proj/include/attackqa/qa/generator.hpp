#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "attackqa/common/jsonl.hpp"
#include "attackqa/corpus/document.hpp"
#include "attackqa/corpus/tokenizer.hpp"
#include "attackqa/gateway/client.hpp"
#include "attackqa/qa/pair.hpp"

namespace attackqa {

enum class GenMode {
    Heuristic,          // human question, human answer (summary documents)
    TemplatedQuestion,  // human question, LLM answer
    Free,               // LLM question and answer
};

std::string_view gen_mode_name(GenMode mode) noexcept;

struct GenerationReport {
    std::size_t docs_processed = 0;
    std::size_t completions_attempted = 0;
    std::size_t parse_successes = 0;
    std::size_t parse_failures = 0;  // includes transport failures
    std::size_t transport_failures = 0;
    std::size_t repaired_completions = 0;
    std::size_t dropped_entries = 0;    // parsed entries with an empty question or answer
    std::size_t thought_warnings = 0;   // thought lacks the required prefix
    std::size_t skipped_no_template = 0;
    std::map<std::string, std::size_t> pairs_per_mode;
    std::map<std::string, std::size_t> failure_reasons;

    double parse_success_rate() const;
    void merge(const GenerationReport& other);
    ordered_json to_json() const;
};

struct GenerationResult {
    std::vector<QAPair> pairs;
    GenerationReport report;
};

/// Heuristic mode needs no client. Templated mode asks the generator for one
/// {thought, answer, references} object for the templated question; free mode
/// asks for up to three full sets, sized by `tokenizer` (word/punct approximation
/// when null). Failures are recorded in the report, never thrown.
GenerationResult generate_from_document(const Document& doc, gateway::Client* client,
                                        GenMode mode, const Tokenizer* tokenizer = nullptr);

/// Summary documents go through heuristic mode. Every other document gets a
/// templated question and a free-mode completion. Output order follows the
/// corpus regardless of `workers`.
GenerationResult generate_dataset(const std::vector<Document>& corpus, gateway::Client* client,
                                  std::size_t workers = 1, const Tokenizer* tokenizer = nullptr);

}  // namespace attackqa
