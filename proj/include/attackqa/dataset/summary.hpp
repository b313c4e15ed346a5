#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "attackqa/common/jsonl.hpp"
#include "attackqa/corpus/tokenizer.hpp"
#include "attackqa/qa/pair.hpp"

namespace attackqa {

struct DatasetSummary {
    std::size_t total_pairs = 0;
    std::size_t human_question_human_answer = 0;
    std::size_t human_question_llm_answer = 0;
    std::size_t llm_question_llm_answer = 0;
    std::size_t llm_question_human_answer = 0;  // not produced by the generator; kept visible
    std::size_t unique_documents = 0;
    std::optional<std::size_t> min_doc_tokens;
    std::optional<std::size_t> max_doc_tokens;
    std::optional<double> mean_doc_tokens;
    std::string tokenizer;

    /// Share of total_pairs in percent; 0 for an empty dataset.
    double percent(std::size_t count) const;
    ordered_json to_json() const;
    /// Two-column markdown table.
    std::string to_markdown() const;
};

/// Pair counts per provenance mode and token lengths over the unique documents.
DatasetSummary dataset_summary(const std::vector<QAPair>& pairs, const Tokenizer& tokenizer);

}  // namespace attackqa
