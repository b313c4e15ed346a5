#include "attackqa/dataset/summary.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_set>

namespace attackqa {

double DatasetSummary::percent(std::size_t count) const {
    if (total_pairs == 0) return 0.0;
    return 100.0 * static_cast<double>(count) / static_cast<double>(total_pairs);
}

ordered_json DatasetSummary::to_json() const {
    auto opt_size = [](const std::optional<std::size_t>& v) {
        return v ? ordered_json(*v) : ordered_json(nullptr);
    };
    ordered_json j;
    j["total_pairs"] = total_pairs;
    j["human_question_human_answer"] = human_question_human_answer;
    j["human_question_llm_answer"] = human_question_llm_answer;
    j["llm_question_llm_answer"] = llm_question_llm_answer;
    j["llm_question_human_answer"] = llm_question_human_answer;
    j["percent_human_question_human_answer"] = percent(human_question_human_answer);
    j["percent_human_question_llm_answer"] = percent(human_question_llm_answer);
    j["percent_llm_question_llm_answer"] = percent(llm_question_llm_answer);
    j["unique_documents"] = unique_documents;
    j["min_doc_tokens"] = opt_size(min_doc_tokens);
    j["max_doc_tokens"] = opt_size(max_doc_tokens);
    j["mean_doc_tokens"] = mean_doc_tokens ? ordered_json(*mean_doc_tokens) : ordered_json(nullptr);
    j["tokenizer"] = tokenizer;
    return j;
}

std::string DatasetSummary::to_markdown() const {
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };
    auto opt = [](const std::optional<std::size_t>& v) {
        return v ? std::to_string(*v) : std::string("n/a");
    };
    std::string md = "| Statistic | Value |\n|---|---|\n";
    md += "| Total Q&A pairs | " + std::to_string(total_pairs) + " |\n";
    md += "| Human question, human answer | " + fmt(percent(human_question_human_answer)) + "% |\n";
    md += "| Human question, LLM answer | " + fmt(percent(human_question_llm_answer)) + "% |\n";
    md += "| LLM question, LLM answer | " + fmt(percent(llm_question_llm_answer)) + "% |\n";
    md += "| Unique documents | " + std::to_string(unique_documents) + " |\n";
    md += "| Max document tokens | " + opt(max_doc_tokens) + " |\n";
    md += "| Min document tokens | " + opt(min_doc_tokens) + " |\n";
    md += "| Mean document tokens | " +
          (mean_doc_tokens ? fmt(*mean_doc_tokens) : std::string("n/a")) + " |\n";
    md += "| Tokenizer | " + tokenizer + " |\n";
    return md;
}

DatasetSummary dataset_summary(const std::vector<QAPair>& pairs, const Tokenizer& tokenizer) {
    DatasetSummary s;
    s.total_pairs = pairs.size();
    s.tokenizer = tokenizer.name();
    std::unordered_set<std::string> docs;
    std::size_t total_tokens = 0;
    for (const auto& p : pairs) {
        if (p.human_question && p.human_answer) ++s.human_question_human_answer;
        if (p.human_question && !p.human_answer) ++s.human_question_llm_answer;
        if (!p.human_question && !p.human_answer) ++s.llm_question_llm_answer;
        if (!p.human_question && p.human_answer) ++s.llm_question_human_answer;
        if (!docs.insert(p.document).second) continue;
        const auto n = tokenizer.count(p.document);
        total_tokens += n;
        s.min_doc_tokens = s.min_doc_tokens ? std::min(*s.min_doc_tokens, n) : n;
        s.max_doc_tokens = s.max_doc_tokens ? std::max(*s.max_doc_tokens, n) : n;
    }
    s.unique_documents = docs.size();
    if (!docs.empty()) {
        s.mean_doc_tokens = static_cast<double>(total_tokens) / static_cast<double>(docs.size());
    }
    return s;
}

}  // namespace attackqa
