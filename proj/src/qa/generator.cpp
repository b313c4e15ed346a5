#include "attackqa/qa/generator.hpp"

#include "attackqa/common/parallel.hpp"
#include "attackqa/common/text.hpp"
#include "attackqa/corpus/summary_rules.hpp"
#include "attackqa/qa/parse.hpp"
#include "attackqa/qa/prompts.hpp"
#include "attackqa/qa/templates.hpp"

namespace attackqa {

namespace {

constexpr std::string_view kThoughtPrefix = "To answer the question, I need";

std::optional<std::string> call(gateway::Client& client, const std::string& prompt,
                                GenerationReport& report) {
    ++report.completions_attempted;
    try {
        return client.complete(prompt).text;
    } catch (const gateway::TransportError&) {
        ++report.parse_failures;
        ++report.transport_failures;
        ++report.failure_reasons["transport"];
        return std::nullopt;
    }
}

std::optional<QaParse> parse(const std::string& completion, bool require_question,
                             GenerationReport& report) {
    auto parsed = parse_qa_completion(completion, require_question);
    if (!parsed.ok()) {
        ++report.parse_failures;
        ++report.failure_reasons[*parsed.failure];
        return std::nullopt;
    }
    ++report.parse_successes;
    if (parsed.repaired) ++report.repaired_completions;
    return parsed;
}

QAPair llm_pair(const Document& doc, const GeneratedEntry& e, GenerationReport& report) {
    QAPair p = pair_for_document(doc);
    p.question = e.question;
    p.thought = e.thought;
    p.answer = e.answer;
    std::vector<Reference> refs;
    refs.reserve(e.references.size());
    const auto source = doc.reference_source();
    for (const auto& citation : e.references) refs.push_back(Reference{source, citation});
    p.references = std::move(refs);
    if (!text::starts_with(p.thought, kThoughtPrefix)) ++report.thought_warnings;
    return p;
}

bool usable(const GeneratedEntry& e) {
    return !text::trim(e.question).empty() && !text::trim(e.answer).empty();
}

}  // namespace

std::string_view gen_mode_name(GenMode mode) noexcept {
    switch (mode) {
        case GenMode::Heuristic: return "human_question_human_answer";
        case GenMode::TemplatedQuestion: return "human_question_llm_answer";
        case GenMode::Free: return "llm_question_llm_answer";
    }
    return "unknown";
}

double GenerationReport::parse_success_rate() const {
    if (completions_attempted == 0) return 0.0;
    return static_cast<double>(parse_successes) / static_cast<double>(completions_attempted);
}

void GenerationReport::merge(const GenerationReport& o) {
    docs_processed += o.docs_processed;
    completions_attempted += o.completions_attempted;
    parse_successes += o.parse_successes;
    parse_failures += o.parse_failures;
    transport_failures += o.transport_failures;
    repaired_completions += o.repaired_completions;
    dropped_entries += o.dropped_entries;
    thought_warnings += o.thought_warnings;
    skipped_no_template += o.skipped_no_template;
    for (const auto& [k, v] : o.pairs_per_mode) pairs_per_mode[k] += v;
    for (const auto& [k, v] : o.failure_reasons) failure_reasons[k] += v;
}

ordered_json GenerationReport::to_json() const {
    ordered_json j;
    j["docs_processed"] = docs_processed;
    j["completions_attempted"] = completions_attempted;
    j["parse_successes"] = parse_successes;
    j["parse_failures"] = parse_failures;
    j["parse_success_rate"] = parse_success_rate();
    j["transport_failures"] = transport_failures;
    j["repaired_completions"] = repaired_completions;
    j["dropped_entries"] = dropped_entries;
    j["thought_warnings"] = thought_warnings;
    j["skipped_no_template"] = skipped_no_template;
    std::size_t total = 0;
    for (const auto& [k, v] : pairs_per_mode) total += v;
    ordered_json modes = ordered_json::object();
    for (auto m : {GenMode::Heuristic, GenMode::TemplatedQuestion, GenMode::Free}) {
        const std::string name(gen_mode_name(m));
        auto it = pairs_per_mode.find(name);
        const auto n = it == pairs_per_mode.end() ? 0 : it->second;
        modes[name] = {{"pairs", n},
                       {"percent", total ? 100.0 * static_cast<double>(n) / total : 0.0}};
    }
    j["pairs_per_mode"] = modes;
    j["failure_reasons"] = failure_reasons;
    return j;
}

GenerationResult generate_from_document(const Document& doc, gateway::Client* client,
                                        GenMode mode, const Tokenizer* tokenizer) {
    GenerationResult out;
    auto& report = out.report;
    report.docs_processed = 1;
    const std::string mode_name(gen_mode_name(mode));

    if (mode == GenMode::Heuristic) {
        out.pairs.push_back(gen_summary_qa(doc));
        ++report.pairs_per_mode[mode_name];
        return out;
    }
    if (!client) throw std::invalid_argument("generate_from_document: mode needs a client");

    if (mode == GenMode::TemplatedQuestion) {
        auto question = gen_templated_question(doc);
        if (!question) {
            ++report.skipped_no_template;
            return out;
        }
        auto completion = call(*client, build_templated_prompt(doc.text(), *question), report);
        if (!completion) return out;
        auto parsed = parse(*completion, false, report);
        if (!parsed) return out;
        // One answer is requested; extra objects are ignored.
        auto entry = parsed->entries.front();
        entry.question = *question;
        if (!usable(entry)) {
            ++report.dropped_entries;
            return out;
        }
        auto p = llm_pair(doc, entry, report);
        p.human_question = true;
        p.human_answer = false;
        out.pairs.push_back(std::move(p));
        ++report.pairs_per_mode[mode_name];
        return out;
    }

    WordPunctTokenizer fallback;
    const Tokenizer& tok = tokenizer ? *tokenizer : fallback;
    const auto count = choose_set_count(tok.count(doc.text()));
    auto completion = call(*client, build_docgen_prompt(doc.text(), count), report);
    if (!completion) return out;
    auto parsed = parse(*completion, true, report);
    if (!parsed) return out;
    for (const auto& entry : parsed->entries) {
        if (!usable(entry)) {
            ++report.dropped_entries;
            continue;
        }
        auto p = llm_pair(doc, entry, report);
        p.human_question = false;
        p.human_answer = false;
        out.pairs.push_back(std::move(p));
        ++report.pairs_per_mode[mode_name];
    }
    return out;
}

GenerationResult generate_dataset(const std::vector<Document>& corpus, gateway::Client* client,
                                  std::size_t workers, const Tokenizer* tokenizer) {
    struct Task {
        const Document* doc;
        GenMode mode;
    };
    std::vector<Task> tasks;
    for (const auto& d : corpus) {
        if (is_summary_source(d.source)) {
            tasks.push_back({&d, GenMode::Heuristic});
        } else {
            tasks.push_back({&d, GenMode::TemplatedQuestion});
            tasks.push_back({&d, GenMode::Free});
        }
    }
    std::vector<GenerationResult> slots(tasks.size());
    bounded_for_each(tasks.size(), workers, [&](std::size_t i) {
        slots[i] = generate_from_document(*tasks[i].doc, client, tasks[i].mode, tokenizer);
    });

    GenerationResult out;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        auto& r = slots[i];
        // A document counts once even though it feeds two tasks.
        if (i > 0 && tasks[i].doc == tasks[i - 1].doc) r.report.docs_processed = 0;
        out.report.merge(r.report);
        for (auto& p : r.pairs) out.pairs.push_back(std::move(p));
    }
    return out;
}

}  // namespace attackqa
