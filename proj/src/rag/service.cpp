#include "attackqa/rag/service.hpp"

#include "attackqa/rag/prompt.hpp"

namespace attackqa {

ordered_json AnswerRecord::to_json(const VectorIndex& index) const {
    ordered_json j;
    j["question"] = question;
    j["thought"] = thought;
    j["answer"] = answer;
    j["references"] = references;
    j["refusal"] = refusal;
    j["parse_ok"] = parse_ok;
    auto retrieved_json = ordered_json::array();
    for (const auto& r : retrieved.ranked) {
        const auto& d = index.doc(r.index);
        ordered_json e;
        e["doc_id"] = r.doc_id;
        e["url"] = d.url;
        e["header"] = d.header;
        e["score"] = r.score;
        retrieved_json.push_back(std::move(e));
    }
    j["retrieved"] = std::move(retrieved_json);
    j["golden_rank"] = golden_rank ? ordered_json(*golden_rank) : ordered_json(nullptr);
    j["warning"] = warning ? ordered_json(*warning) : ordered_json(nullptr);
    j["error"] = error ? ordered_json(*error) : ordered_json(nullptr);
    return j;
}

AnswerRecord answer_question(const std::string& question, std::size_t k,
                             const VectorIndex& index, gateway::Client& embedder,
                             gateway::Client& generator,
                             const std::optional<std::string>& golden_doc_id) {
    RetrievalResult retrieved;
    try {
        retrieved = retrieve(index, question, k, embedder);
    } catch (const gateway::TransportError& e) {
        AnswerRecord rec;
        rec.question = question;
        rec.retrieved.query = question;
        rec.error = std::string("retrieval failed: ") + e.what();
        rec.transport_failure = true;
        return rec;
    }
    return answer_from_retrieval(question, std::move(retrieved), index, generator, golden_doc_id);
}

AnswerRecord answer_from_retrieval(const std::string& question, RetrievalResult retrieved,
                                   const VectorIndex& index, gateway::Client& generator,
                                   const std::optional<std::string>& golden_doc_id) {
    AnswerRecord rec;
    rec.question = question;
    rec.retrieved = std::move(retrieved);
    if (golden_doc_id) rec.golden_rank = rec.retrieved.rank_of(*golden_doc_id);

    std::vector<Document> docs;
    for (const auto& r : rec.retrieved.ranked) docs.push_back(index.doc(r.index));
    try {
        rec.completion = generator.complete(build_answer_prompt(question, docs)).text;
    } catch (const gateway::TransportError& e) {
        rec.error = std::string("generation failed: ") + e.what();
        rec.transport_failure = true;
        return rec;
    }
    auto parsed = parse_answer(rec.completion);
    if (!parsed.ok) {
        rec.error = "unparseable completion: " + parsed.failure.value_or("unknown");
        return rec;
    }
    rec.parse_ok = true;
    rec.thought = std::move(parsed.thought);
    rec.answer = std::move(parsed.answer);
    rec.references = std::move(parsed.references);
    rec.refusal = parsed.refusal;
    rec.warning = std::move(parsed.warning);
    if (rec.refusal && !rec.references.empty()) {
        rec.references.clear();
        rec.warning = "references dropped from a refusal";
    }
    return rec;
}

InteractionLog::InteractionLog(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::app | std::ios::binary);
    if (!out_) throw IoError("cannot open interaction log " + path.string());
}

void InteractionLog::append(const ordered_json& row) {
    std::lock_guard lock(mutex_);
    out_ << row.dump() << '\n';
    out_.flush();
}

}  // namespace attackqa
