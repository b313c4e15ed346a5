#include "attackqa/eval/eval.hpp"

#include <algorithm>
#include <cstdio>

#include "attackqa/common/parallel.hpp"
#include "attackqa/qc/qc.hpp"

namespace attackqa {

namespace {

ordered_json opt_num(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::optional<double> num_or_null(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<double>();
}

double percent(std::size_t num, std::size_t den) {
    return den ? 100.0 * static_cast<double>(num) / static_cast<double>(den) : 0.0;
}

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

ordered_json EvalRecord::to_json() const {
    ordered_json j;
    j["question"] = question;
    j["true_answer"] = true_answer;
    j["golden_url"] = golden_url;
    j["golden_doc_id"] = golden_doc_id;
    j["retrieved_ids"] = retrieved_ids;
    j["golden_rank"] = golden_rank ? ordered_json(*golden_rank) : ordered_json(nullptr);
    j["thought"] = thought;
    j["answer"] = answer;
    j["references"] = references;
    j["parse_ok"] = parse_ok;
    j["refusal"] = refusal;
    j["judge_score"] = opt_num(judge_score);
    j["judge_reason"] = judge_reason;
    j["soft_score"] = opt_num(soft_score);
    j["hard_score"] = opt_num(hard_score);
    j["error"] = error ? ordered_json(*error) : ordered_json(nullptr);
    return j;
}

EvalRecord EvalRecord::from_json(const json& j) {
    EvalRecord r;
    r.question = j.at("question").get<std::string>();
    r.true_answer = j.value("true_answer", "");
    r.golden_url = j.value("golden_url", "");
    r.golden_doc_id = j.value("golden_doc_id", "");
    r.retrieved_ids = j.value("retrieved_ids", std::vector<std::string>{});
    if (auto it = j.find("golden_rank"); it != j.end() && !it->is_null()) {
        r.golden_rank = it->get<std::size_t>();
    }
    r.thought = j.value("thought", "");
    r.answer = j.value("answer", "");
    r.references = j.value("references", std::vector<std::string>{});
    r.parse_ok = j.value("parse_ok", false);
    r.refusal = j.value("refusal", false);
    r.judge_score = num_or_null(j, "judge_score");
    r.judge_reason = j.value("judge_reason", "");
    r.soft_score = num_or_null(j, "soft_score");
    r.hard_score = num_or_null(j, "hard_score");
    r.error = opt_string(j, "error");
    return r;
}

bool reference_correct(const EvalRecord& record) {
    if (!record.parse_ok) return false;
    return std::find(record.references.begin(), record.references.end(), record.golden_url) !=
           record.references.end();
}

std::string build_judge_prompt(const std::string& question, const std::string& true_answer,
                               const std::string& generated_answer) {
    std::string p =
        "You judge whether a generated answer to a question about cyber threat intelligence is "
        "correct, using the true answer as the reference.\n\n"
        "Evaluation steps:\n"
        "1. Penalize a generated answer that contradicts the true answer.\n"
        "2. Penalize a generated answer that leaves out details of the true answer that matter "
        "for the question.\n"
        "3. Penalize a generated answer that adds details absent from the true answer.\n\n"
        "Return only a JSON object of the form {\"score\": <integer from 0 to 10>, \"reason\": "
        "\"<one or two sentences explaining the score>\"}. 10 means fully correct.\n\n";
    p += "Question:\n" + question + "\n\n";
    p += "True answer:\n" + true_answer + "\n\n";
    p += "Generated answer:\n" + generated_answer + "\n\nJSON:\n";
    return p;
}

JudgeResult judge_answer(const std::string& question, const std::string& true_answer,
                         const std::string& generated_answer, gateway::Client& judge) {
    JudgeResult out;
    try {
        const auto reply =
            judge.complete(build_judge_prompt(question, true_answer, generated_answer)).text;
        if (auto g = parse_grade(reply)) {
            out.score = g->score / 10.0;
            out.reason = g->reason;
        } else {
            out.reason = "unparseable grade";
        }
    } catch (const gateway::TransportError& e) {
        out.reason = std::string("judge unavailable: ") + e.what();
    }
    return out;
}

Scores score_record(const EvalRecord& r) {
    if (!r.parse_ok) return Scores{0.0, 0.0};
    Scores s{r.judge_score, r.judge_score};
    if (!r.hit() && r.refusal) s.soft = 1.0;
    return s;
}

ordered_json EvalReport::to_json() const {
    ordered_json j;
    j["config"] = {{"embedder", embedder}, {"generator", generator}, {"judge", judge}, {"k", k}};
    ordered_json rows;
    rows["context_recall_at_k"] = context_recall;
    rows["answer_parsing_success"] = parse_success;
    rows["correct_reference"] = correct_reference;
    rows["mean_correctness_soft"] = opt_num(mean_soft);
    rows["mean_correctness_hard"] = opt_num(mean_hard);
    j["table"] = rows;
    auto recall = ordered_json::array();
    for (const auto& r : recall_at) recall.push_back(r.to_json());
    j["context_recall"] = recall;
    j["counts"] = {{"records", records},       {"parse_failures", parse_failures},
                   {"transport_failures", transport_failures},
                   {"refusals", refusals},     {"misses", misses},
                   {"judge_nulls", judge_nulls}};
    return j;
}

std::string EvalReport::to_markdown() const {
    auto opt = [](const std::optional<double>& v) { return v ? fmt2(*v) : std::string("n/a"); };
    std::string md = "| | " + embedder + " / " + generator + " |\n|---|---|\n";
    md += "| % Context Recall at k=" + std::to_string(k) + " | " + fmt2(context_recall) + " |\n";
    md += "| % Answer parsing success | " + fmt2(parse_success) + " |\n";
    md += "| % Correct reference | " + fmt2(correct_reference) + " |\n";
    md += "| % Mean Correctness (soft) | " + opt(mean_soft) + " |\n";
    md += "| % Mean Correctness (hard) | " + opt(mean_hard) + " |\n";
    md += "\n| k | R(k) |\n|---|---|\n";
    for (const auto& r : recall_at) {
        md += "| " + std::to_string(r.k) + " | " + fmt2(100.0 * r.recall()) + " |\n";
    }
    md += "\nRecords: " + std::to_string(records) + ", parse failures: " +
          std::to_string(parse_failures) + ", judge nulls: " + std::to_string(judge_nulls) +
          ", refusals: " + std::to_string(refusals) + ", retrieval misses: " +
          std::to_string(misses) + ". Judge: " + judge + ".\n";
    return md;
}

EvalReport aggregate_report(const std::vector<EvalRecord>& records, std::size_t k,
                            const std::vector<std::size_t>& recall_ks, const std::string& embedder,
                            const std::string& generator, const std::string& judge) {
    EvalReport rep;
    rep.embedder = embedder;
    rep.generator = generator;
    rep.judge = judge;
    rep.k = k;
    rep.records = records.size();
    std::size_t hits = 0, parsed = 0, ref_ok = 0;
    std::size_t soft_n = 0, hard_n = 0;
    double soft_sum = 0.0, hard_sum = 0.0;
    for (const auto& r : records) {
        if (r.hit()) ++hits; else ++rep.misses;
        if (r.parse_ok) {
            ++parsed;
            if (reference_correct(r)) ++ref_ok;
            if (!r.judge_score) ++rep.judge_nulls;
        } else {
            ++rep.parse_failures;
        }
        if (r.refusal) ++rep.refusals;
        if (r.error && (r.error->rfind("retrieval failed", 0) == 0 ||
                        r.error->rfind("generation failed", 0) == 0)) {
            ++rep.transport_failures;
        }
        if (r.soft_score) {
            soft_sum += *r.soft_score;
            ++soft_n;
        }
        if (r.hard_score) {
            hard_sum += *r.hard_score;
            ++hard_n;
        }
    }
    rep.context_recall = percent(hits, records.size());
    rep.parse_success = percent(parsed, records.size());
    rep.correct_reference = percent(ref_ok, parsed);
    if (soft_n) rep.mean_soft = 100.0 * soft_sum / static_cast<double>(soft_n);
    if (hard_n) rep.mean_hard = 100.0 * hard_sum / static_cast<double>(hard_n);
    if (!records.empty()) {
        std::vector<std::vector<std::string>> ranked;
        std::vector<std::string> golden;
        for (const auto& r : records) {
            ranked.push_back(r.retrieved_ids);
            golden.push_back(r.golden_doc_id);
        }
        rep.recall_at = recall_from_rankings(ranked, golden, recall_ks);
    }
    return rep;
}

EvalRun run_eval(const std::vector<QAPair>& eval_pairs, const VectorIndex& index,
                 gateway::Client& embedder, gateway::Client& generator, gateway::Client& judge,
                 std::size_t k, const std::vector<std::size_t>& recall_ks, std::size_t workers) {
    if (eval_pairs.empty()) throw std::invalid_argument("empty evaluation set");
    if (k == 0) throw std::invalid_argument("k must be at least 1");
    std::size_t k_max = k;
    for (auto rk : recall_ks) k_max = std::max(k_max, rk);

    EvalRun run;
    run.records.resize(eval_pairs.size());
    bounded_for_each(eval_pairs.size(), workers, [&](std::size_t i) {
        const auto& pair = eval_pairs[i];
        auto& rec = run.records[i];
        rec.question = pair.question;
        rec.true_answer = pair.answer;
        rec.golden_url = pair.url;
        auto golden = index.find_by_text(pair.document);
        if (!golden) {
            rec.error = "golden document not in index";
            rec.soft_score = rec.hard_score = 0.0;
            return;
        }
        rec.golden_doc_id = index.doc_ids()[*golden];

        RetrievalResult full;
        try {
            full = retrieve(index, pair.question, k_max, embedder);
        } catch (const gateway::TransportError& e) {
            rec.error = std::string("retrieval failed: ") + e.what();
            rec.soft_score = rec.hard_score = 0.0;
            return;
        }
        for (const auto& r : full.ranked) rec.retrieved_ids.push_back(r.doc_id);
        RetrievalResult top = full;
        if (top.ranked.size() > k) top.ranked.resize(k);

        auto answer = answer_from_retrieval(pair.question, std::move(top), index, generator,
                                            rec.golden_doc_id);
        rec.golden_rank = answer.golden_rank;
        rec.parse_ok = answer.parse_ok;
        rec.thought = answer.thought;
        rec.answer = answer.answer;
        rec.references = answer.references;
        rec.refusal = answer.refusal;
        rec.error = answer.error;
        if (rec.parse_ok) {
            auto verdict = judge_answer(pair.question, pair.answer, rec.answer, judge);
            rec.judge_score = verdict.score;
            rec.judge_reason = verdict.reason;
        }
        const auto s = score_record(rec);
        rec.soft_score = s.soft;
        rec.hard_score = s.hard;
    });
    run.report = aggregate_report(run.records, k, recall_ks, embedder.config().model,
                                  generator.config().model, judge.config().model);
    return run;
}

void write_eval_outputs(const EvalRun& run, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<ordered_json> rows;
    rows.reserve(run.records.size());
    for (const auto& r : run.records) rows.push_back(r.to_json());
    write_jsonl(dir / "eval_records.jsonl", rows);
    write_file(dir / "report.json", run.report.to_json().dump(2) + "\n");
    write_file(dir / "report.md", run.report.to_markdown());
}

}  // namespace attackqa
