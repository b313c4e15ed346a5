#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "attackqa/common/jsonl.hpp"
#include "attackqa/gateway/client.hpp"
#include "attackqa/qa/pair.hpp"
#include "attackqa/rag/service.hpp"
#include "attackqa/retrieval/index.hpp"

namespace attackqa {

struct EvalRecord {
    std::string question;
    std::string true_answer;
    std::string golden_url;
    std::string golden_doc_id;
    std::vector<std::string> retrieved_ids;  // ranked, up to the largest recall k
    std::optional<std::size_t> golden_rank;  // within the k documents shown to the generator
    std::string thought;
    std::string answer;
    std::vector<std::string> references;
    bool parse_ok = false;
    bool refusal = false;
    std::optional<double> judge_score;
    std::string judge_reason;
    std::optional<double> soft_score;
    std::optional<double> hard_score;
    std::optional<std::string> error;

    bool hit() const { return golden_rank.has_value(); }
    ordered_json to_json() const;
    static EvalRecord from_json(const json& j);
};

/// Exact string membership of golden_url in the references of a parsed answer.
bool reference_correct(const EvalRecord& record);

struct JudgeResult {
    std::optional<double> score;  // grade / 10, null when unparseable or unreachable
    std::string reason;
};

std::string build_judge_prompt(const std::string& question, const std::string& true_answer,
                               const std::string& generated_answer);

JudgeResult judge_answer(const std::string& question, const std::string& true_answer,
                         const std::string& generated_answer, gateway::Client& judge);

struct Scores {
    std::optional<double> soft;
    std::optional<double> hard;
};

/// Parse failures score 0 on both. A refusal after a retrieval miss scores 1.0
/// soft; everything else takes the judge score for both.
Scores score_record(const EvalRecord& record);

struct EvalReport {
    std::string embedder;
    std::string generator;
    std::string judge;
    std::size_t k = 0;
    std::size_t records = 0;
    std::size_t parse_failures = 0;
    std::size_t transport_failures = 0;
    std::size_t refusals = 0;
    std::size_t misses = 0;
    std::size_t judge_nulls = 0;
    double context_recall = 0.0;  // percent, at k
    double parse_success = 0.0;
    double correct_reference = 0.0;  // over parsed records
    std::optional<double> mean_soft;  // percent over records with a score
    std::optional<double> mean_hard;
    std::vector<RecallReport> recall_at;

    ordered_json to_json() const;
    std::string to_markdown() const;
};

/// Pure fold over persisted records, so a report can be recomputed from
/// eval_records.jsonl.
EvalReport aggregate_report(const std::vector<EvalRecord>& records, std::size_t k,
                            const std::vector<std::size_t>& recall_ks, const std::string& embedder,
                            const std::string& generator, const std::string& judge);

struct EvalRun {
    std::vector<EvalRecord> records;
    EvalReport report;
};

/// Retrieves at max(k, recall_ks), answers with the top k, judges, scores.
/// Per-record failures are contained in the records.
EvalRun run_eval(const std::vector<QAPair>& eval_pairs, const VectorIndex& index,
                 gateway::Client& embedder, gateway::Client& generator, gateway::Client& judge,
                 std::size_t k = kDefaultK, const std::vector<std::size_t>& recall_ks = {1, 5, 10},
                 std::size_t workers = 1);

/// eval_records.jsonl, report.json and report.md under `dir`.
void write_eval_outputs(const EvalRun& run, const std::filesystem::path& dir);

}  // namespace attackqa
