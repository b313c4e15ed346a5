#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "attackqa/common/jsonl.hpp"
#include "attackqa/gateway/client.hpp"
#include "attackqa/qa/pair.hpp"

namespace attackqa {

inline constexpr double kDefaultQcThreshold = 0.7;

/// True when every reference citation, whitespace-normalized, is a contiguous
/// substring of the whitespace-normalized document. Human answers carry no
/// references and always pass; an LLM answer without a reference list fails.
bool check_grounding(const QAPair& pair);

struct DedupResult {
    std::vector<QAPair> retained;
    std::vector<QAPair> removed;
};

/// Drops every pair whose exact question occurs more than once, all copies
/// included. Relative order is kept.
DedupResult dedup_questions(const std::vector<QAPair>& pairs);

struct QCScore {
    std::optional<double> question_score;  // raw grade / 10
    std::optional<double> answer_score;
    std::string question_reason;
    std::string answer_reason;
    std::string grader_model;
    std::optional<std::string> error;  // set when either metric is ungraded

    bool graded() const { return question_score && answer_score; }
    /// min(question, answer); nullopt when ungraded.
    std::optional<double> combined() const;
    ordered_json to_json() const;
    static QCScore from_json(const json& j);
};

struct Grade {
    int score = 0;  // 0..10
    std::string reason;
};

/// {"score": n, "reason": "..."} from the first '{' to the last '}'. Integral
/// scores in [0, 10] only, given as a number or a numeric string.
std::optional<Grade> parse_grade(std::string_view completion);

std::string build_question_grade_prompt(const QAPair& pair,
                                        const std::vector<std::string>& context);
std::string build_answer_grade_prompt(const QAPair& pair, const std::vector<std::string>& context);

/// Two grader calls, one per metric. `context` defaults to the pair's document.
/// Transport failures and unparseable grades leave that metric ungraded.
QCScore grade_pair(const QAPair& pair, gateway::Client& grader,
                   const std::vector<std::string>& context = {});

/// Retained iff ungraded or min(question, answer) > threshold.
bool passes_threshold(const QCScore& score, double threshold = kDefaultQcThreshold);

struct ScoredPair {
    QAPair pair;
    QCScore score;
};

std::vector<ScoredPair> filter_by_score(const std::vector<ScoredPair>& rows,
                                        double threshold = kDefaultQcThreshold);

struct QCAnnotation {
    std::string question;
    double score = 0.0;
    std::string reason;
};

std::vector<QCAnnotation> load_annotations(const std::filesystem::path& path);

struct MissingPredictions : std::runtime_error {
    std::vector<std::string> questions;
    explicit MissingPredictions(std::vector<std::string> missing);
};

struct GraderMetrics {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    std::optional<double> precision;  // null on 0/0
    std::optional<double> recall;
    ordered_json to_json() const;
};

/// Positive class is "retain" (score > threshold) on both sides. Predictions
/// are keyed by question; an ungraded prediction counts as retained.
/// Throws MissingPredictions listing annotated questions with no prediction.
GraderMetrics grader_metrics(const std::map<std::string, QCScore>& predictions,
                             const std::vector<QCAnnotation>& annotations,
                             double threshold = kDefaultQcThreshold);

struct QCReport {
    std::size_t input = 0;
    std::size_t grounding_failures = 0;
    std::size_t duplicate_removals = 0;
    std::size_t score_removals = 0;
    std::size_t ungraded = 0;
    std::size_t retained = 0;
    double threshold = kDefaultQcThreshold;
    std::string grader_model;
    ordered_json to_json() const;
};

struct RemovedPair {
    QAPair pair;
    std::string reason;  // "grounding", "duplicate_question" or "score"
    std::optional<QCScore> score;
};

struct QCResult {
    std::vector<ScoredPair> retained;
    std::vector<RemovedPair> removed;
    QCReport report;
};

/// Grounding (LLM answers only), then duplicate removal, then grading and the
/// threshold filter. Without a grader the last two steps are skipped and every
/// surviving pair counts as ungraded.
QCResult run_qc(const std::vector<QAPair>& pairs, gateway::Client* grader,
                double threshold = kDefaultQcThreshold, std::size_t workers = 1);

}  // namespace attackqa
