#include "attackqa/qc/qc.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "attackqa/common/json_repair.hpp"
#include "attackqa/common/parallel.hpp"
#include "attackqa/common/text.hpp"
#include "attackqa/qa/parse.hpp"

namespace attackqa {

namespace {

std::string context_block(const QAPair& pair, const std::vector<std::string>& context) {
    const auto& docs = context.empty() ? std::vector<std::string>{pair.document} : context;
    std::string out;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (i > 0) out += "\n\n";
        out += docs[i];
    }
    return out;
}

constexpr std::string_view kGradeFormat =
    "Return only a JSON object of the form {\"score\": <integer from 0 to 10>, \"reason\": "
    "\"<one or two sentences explaining the score>\"}. 10 means no problems were found; deduct "
    "points for each problem.";

ordered_json opt_num(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::optional<double> num_or_null(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<double>();
}

}  // namespace

bool check_grounding(const QAPair& pair) {
    if (pair.human_answer) return true;
    if (!pair.references) return false;
    const auto doc = text::normalize_ws(pair.document);
    for (const auto& r : *pair.references) {
        const auto cite = text::normalize_ws(r.citation);
        if (cite.empty() || doc.find(cite) == std::string::npos) return false;
    }
    return true;
}

DedupResult dedup_questions(const std::vector<QAPair>& pairs) {
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& p : pairs) ++counts[p.question];
    DedupResult out;
    for (const auto& p : pairs) {
        (counts[p.question] > 1 ? out.removed : out.retained).push_back(p);
    }
    return out;
}

std::optional<double> QCScore::combined() const {
    if (!graded()) return std::nullopt;
    return std::min(*question_score, *answer_score);
}

ordered_json QCScore::to_json() const {
    ordered_json j;
    j["question_score"] = opt_num(question_score);
    j["answer_score"] = opt_num(answer_score);
    j["question_reason"] = question_reason;
    j["answer_reason"] = answer_reason;
    j["grader_model"] = grader_model;
    j["error"] = error ? ordered_json(*error) : ordered_json(nullptr);
    return j;
}

QCScore QCScore::from_json(const json& j) {
    QCScore s;
    s.question_score = num_or_null(j, "question_score");
    s.answer_score = num_or_null(j, "answer_score");
    s.question_reason = j.value("question_reason", "");
    s.answer_reason = j.value("answer_reason", "");
    s.grader_model = j.value("grader_model", "");
    s.error = opt_string(j, "error");
    return s;
}

std::optional<Grade> parse_grade(std::string_view completion) {
    auto span = json_repair::outer_span(completion, '{', '}');
    if (!span) return std::nullopt;
    auto j = parse_json_lenient(*span);
    if (!j || !j->is_object()) return std::nullopt;
    auto it = j->find("score");
    if (it == j->end()) return std::nullopt;
    double value = 0.0;
    if (it->is_number()) {
        value = it->get<double>();
    } else if (it->is_string()) {
        const auto s = text::trim(it->get<std::string>());
        if (s.empty() || s.size() > 2 || !std::all_of(s.begin(), s.end(), ::isdigit)) {
            return std::nullopt;
        }
        value = std::stod(s);
    } else {
        return std::nullopt;
    }
    if (value < 0.0 || value > 10.0 || std::floor(value) != value) return std::nullopt;
    Grade g;
    g.score = static_cast<int>(value);
    if (auto r = j->find("reason"); r != j->end() && r->is_string()) g.reason = r->get<std::string>();
    return g;
}

std::string build_question_grade_prompt(const QAPair& pair,
                                        const std::vector<std::string>& context) {
    std::string p =
        "You grade the quality of a question written about a cyber threat intelligence "
        "context.\n\n"
        "Evaluation steps:\n"
        "1. Penalize a question that is ambiguous.\n"
        "2. Penalize a question that does not point at specific topics in the context.\n"
        "3. Penalize a question about topics the context does not contain.\n"
        "4. Penalize a question so broad that it could be answered without the context.\n\n";
    p += kGradeFormat;
    p += "\n\nContext:\n" + context_block(pair, context);
    p += "\n\nQuestion:\n" + pair.question + "\n\nJSON:\n";
    return p;
}

std::string build_answer_grade_prompt(const QAPair& pair, const std::vector<std::string>& context) {
    std::string p =
        "You grade the quality of an answer to a question about a cyber threat intelligence "
        "context.\n\n"
        "Evaluation steps:\n"
        "1. Penalize an answer that does not address the question.\n"
        "2. Penalize an answer that does not draw on the relevant content of the context.\n"
        "3. Penalize an answer that is incomplete.\n"
        "4. Penalize an answer that is vague.\n"
        "5. Penalize an answer that states anything the context does not contain.\n\n";
    p += kGradeFormat;
    p += "\n\nContext:\n" + context_block(pair, context);
    p += "\n\nQuestion:\n" + pair.question;
    p += "\n\nAnswer:\n" + pair.answer + "\n\nJSON:\n";
    return p;
}

QCScore grade_pair(const QAPair& pair, gateway::Client& grader,
                   const std::vector<std::string>& context) {
    QCScore s;
    s.grader_model = grader.config().model;
    std::vector<std::string> problems;
    auto run = [&](const std::string& prompt, std::optional<double>& score, std::string& reason,
                   const char* metric) {
        try {
            auto reply = grader.complete(prompt).text;
            if (auto g = parse_grade(reply)) {
                score = g->score / 10.0;
                reason = g->reason;
            } else {
                problems.push_back(std::string(metric) + ": unparseable grade");
            }
        } catch (const gateway::TransportError& e) {
            problems.push_back(std::string(metric) + ": " + e.what());
        }
    };
    run(build_question_grade_prompt(pair, context), s.question_score, s.question_reason,
        "question");
    run(build_answer_grade_prompt(pair, context), s.answer_score, s.answer_reason, "answer");
    if (!problems.empty()) s.error = text::join(problems, "; ");
    return s;
}

bool passes_threshold(const QCScore& score, double threshold) {
    auto c = score.combined();
    return !c || *c > threshold;
}

std::vector<ScoredPair> filter_by_score(const std::vector<ScoredPair>& rows, double threshold) {
    std::vector<ScoredPair> out;
    for (const auto& r : rows) {
        if (passes_threshold(r.score, threshold)) out.push_back(r);
    }
    return out;
}

std::vector<QCAnnotation> load_annotations(const std::filesystem::path& path) {
    std::vector<QCAnnotation> out;
    for (const auto& row : read_jsonl(path)) {
        out.push_back(QCAnnotation{row.at("question").get<std::string>(),
                                   row.at("score").get<double>(), row.value("reason", "")});
    }
    return out;
}

MissingPredictions::MissingPredictions(std::vector<std::string> missing)
    : std::runtime_error("no prediction for " + std::to_string(missing.size()) +
                         " annotated question(s): " + text::join(missing, " | ")),
      questions(std::move(missing)) {}

ordered_json GraderMetrics::to_json() const {
    ordered_json j;
    j["tp"] = tp;
    j["fp"] = fp;
    j["fn"] = fn;
    j["tn"] = tn;
    j["precision"] = opt_num(precision);
    j["recall"] = opt_num(recall);
    return j;
}

GraderMetrics grader_metrics(const std::map<std::string, QCScore>& predictions,
                             const std::vector<QCAnnotation>& annotations, double threshold) {
    std::vector<std::string> missing;
    for (const auto& a : annotations) {
        if (!predictions.count(a.question)) missing.push_back(a.question);
    }
    if (!missing.empty()) throw MissingPredictions(std::move(missing));

    GraderMetrics m;
    for (const auto& a : annotations) {
        const bool predicted = passes_threshold(predictions.at(a.question), threshold);
        const bool actual = a.score > threshold;
        if (predicted && actual) ++m.tp;
        if (predicted && !actual) ++m.fp;
        if (!predicted && actual) ++m.fn;
        if (!predicted && !actual) ++m.tn;
    }
    if (m.tp + m.fp > 0) m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
    if (m.tp + m.fn > 0) m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    return m;
}

ordered_json QCReport::to_json() const {
    ordered_json j;
    j["input"] = input;
    j["grounding_failures"] = grounding_failures;
    j["duplicate_removals"] = duplicate_removals;
    j["score_removals"] = score_removals;
    j["ungraded"] = ungraded;
    j["retained"] = retained;
    j["threshold"] = threshold;
    j["grader_model"] = grader_model;
    return j;
}

QCResult run_qc(const std::vector<QAPair>& pairs, gateway::Client* grader, double threshold,
                std::size_t workers) {
    QCResult out;
    auto& report = out.report;
    report.input = pairs.size();
    report.threshold = threshold;
    if (grader) report.grader_model = grader->config().model;

    std::vector<QAPair> grounded;
    for (const auto& p : pairs) {
        if (check_grounding(p)) {
            grounded.push_back(p);
        } else {
            out.removed.push_back(RemovedPair{p, "grounding", std::nullopt});
            ++report.grounding_failures;
        }
    }

    auto dedup = dedup_questions(grounded);
    report.duplicate_removals = dedup.removed.size();
    for (auto& p : dedup.removed) {
        out.removed.push_back(RemovedPair{std::move(p), "duplicate_question", std::nullopt});
    }

    std::vector<QCScore> scores(dedup.retained.size());
    if (grader) {
        bounded_for_each(dedup.retained.size(), workers, [&](std::size_t i) {
            scores[i] = grade_pair(dedup.retained[i], *grader);
        });
    } else {
        for (auto& s : scores) s.error = "no grader configured";
    }

    for (std::size_t i = 0; i < scores.size(); ++i) {
        auto& p = dedup.retained[i];
        if (!scores[i].graded()) ++report.ungraded;
        if (passes_threshold(scores[i], threshold)) {
            out.retained.push_back(ScoredPair{std::move(p), std::move(scores[i])});
        } else {
            ++report.score_removals;
            out.removed.push_back(RemovedPair{std::move(p), "score", std::move(scores[i])});
        }
    }
    report.retained = out.retained.size();
    return out;
}

}  // namespace attackqa
