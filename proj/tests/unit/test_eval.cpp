#include <doctest.h>

#include "attackqa/cli/mock_models.hpp"
#include "attackqa/eval/eval.hpp"
#include "fixtures.hpp"

using namespace attackqa;

namespace {

EvalRecord record(bool parse_ok, bool hit, bool refusal, std::optional<double> judge) {
    EvalRecord r;
    r.question = "q";
    r.parse_ok = parse_ok;
    if (hit) r.golden_rank = 1;
    r.refusal = refusal;
    r.judge_score = judge;
    return r;
}

// Ten records with hand-computed aggregates. golden ids g1..g10, urls u1..u10,
// golden ranks within k=3; retrieved lists run to 5.
std::vector<EvalRecord> hand_records() {
    struct Row {
        bool parse_ok;
        std::optional<std::size_t> rank;  // position in retrieved_ids, 1-based
        bool refusal;
        std::vector<std::string> refs;  // "U" stands for the golden url
        std::optional<double> judge;
        const char* error;
    };
    const std::vector<Row> rows = {
        {true, 1, false, {"U"}, 1.0, nullptr},
        {true, 2, false, {"U"}, 0.5, nullptr},
        {true, 3, false, {"other"}, 0.0, nullptr},
        {true, 1, false, {"x", "U"}, 0.8, nullptr},
        {false, 1, false, {}, std::nullopt, "unparseable completion: schema"},
        {false, 2, false, {}, std::nullopt, "generation failed: 503"},
        {true, 5, true, {}, 0.0, nullptr},
        {true, std::nullopt, true, {}, std::nullopt, nullptr},
        {true, 3, false, {"U"}, std::nullopt, nullptr},
        {true, std::nullopt, false, {"U"}, 0.2, nullptr},
    };
    std::vector<EvalRecord> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        EvalRecord r;
        const auto n = std::to_string(i + 1);
        r.question = "question " + n;
        r.true_answer = "answer " + n;
        r.golden_url = "u" + n;
        r.golden_doc_id = "g" + n;
        for (std::size_t pos = 1; pos <= 5; ++pos) {
            r.retrieved_ids.push_back(row.rank == pos ? r.golden_doc_id : "o" + n + "_" + std::to_string(pos));
        }
        if (row.rank && *row.rank <= 3) r.golden_rank = row.rank;
        r.parse_ok = row.parse_ok;
        r.refusal = row.refusal;
        for (const auto& ref : row.refs) r.references.push_back(ref == "U" ? r.golden_url : ref);
        r.judge_score = row.judge;
        if (row.error) r.error = row.error;
        if (r.parse_ok) r.answer = "generated " + n;
        const auto s = score_record(r);
        r.soft_score = s.soft;
        r.hard_score = s.hard;
        out.push_back(std::move(r));
    }
    return out;
}

gateway::EndpointConfig mock_cfg(const std::string& role) {
    gateway::EndpointConfig cfg;
    cfg.role = role;
    cfg.base_url = "mock";
    cfg.model = "mock-" + role;
    cfg.max_retries = 0;
    cfg.backoff_ms = 0;
    return cfg;
}

gateway::Client responder_client(const std::string& role, gateway::Responder responder) {
    return gateway::Client(mock_cfg(role), std::make_shared<gateway::MockBackend>(
                                               gateway::MockScript{}, std::move(responder), 16));
}

}  // namespace

TEST_CASE("score_record over every combination") {
    for (bool parse_ok : {false, true}) {
        for (bool hit : {false, true}) {
            for (bool refusal : {false, true}) {
                for (std::optional<double> judge : {std::optional<double>{}, std::optional<double>{0.0},
                                                    std::optional<double>{0.6}}) {
                    CAPTURE(parse_ok);
                    CAPTURE(hit);
                    CAPTURE(refusal);
                    CAPTURE(judge.value_or(-1));
                    const auto s = score_record(record(parse_ok, hit, refusal, judge));
                    if (!parse_ok) {
                        CHECK(s.soft == 0.0);
                        CHECK(s.hard == 0.0);
                        continue;
                    }
                    CHECK(s.hard == judge);
                    if (!hit && refusal) {
                        CHECK(s.soft == 1.0);
                    } else {
                        CHECK(s.soft == judge);
                    }
                }
            }
        }
    }
}

TEST_CASE("reference correctness is exact membership") {
    auto r = record(true, true, false, 1.0);
    r.golden_url = "https://attack.mitre.org/techniques/T1539";
    r.references = {"https://attack.mitre.org/techniques/T1539/"};
    CHECK_FALSE(reference_correct(r));
    r.references.push_back("https://attack.mitre.org/techniques/T1539");
    CHECK(reference_correct(r));
    r.parse_ok = false;
    CHECK_FALSE(reference_correct(r));
}

TEST_CASE("aggregate over the hand fixture") {
    const auto records = hand_records();
    const auto rep = aggregate_report(records, 3, {1, 3, 5}, "emb", "gen", "jdg");
    CHECK(rep.records == 10);
    CHECK(rep.misses == 3);
    CHECK(rep.refusals == 2);
    CHECK(rep.parse_failures == 2);
    CHECK(rep.transport_failures == 1);
    CHECK(rep.judge_nulls == 2);
    CHECK(rep.context_recall == doctest::Approx(70.0));
    CHECK(rep.parse_success == doctest::Approx(80.0));
    CHECK(rep.correct_reference == doctest::Approx(62.5));
    REQUIRE(rep.mean_soft.has_value());
    CHECK(*rep.mean_soft == doctest::Approx(50.0));  // 4.5 over 9 scored
    REQUIRE(rep.mean_hard.has_value());
    CHECK(*rep.mean_hard == doctest::Approx(31.25));  // 2.5 over 8 scored
    REQUIRE(rep.recall_at.size() == 3);
    CHECK(rep.recall_at[0].hits == 3);
    CHECK(rep.recall_at[1].hits == 7);
    CHECK(rep.recall_at[2].hits == 8);
    CHECK(rep.recall_at[2].n == 10);

    const auto md = rep.to_markdown();
    CHECK(md.find("| % Context Recall at k=3 | 70.00 |") != std::string::npos);
    CHECK(md.find("| % Mean Correctness (hard) | 31.25 |") != std::string::npos);
    CHECK(md.find("| 5 | 80.00 |") != std::string::npos);

    const auto j = rep.to_json();
    CHECK(j["table"]["correct_reference"].get<double>() == doctest::Approx(62.5));
    CHECK(j["counts"]["judge_nulls"] == 2);
    CHECK(j["config"]["k"] == 3);
}

TEST_CASE("reports recompute from persisted records") {
    EvalRun run;
    run.records = hand_records();
    run.report = aggregate_report(run.records, 3, {1, 3, 5}, "emb", "gen", "jdg");
    attackqa::testing::TempDir dir("eval_out");
    write_eval_outputs(run, dir.path());

    std::vector<EvalRecord> loaded;
    for (const auto& j : read_jsonl(dir.path() / "eval_records.jsonl")) loaded.push_back(EvalRecord::from_json(j));
    REQUIRE(loaded.size() == run.records.size());
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        CHECK(loaded[i].to_json() == run.records[i].to_json());
    }
    const auto again = aggregate_report(loaded, 3, {1, 3, 5}, "emb", "gen", "jdg");
    CHECK(again.to_json().dump(2) + "\n" == read_file(dir.path() / "report.json"));
    CHECK(again.to_markdown() == read_file(dir.path() / "report.md"));
}

TEST_CASE("empty and all-unscored aggregates") {
    const auto rep = aggregate_report({}, 5, {1, 5}, "e", "g", "j");
    CHECK(rep.records == 0);
    CHECK(rep.context_recall == 0.0);
    CHECK_FALSE(rep.mean_soft.has_value());
    CHECK(rep.recall_at.empty());
    CHECK(rep.to_json()["table"]["mean_correctness_soft"].is_null());
    CHECK(rep.to_markdown().find("n/a") != std::string::npos);
}

TEST_CASE("judge prompt and verdict parsing") {
    const auto p = build_judge_prompt("Which tactic?", "Credential Access", "Collection");
    CHECK(p.rfind("You judge whether", 0) == 0);
    CHECK(p.find("Question:\nWhich tactic?\n\n") != std::string::npos);
    CHECK(p.find("True answer:\nCredential Access\n\n") != std::string::npos);
    CHECK(p.find("Generated answer:\nCollection\n\nJSON:\n") != std::string::npos);
    CHECK(p.find("True answer") < p.find("Generated answer"));

    auto scored = responder_client("judge", [](const std::string&) -> std::optional<std::string> {
        return R"({"score": 7, "reason": "close"})";
    });
    auto v = judge_answer("q", "t", "g", scored);
    REQUIRE(v.score.has_value());
    CHECK(*v.score == doctest::Approx(0.7));
    CHECK(v.reason == "close");

    auto prose = responder_client("judge", [](const std::string&) -> std::optional<std::string> {
        return "looks fine to me";
    });
    v = judge_answer("q", "t", "g", prose);
    CHECK_FALSE(v.score.has_value());
    CHECK(v.reason == "unparseable grade");

    auto down = responder_client("judge", [](const std::string&) -> std::optional<std::string> {
        return std::nullopt;
    });
    v = judge_answer("q", "t", "g", down);
    CHECK_FALSE(v.score.has_value());
    CHECK(v.reason.rfind("judge unavailable", 0) == 0);
}

TEST_CASE("run_eval with mock models reaches the ceiling and ignores worker count") {
    const auto& docs = attackqa::testing::fixture_corpus().docs;
    std::vector<QAPair> pairs;
    std::unordered_map<std::string, std::string> oracle;
    for (std::size_t i = 0; i < docs.size(); i += 9) {
        auto p = pair_for_document(docs[i]);
        p.question = "evaluation question " + std::to_string(i);
        p.document = docs[i].text();
        p.answer = docs[i].body.substr(0, 40);
        oracle[p.question] = p.document;
        pairs.push_back(p);
    }
    auto cfg = mock_cfg("embedder");
    cfg.dimension = 16;
    gateway::Client embedder(cfg, std::make_shared<gateway::MockBackend>(gateway::MockScript{}, nullptr, 16, oracle));
    auto generator = responder_client("generator", mock_model_response);
    auto judge = responder_client("judge", mock_model_response);
    const auto index = build_index(docs, embedder);

    const auto one = run_eval(pairs, index, embedder, generator, judge, 5, {1, 5, 10}, 1);
    const auto four = run_eval(pairs, index, embedder, generator, judge, 5, {1, 5, 10}, 4);
    CHECK(one.report.to_json() == four.report.to_json());
    for (std::size_t i = 0; i < pairs.size(); ++i) CHECK(one.records[i].to_json() == four.records[i].to_json());

    const auto& rep = one.report;
    CHECK(rep.records == pairs.size());
    CHECK(rep.context_recall == 100.0);
    CHECK(rep.parse_success == 100.0);
    CHECK(rep.correct_reference == 100.0);
    CHECK(rep.mean_soft == 100.0);
    CHECK(rep.mean_hard == 100.0);
    CHECK(rep.generator == "mock-generator");
    for (const auto& r : one.records) {
        CHECK(r.golden_rank == 1);
        CHECK(r.retrieved_ids.size() == 10);
    }

    CHECK_THROWS_AS(run_eval({}, index, embedder, generator, judge), std::invalid_argument);
    CHECK_THROWS_AS(run_eval(pairs, index, embedder, generator, judge, 0), std::invalid_argument);
}

TEST_CASE("transport failures score zero instead of aborting") {
    const auto& docs = attackqa::testing::fixture_corpus().docs;
    auto p = pair_for_document(docs[0]);
    p.question = "q";
    p.document = docs[0].text();
    p.answer = "a";
    auto cfg = mock_cfg("embedder");
    cfg.dimension = 16;
    gateway::Client embedder(cfg, std::make_shared<gateway::MockBackend>(gateway::MockScript{}, nullptr, 16));
    auto down = responder_client("generator", [](const std::string&) -> std::optional<std::string> {
        return std::nullopt;
    });
    auto judge = responder_client("judge", mock_model_response);
    const auto index = build_index(docs, embedder);
    const auto run = run_eval({p}, index, embedder, down, judge, 5, {5});
    REQUIRE(run.records.size() == 1);
    CHECK_FALSE(run.records[0].parse_ok);
    CHECK(run.records[0].soft_score == 0.0);
    CHECK(run.records[0].hard_score == 0.0);
    CHECK(run.report.transport_failures == 1);

    auto stray = p;
    stray.document = "not indexed";
    const auto missing = run_eval({stray}, index, embedder, down, judge, 5, {5});
    CHECK(missing.records[0].error == "golden document not in index");
}
