#include <doctest.h>

#include "attackqa/common/hash.hpp"
#include "attackqa/common/text.hpp"
#include "attackqa/gateway/client.hpp"
#include "attackqa/qa/generator.hpp"
#include "attackqa/qa/parse.hpp"
#include "attackqa/qa/prompts.hpp"
#include "attackqa/qa/templates.hpp"
#include "fixtures.hpp"

using namespace attackqa;
using attackqa::testing::doc_with_header;
using attackqa::testing::fixture_corpus;
using attackqa::testing::read_fixture;

namespace {

const std::string kAkira = "Description of attack group 'G1024: Akira':";
const std::string kTajMahalAudio =
    "How attack software 'S0467: TajMahal' uses attack technique 'T1123: Audio Capture':";
const std::string kCampaignsT1562 =
    "The campaigns that used attack technique 'T1562.001: Disable or Modify Tools' were:";

std::shared_ptr<gateway::Client> mock_client(gateway::Responder responder) {
    gateway::EndpointConfig cfg;
    cfg.role = "generator";
    cfg.base_url = "mock";
    cfg.max_retries = 0;
    return gateway::make_client(cfg, std::move(responder));
}

}  // namespace

TEST_CASE("docgen prompt matches the golden template and the Akira example") {
    CHECK(build_docgen_prompt("", "") == read_fixture("golden/prompts/docgen_template.txt"));
    const auto& akira = doc_with_header(kAkira);
    CHECK(build_docgen_prompt(akira.text(), SetCount::Three) ==
          read_fixture("golden/prompts/docgen_akira_three_sets.txt"));
}

TEST_CASE("docgen prompt count phrase") {
    const auto one = build_docgen_prompt("doc", SetCount::One);
    CHECK(one.find("Instruction:\n            Generate one set\n") != std::string::npos);
    const auto two = build_docgen_prompt("doc", SetCount::Two);
    CHECK(two.find("Generate two sets\n") != std::string::npos);
    CHECK(text::replace_all(two, "two sets", "one set") == one);
    CHECK(choose_set_count(0) == SetCount::One);
    CHECK(choose_set_count(79) == SetCount::One);
    CHECK(choose_set_count(80) == SetCount::Two);
    CHECK(choose_set_count(250) == SetCount::Two);
    CHECK(choose_set_count(251) == SetCount::Three);
}

TEST_CASE("templated prompt carries the question and omits the question field") {
    const auto p = build_templated_prompt("Some document.", "Describe X");
    CHECK(p.find("Document:\n            Some document.\n            Question:\n            "
                  "Describe X\n            Instruction:\n            Generate one set\n") !=
          std::string::npos);
    CHECK(p.find("\"question\": \"<generated question>\"") == std::string::npos);
    CHECK(p.find("\"thought\": \"<generated thought") != std::string::npos);
}

TEST_CASE("summary QA for campaigns using a technique") {
    const auto& doc = doc_with_header(kCampaignsT1562);
    const auto p = gen_summary_qa(doc);
    CHECK(p.question == "What campaigns used attack technique 'T1562.001: Disable or Modify Tools'?");
    CHECK(p.thought ==
          "To answer the question, I need to know what campaigns used attack technique "
          "'T1562.001: Disable or Modify Tools'");
    CHECK(p.answer ==
          "The campaigns that used attack technique 'T1562.001: Disable or Modify Tools' were: "
          "'C0002: Night Dragon', 'C0024: SolarWinds Compromise', 'C0028: 2015 Ukraine Electric "
          "Power Attack', 'C0029: Cutting Edge'");
    CHECK(p.document == p.answer);
    CHECK(p.subject_id == "T1562.001");
    CHECK(p.url == "https://attack.mitre.org/techniques/T1562/001");
    CHECK(p.source == "relationships_campaigns_for_technique");
    CHECK_FALSE(p.references.has_value());
    CHECK(p.human_question);
    CHECK(p.human_answer);
    CHECK_FALSE(p.field.has_value());
    CHECK_FALSE(p.relation_id.has_value());
}

TEST_CASE("summary QA for tactics of a technique") {
    const auto& doc =
        doc_with_header("Tactics used in attack technique 'T1539: Steal Web Session Cookie':");
    const auto p = gen_summary_qa(doc);
    CHECK(p.question == "What tactics are used in attack technique 'T1539: Steal Web Session Cookie'?");
    CHECK(p.answer ==
          "Tactics used in attack technique 'T1539: Steal Web Session Cookie': Credential Access");
    CHECK(p.url == "https://attack.mitre.org/techniques/T1539");
}

TEST_CASE("summary QA rejects other documents") {
    CHECK_THROWS_AS(gen_summary_qa(doc_with_header(kAkira)), std::invalid_argument);
}

TEST_CASE("templated questions") {
    CHECK(gen_templated_question(doc_with_header(kTajMahalAudio)) ==
          "How does attack software 'S0467: TajMahal' use attack technique 'T1123: Audio Capture'?");
    CHECK(gen_templated_question(doc_with_header(kAkira)) == "Describe attack group 'G1024: Akira'");
    CHECK(gen_templated_question(doc_with_header(
              "How data component 'Process Access' can be used to detect attack technique "
              "'T1539: Steal Web Session Cookie':")) ==
          "How can data component 'Process Access' detect attack technique 'T1539: Steal Web "
          "Session Cookie'?");
    CHECK_FALSE(gen_templated_question(doc_with_header(kCampaignsT1562)).has_value());
}

TEST_CASE("parse_qa_completion accepts clean and wrapped lists") {
    const std::string body =
        R"([{"question": "Q?", "thought": "To answer the question, I need x.", "answer": "A.", "references": ["r1", "r2"]}])";
    auto p = parse_qa_completion(body);
    REQUIRE(p.ok());
    REQUIRE(p.entries.size() == 1);
    CHECK(p.entries[0] == GeneratedEntry{"Q?", "To answer the question, I need x.", "A.", {"r1", "r2"}});
    CHECK_FALSE(p.repaired);

    auto wrapped = parse_qa_completion("Here you go:\n" + body + "\nDone.");
    REQUIRE(wrapped.ok());
    CHECK(wrapped.entries == p.entries);
}

TEST_CASE("parse_qa_completion repairs backslashes and raw newlines") {
    auto p = parse_qa_completion(
        R"([{"question": "Where is C:\Windows\Temp used?", "thought": "t", "answer": "In C:\Windows\Temp", "references": []}])");
    REQUIRE(p.ok());
    CHECK(p.repaired);
    CHECK(p.entries[0].question == "Where is C:\\Windows\\Temp used?");

    auto nl = parse_qa_completion("[{\"question\": \"Q\", \"thought\": \"t\", \"answer\": \"line1\nline2\", \"references\": []}]");
    REQUIRE(nl.ok());
    CHECK(nl.repaired);
    CHECK(nl.entries[0].answer == "line1\nline2");

    auto unicode = parse_qa_completion(R"([{"question": "\u0041?", "thought": "t", "answer": "a", "references": []}])");
    REQUIRE(unicode.ok());
    CHECK_FALSE(unicode.repaired);
    CHECK(unicode.entries[0].question == "A?");
}

TEST_CASE("parse_qa_completion failures") {
    CHECK_FALSE(parse_qa_completion("no json here").ok());
    CHECK_FALSE(parse_qa_completion("[1, 2]").ok());
    CHECK_FALSE(parse_qa_completion(R"([{"thought": "t", "answer": "a", "references": []}])").ok());
    CHECK(parse_qa_completion(R"([{"thought": "t", "answer": "a", "references": []}])", false).ok());
    CHECK_FALSE(parse_qa_completion(R"([{"question": "q", "thought": "t", "answer": "a", "references": "r"}])").ok());
    CHECK_FALSE(parse_qa_completion(R"([{"question": "q", "thought": "t", "answer": 3, "references": []}])").ok());
    CHECK_FALSE(parse_qa_completion("[{\"question\": \"unterminated").ok());
}

TEST_CASE("templated generation reproduces the TajMahal audio capture entry") {
    const auto& doc = doc_with_header(kTajMahalAudio);
    const std::string citation =
        "TajMahal has the ability to capture VoiceIP application audio on an infected host.";
    std::string seen_prompt;
    auto client = mock_client([&](const std::string& prompt) -> std::optional<std::string> {
        seen_prompt = prompt;
        ordered_json entry{{"thought",
                            "To answer the question, I need to understand how TajMahal, an attack "
                            "software, utilizes the 'T1123: Audio Capture' technique."},
                           {"answer", citation},
                           {"references", {citation, citation}}};
        return ordered_json::array({entry}).dump();
    });
    auto result = generate_from_document(doc, client.get(), GenMode::TemplatedQuestion);
    CHECK(seen_prompt == build_templated_prompt(doc.text(), "How does attack software 'S0467: "
                                                            "TajMahal' use attack technique "
                                                            "'T1123: Audio Capture'?"));
    REQUIRE(result.pairs.size() == 1);
    const auto& p = result.pairs[0];
    CHECK(p.question ==
          "How does attack software 'S0467: TajMahal' use attack technique 'T1123: Audio Capture'?");
    CHECK(p.answer == citation);
    CHECK(p.document == doc.text());
    CHECK(p.subject_id == "T1123");
    CHECK(p.subject_name == "Audio Capture");
    CHECK(p.subject_type == "techniques");
    CHECK(p.url == "https://attack.mitre.org/techniques/T1123");
    CHECK(p.source == "relationships_uses_software");
    CHECK(p.relation_id == std::optional<std::string>("S0467"));
    CHECK(p.relation_name == std::optional<std::string>("TajMahal"));
    REQUIRE(p.references.has_value());
    REQUIRE(p.references->size() == 2);
    CHECK((*p.references)[0] ==
          Reference{"T1123/TajMahal: https://attack.mitre.org/techniques/T1123", citation});
    CHECK(p.human_question);
    CHECK_FALSE(p.human_answer);
    CHECK(result.report.parse_successes == 1);
    CHECK(result.report.pairs_per_mode.at("human_question_llm_answer") == 1);
}

TEST_CASE("free generation reproduces the Akira entry") {
    const auto& doc = doc_with_header(kAkira);
    const std::string citation =
        "Akira uses compromised credentials to access single-factor external access mechanisms "
        "such as VPNs for initial access";
    auto client = mock_client([&](const std::string&) -> std::optional<std::string> {
        ordered_json entry{{"question", "How does Akira initially access victim environments?"},
                           {"thought",
                            "To answer the question, I need to understand the initial access "
                            "mechanism used by Akira as described in the document."},
                           {"answer", citation},
                           {"references", {citation}}};
        return ordered_json::array({entry}).dump();
    });
    auto result = generate_from_document(doc, client.get(), GenMode::Free);
    REQUIRE(result.pairs.size() == 1);
    const auto& p = result.pairs[0];
    CHECK(p.question == "How does Akira initially access victim environments?");
    CHECK(p.subject_id == "G1024");
    CHECK(p.subject_name == "Akira");
    CHECK(p.subject_type == "groups");
    CHECK(p.url == "https://attack.mitre.org/groups/G1024");
    CHECK(p.source == "groups");
    CHECK(p.field == std::optional<std::string>("description"));
    REQUIRE(p.references.has_value());
    CHECK((*p.references)[0] ==
          Reference{"groups/G1024/description: https://attack.mitre.org/groups/G1024", citation});
    CHECK_FALSE(p.human_question);
    CHECK_FALSE(p.human_answer);
}

TEST_CASE("malformed and failed completions are counted, not thrown") {
    const auto& doc = doc_with_header(kAkira);
    auto prose = mock_client([](const std::string&) { return std::optional<std::string>("Sure! Akira is a group."); });
    auto r1 = generate_from_document(doc, prose.get(), GenMode::Free);
    CHECK(r1.pairs.empty());
    CHECK(r1.report.parse_failures == 1);
    CHECK(r1.report.transport_failures == 0);
    CHECK(r1.report.parse_success_rate() == 0.0);

    auto down = mock_client([](const std::string&) { return std::optional<std::string>(); });
    auto r2 = generate_from_document(doc, down.get(), GenMode::Free);
    CHECK(r2.pairs.empty());
    CHECK(r2.report.parse_failures == 1);
    CHECK(r2.report.transport_failures == 1);
    CHECK(r2.report.failure_reasons.at("transport") == 1);

    auto empty_q = mock_client([](const std::string&) {
        return std::optional<std::string>(
            R"([{"question": " ", "thought": "Thinking", "answer": "a", "references": []}])");
    });
    auto r3 = generate_from_document(doc, empty_q.get(), GenMode::Free);
    CHECK(r3.pairs.empty());
    CHECK(r3.report.dropped_entries == 1);
}

TEST_CASE("generate_dataset routes documents by source and keeps corpus order") {
    const auto& corpus = fixture_corpus().docs;
    auto client = mock_client([](const std::string& prompt) -> std::optional<std::string> {
        ordered_json entry{{"question", "Q " + fingerprint(prompt)},
                           {"thought", "To answer the question, I need it."},
                           {"answer", "A"},
                           {"references", ordered_json::array()}};
        return ordered_json::array({entry}).dump();
    });
    auto serial = generate_dataset(corpus, client.get(), 1);
    auto parallel = generate_dataset(corpus, client.get(), 8);
    CHECK(serial.pairs == parallel.pairs);
    CHECK(serial.report.docs_processed == corpus.size());

    std::size_t summaries = 0;
    for (const auto& p : serial.pairs) summaries += p.human_answer ? 1 : 0;
    CHECK(summaries == fixture_corpus().report.summary_docs);
    CHECK(serial.report.pairs_per_mode.at("human_question_human_answer") == summaries);
    CHECK(serial.report.pairs_per_mode.at("llm_question_llm_answer") ==
          corpus.size() - fixture_corpus().report.summary_docs);
}
