#include <doctest.h>

#include <set>

#include "attackqa/ingest/stix.hpp"
#include "attackqa/ingest/tabular.hpp"
#include "attackqa/ingest/validate.hpp"
#include "fixtures.hpp"

using namespace attackqa;
using attackqa::testing::fixture_kb;
using attackqa::testing::read_fixture;

TEST_CASE("empty bundle gives empty tables and no version") {
    auto parsed = parse_bundle(R"({"objects": []})");
    CHECK(parsed.kb.entity_count() == 0);
    CHECK(parsed.kb.relationships.empty());
    CHECK_FALSE(parsed.kb.version.has_value());
}

TEST_CASE("minimal bundle yields exactly its rows") {
    const auto parsed = parse_bundle(read_fixture("fixtures/stix/minimal.json"));
    const auto& kb = parsed.kb;

    const auto& techniques = kb.table(Category::Techniques);
    REQUIRE(techniques.size() == 2);
    CHECK(techniques[0].id == "T1001");
    CHECK(techniques[0].name == "Data Obfuscation");
    CHECK(techniques[0].description ==
          "Adversaries may obfuscate command and control traffic.(Citation: Example Report)");
    CHECK(techniques[0].url == "https://attack.mitre.org/techniques/T1001");
    CHECK(techniques[0].extras.at("platforms") == "Linux, Windows");
    CHECK(techniques[0].extras.at("tactics") == "command-and-control");
    CHECK(techniques[1].id == "T1001.001");
    CHECK(techniques[1].name == "Data Obfuscation: Junk Data");
    CHECK(techniques[1].url == "https://attack.mitre.org/techniques/T1001/001");

    const auto& software = kb.table(Category::Software);
    REQUIRE(software.size() == 1);
    CHECK(software[0].id == "S9001");
    CHECK(software[0].name == "Sample Loader");
    CHECK(software[0].extras.at("type") == "malware");
    CHECK(software[0].extras.at("aliases") == "Sample Loader, SLoad");

    for (auto c : {Category::Tactics, Category::Groups, Category::Campaigns,
                   Category::Mitigations}) {
        CHECK(kb.table(c).empty());
    }

    REQUIRE(kb.relationships.size() == 1);
    const auto& r = kb.relationships[0];
    CHECK(r.source_id == "S9001");
    CHECK(r.source_name == "Sample Loader");
    CHECK(r.source_type == "software");
    CHECK(r.mapping_type == "uses");
    CHECK(r.target_id == "T1001.001");
    CHECK(r.target_name == "Junk Data");
    CHECK(r.target_type == "technique");
    CHECK(r.mapping_description ==
          "[Sample Loader](https://attack.mitre.org/software/S9001) pads its traffic with random "
          "bytes.(Citation: Example Report)");

    CHECK(parsed.stats.entities_per_category.at("techniques") == 2);
    CHECK(parsed.stats.entities_per_category.at("software") == 1);
    CHECK(parsed.stats.relationships == 1);
}

TEST_CASE("mixed bundle excludes, skips and counts") {
    const auto parsed = parse_bundle(read_fixture("fixtures/stix/mixed.json"));
    const auto& kb = parsed.kb;
    const auto& st = parsed.stats;

    CHECK(kb.version == "15.1");
    CHECK(st.deprecated_or_revoked == 2);
    CHECK(st.skipped_types.at("identity") == 1);
    CHECK(st.skipped_types.at("marking-definition") == 1);
    CHECK(st.skipped_relationship_types.at("subtechnique-of") == 1);
    CHECK(st.skipped_relationship_types.at("revoked-by") == 1);
    CHECK(st.relationships_to_excluded == 2);
    CHECK(st.unresolvable_endpoints == 1);

    // The newer revision of a duplicated STIX object wins.
    REQUIRE(kb.find(Category::Techniques, "T1001") != nullptr);
    CHECK(kb.find(Category::Techniques, "T1001")->name == "Data Obfuscation");
    CHECK(kb.find(Category::Techniques, "T1999") == nullptr);
    CHECK(kb.find(Category::Software, "S9002") == nullptr);
    CHECK(kb.find(Category::Techniques, "T1001")->extras.at("tactics") == "Command and Control");

    std::set<std::string> mappings;
    for (const auto& r : kb.relationships) mappings.insert(r.mapping_type);
    CHECK(mappings == std::set<std::string>{"attributed-to", "detects", "mitigates", "uses"});

    bool saw_detects = false;
    for (const auto& r : kb.relationships) {
        if (r.mapping_type == "detects") {
            saw_detects = true;
            CHECK(r.source_id.empty());
            CHECK(r.source_name == "Network Traffic Content");
            CHECK(r.source_type == "data component");
        }
        if (r.mapping_type == "mitigates") CHECK(r.source_type == "mitigation");
    }
    CHECK(saw_detects);

    // Unresolvable endpoints are kept and flagged by validation.
    const auto report = validate(kb);
    CHECK(report.count(FindingKind::UnresolvableEndpoint) == 1);
}

TEST_CASE("malformed JSON reports a byte offset") {
    const auto raw = read_fixture("fixtures/stix/malformed.json");
    try {
        parse_bundle(raw);
        FAIL("expected a parse error");
    } catch (const StixParseError& e) {
        CHECK(e.byte_offset > 0);
        CHECK(e.byte_offset <= raw.size());
        CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_bundle(R"({"type": "bundle"})"), StixParseError);
}

TEST_CASE("parsing is deterministic and independent of object order") {
    const auto raw = read_fixture("fixtures/stix/mixed.json");
    auto doc = json::parse(raw);
    auto reversed = doc;
    std::reverse(reversed["objects"].begin(), reversed["objects"].end());
    CHECK(parse_bundle(raw).kb == parse_bundle(raw).kb);
    CHECK(parse_bundle(doc.dump()).kb == parse_bundle(reversed.dump()).kb);
}

TEST_CASE("tabular fixture loads both csv and jsonl tables") {
    const auto& kb = fixture_kb();
    CHECK(kb.version == "fixture-1");
    CHECK(kb.table(Category::Techniques).size() == 13);
    CHECK(kb.table(Category::Tactics).size() == 6);
    CHECK(kb.table(Category::Software).size() == 11);
    CHECK(kb.table(Category::Groups).size() == 3);
    CHECK(kb.table(Category::Campaigns).size() == 6);
    CHECK(kb.table(Category::Mitigations).size() == 3);
    CHECK(kb.relationships.size() == 28);

    const auto* s = kb.find(Category::Software, "S0066");
    REQUIRE(s != nullptr);
    CHECK(s->name == "3PARA RAT");
    CHECK(s->extras.at("platforms") == "Windows");
    CHECK(s->extras.at("type") == "malware");
    CHECK(s->extras.count("aliases") == 0);  // blank CSV cell
    CHECK(s->extras.count("contributors") == 0);
}

TEST_CASE("category partition") {
    const auto& kb = fixture_kb();
    std::size_t sum = 0;
    std::set<std::pair<std::string, std::string>> seen;
    for (auto c : kAllCategories) {
        sum += kb.table(c).size();
        for (const auto& e : kb.table(c)) {
            CHECK(e.category == c);
            seen.emplace(std::string(category_name(c)), e.id);
        }
    }
    CHECK(sum == kb.entity_count());
    CHECK(seen.size() == sum);
}

TEST_CASE("export then load round-trips") {
    attackqa::testing::TempDir dir("roundtrip");
    export_tabular(fixture_kb(), dir.path());
    CHECK(load_tabular(dir.path()) == fixture_kb());

    const auto parsed = parse_bundle(read_fixture("fixtures/stix/mixed.json"));
    attackqa::testing::TempDir dir2("roundtrip-stix");
    export_tabular(parsed.kb, dir2.path());
    CHECK(load_tabular(dir2.path()) == parsed.kb);
}

TEST_CASE("validate on a clean fixture") {
    CHECK(validate(fixture_kb()).clean());
}

TEST_CASE("validate flags constructed defects") {
    KnowledgeBase kb = fixture_kb();
    SUBCASE("unresolvable endpoint") {
        kb.relationships.push_back(Relationship{"S0467", "TajMahal", "software", "uses", "T9999",
                                                "Missing", "technique", "x"});
        const auto report = validate(kb);
        CHECK(report.findings.size() == 1);
        CHECK(report.count(FindingKind::UnresolvableEndpoint) == 1);
        CHECK(report.findings[0].id == "T9999");
    }
    SUBCASE("duplicate id") {
        Entity a{"S0001", "One", "first", "https://attack.mitre.org/software/S0001",
                 Category::Software, {}};
        Entity b = a;
        b.name = "Other";
        kb.table(Category::Software).push_back(a);
        kb.table(Category::Software).push_back(b);
        const auto before = kb;
        const auto report = validate(kb);
        CHECK(report.findings.size() == 1);
        CHECK(report.count(FindingKind::DuplicateId) == 1);
        CHECK(kb == before);
    }
    SUBCASE("empty description and malformed url") {
        kb.table(Category::Groups).push_back(
            Entity{"G9999", "Nobody", "  ", "http://example.com/x", Category::Groups, {}});
        const auto report = validate(kb);
        CHECK(report.count(FindingKind::EmptyDescription) == 1);
        CHECK(report.count(FindingKind::MalformedUrl) == 1);
    }
}

TEST_CASE("csv parser handles quoting") {
    const auto rows = parse_csv("\xEF\xBB\xBF" "a,b,c\n\"x, y\",\"he said \"\"hi\"\"\",\"multi\nline\"\r\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"a", "b", "c"});
    CHECK(rows[1] == std::vector<std::string>{"x, y", "he said \"hi\"", "multi\nline"});
}

TEST_CASE("base id and canonical url") {
    CHECK(base_id("T1562.001") == "T1562");
    CHECK(base_id("T1562") == "T1562");
    CHECK(canonical_url(Category::Techniques, "T1562.001") ==
          "https://attack.mitre.org/techniques/T1562/001");
    CHECK(canonical_url(Category::Groups, "G1024") == "https://attack.mitre.org/groups/G1024");
}
