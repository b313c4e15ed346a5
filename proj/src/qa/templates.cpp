#include "attackqa/qa/templates.hpp"

#include <array>
#include <utility>

#include "attackqa/common/text.hpp"
#include "attackqa/corpus/summary_rules.hpp"

namespace attackqa {

namespace {

constexpr std::string_view kThoughtLead = "To answer the question, I need to know what ";

struct RelationTemplate {
    std::string_view mapping_prefix;  // source tag prefix
    std::string_view verb;            // text between the two labels in the header
    std::string_view question_lead;
    std::string_view question_mid;
};

constexpr std::array<RelationTemplate, 4> kRelationTemplates{{
    {"relationships_uses_", " uses ", "How does ", " use "},
    {"relationships_detects_", " can be used to detect ", "How can ", " detect "},
    {"relationships_mitigates_", " mitigates ", "How can ", " mitigate "},
    {"relationships_attributed_to_", " is attributed to ", "How is ", " attributed to "},
}};

constexpr std::array<std::string_view, 5> kTargetNouns{
    "attack technique '", "attack software '", "attack group '", "attack campaign '",
    "attack tactic '"};

// Splits "How {S}<verb>{T}:" into its two labels. The last verb occurrence
// followed by an entity noun wins, so names containing the verb still split.
std::optional<std::pair<std::string, std::string>> split_relation_header(std::string_view header,
                                                                         std::string_view verb) {
    if (!text::starts_with(header, "How ") || !text::ends_with(header, ":")) return std::nullopt;
    const auto inner = header.substr(4, header.size() - 5);
    for (auto pos = inner.rfind(verb); pos != std::string_view::npos && pos > 0;
         pos = inner.rfind(verb, pos - 1)) {
        const auto rhs = inner.substr(pos + verb.size());
        for (auto noun : kTargetNouns) {
            if (text::starts_with(rhs, noun)) {
                return std::make_pair(std::string(inner.substr(0, pos)), std::string(rhs));
            }
        }
    }
    return std::nullopt;
}

}  // namespace

QAPair gen_summary_qa(const Document& doc) {
    const auto* rule = find_summary_rule(doc.source);
    if (!rule) throw std::invalid_argument("not a relation-summary document: " + doc.source);
    auto label = rule->subject_label_from_header(doc.header);
    if (!label) throw std::invalid_argument("summary header does not match its rule: " + doc.header);
    const auto phrase = rule->render_phrase(*label);

    QAPair p = pair_for_document(doc);
    p.question = "What " + phrase + "?";
    p.thought = std::string(kThoughtLead) + phrase;
    p.answer = doc.text();
    p.references = std::nullopt;
    p.human_question = true;
    p.human_answer = true;
    return p;
}

std::optional<std::string> gen_templated_question(const Document& doc) {
    if (doc.field && *doc.field == "description") {
        constexpr std::string_view lead = "Description of ";
        if (!text::starts_with(doc.header, lead) || !text::ends_with(doc.header, ":")) {
            return std::nullopt;
        }
        const std::string_view h = doc.header;
        return "Describe " + std::string(h.substr(lead.size(), h.size() - lead.size() - 1));
    }
    for (const auto& t : kRelationTemplates) {
        if (!text::starts_with(doc.source, t.mapping_prefix)) continue;
        auto labels = split_relation_header(doc.header, t.verb);
        if (!labels) return std::nullopt;
        return std::string(t.question_lead) + labels->first + std::string(t.question_mid) +
               labels->second + "?";
    }
    return std::nullopt;
}

}  // namespace attackqa
