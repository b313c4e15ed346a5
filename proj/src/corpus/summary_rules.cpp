#include "attackqa/corpus/summary_rules.hpp"

#include <cctype>

#include "attackqa/common/text.hpp"

namespace attackqa {

namespace {

const std::vector<SummaryRule> kRules{
    // Subject is the relationship target.
    {"campaign", "uses", "technique", true, "campaigns", "technique",
     "The campaigns that used {S} were:", "campaigns used {S}", true},
    {"software", "uses", "technique", true, "software", "technique",
     "The software procedures that use {S} are:", "software procedures use {S}", true},
    {"group", "uses", "technique", true, "groups", "technique",
     "The attack groups that use {S} are:", "attack groups use {S}", true},
    {"data component", "detects", "technique", true, "datacomponents", "technique",
     "The following {N} data components can be used to detect {S}:",
     "data components can be used to detect {S}", false},
    {"mitigation", "mitigates", "technique", true, "mitigations", "technique",
     "The mitigations that can be used to mitigate {S} are:",
     "mitigations can be used to mitigate {S}", true},
    {"group", "uses", "software", true, "groups", "software",
     "The attack groups that use {S} are:", "attack groups use {S}", true},
    {"campaign", "uses", "software", true, "campaigns", "software",
     "The campaigns that used {S} were:", "campaigns used {S}", true},
    {"campaign", "attributed-to", "group", true, "campaigns", "group",
     "The campaigns attributed to {S} are:", "campaigns are attributed to {S}", true},
    // Subject is the relationship source.
    {"software", "uses", "technique", false, "techniques", "software",
     "The attack techniques used by {S} are:", "attack techniques are used by {S}", true},
    {"group", "uses", "technique", false, "techniques", "group",
     "The attack techniques used by {S} are:", "attack techniques are used by {S}", true},
    {"campaign", "uses", "technique", false, "techniques", "campaign",
     "The attack techniques used in {S} were:", "attack techniques were used in {S}", true},
    {"group", "uses", "software", false, "software", "group",
     "The software used by {S} includes:", "software is used by {S}", true},
    {"campaign", "uses", "software", false, "software", "campaign",
     "The software used in {S} includes:", "software was used in {S}", true},
    {"mitigation", "mitigates", "technique", false, "techniques", "mitigation",
     "The attack techniques mitigated by {S} are:", "attack techniques are mitigated by {S}",
     true},
    {"campaign", "attributed-to", "group", false, "groups", "campaign",
     "The attack groups that {S} is attributed to are:", "attack groups is {S} attributed to",
     true},
    // Built from the technique's tactic list rather than relationship rows.
    {"", "", "", true, "tactics", "technique", "Tactics used in {S}:",
     "tactics are used in {S}", false},
};

std::string substitute(std::string_view tmpl, std::string_view label, std::size_t count) {
    std::string out = text::replace_all(std::string(tmpl), "{S}", label);
    return text::replace_all(std::move(out), "{N}", std::to_string(count));
}

// Matches `pattern` (which may contain {N}) against the start of `s`; returns
// the number of characters consumed.
std::optional<std::size_t> match_prefix(std::string_view s, std::string_view pattern) {
    const auto n_pos = pattern.find("{N}");
    if (n_pos == std::string_view::npos) {
        if (!text::starts_with(s, pattern)) return std::nullopt;
        return pattern.size();
    }
    const auto before = pattern.substr(0, n_pos);
    const auto after = pattern.substr(n_pos + 3);
    if (!text::starts_with(s, before)) return std::nullopt;
    std::size_t i = before.size();
    const std::size_t digits_start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == digits_start) return std::nullopt;
    if (!text::starts_with(s.substr(i), after)) return std::nullopt;
    return i + after.size();
}

}  // namespace

std::string SummaryRule::source_tag() const {
    return "relationships_" + std::string(group) + "_for_" + std::string(subject_kind);
}

std::string SummaryRule::render_header(std::string_view subject_label, std::size_t count) const {
    return substitute(header_template, subject_label, count);
}

std::string SummaryRule::render_phrase(std::string_view subject_label) const {
    return substitute(question_phrase, subject_label, 0);
}

std::optional<std::string> SummaryRule::subject_label_from_header(std::string_view header) const {
    const auto s_pos = header_template.find("{S}");
    const auto prefix = header_template.substr(0, s_pos);
    const auto suffix = header_template.substr(s_pos + 3);
    auto consumed = match_prefix(header, prefix);
    if (!consumed || !text::ends_with(header, suffix)) return std::nullopt;
    if (*consumed + suffix.size() > header.size()) return std::nullopt;
    return std::string(header.substr(*consumed, header.size() - suffix.size() - *consumed));
}

const std::vector<SummaryRule>& summary_rules() { return kRules; }

const SummaryRule& tactics_rule() { return kRules.back(); }

const SummaryRule* find_summary_rule(std::string_view source_tag) {
    for (const auto& r : kRules) {
        if (r.source_tag() == source_tag) return &r;
    }
    return nullptr;
}

bool is_summary_source(std::string_view source_tag) {
    return find_summary_rule(source_tag) != nullptr;
}

std::string_view endpoint_noun(std::string_view type) {
    if (type == "technique") return "attack technique";
    if (type == "software") return "attack software";
    if (type == "group") return "attack group";
    if (type == "campaign") return "attack campaign";
    if (type == "tactic") return "attack tactic";
    if (type == "mitigation" || type == "mitigation strategy") return "mitigation";
    if (type == "data component") return "data component";
    return type;
}

std::string entity_label(std::string_view noun, std::string_view id, std::string_view name) {
    std::string out(noun);
    out += " '";
    if (!id.empty()) {
        out += id;
        out += ": ";
    }
    out += name;
    out += "'";
    return out;
}

std::string normalize_endpoint_type(std::string_view type) {
    const auto t = text::to_lower(text::trim(type));
    if (t == "mitigation strategy" || t == "course-of-action") return "mitigation";
    if (t == "data-component" || t == "datacomponent") return "data component";
    return t;
}

}  // namespace attackqa
