#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace attackqa {

// A relation-summary document lists every entity related to one subject through
// one (source type, mapping, target type) combination. Templates use {S} for the
// subject label and {N} for the item count.
struct SummaryRule {
    std::string_view source_type;  // empty for the tactics rule
    std::string_view mapping_type;
    std::string_view target_type;
    bool subject_is_target;
    std::string_view group;         // "campaigns" in relationships_campaigns_for_technique
    std::string_view subject_kind;  // "technique"
    std::string_view header_template;
    std::string_view question_phrase;  // "campaigns used {S}" -> "What campaigns used ...?"
    bool quoted_items;

    std::string source_tag() const;
    std::string render_header(std::string_view subject_label, std::size_t count) const;
    std::string render_phrase(std::string_view subject_label) const;
    /// Recovers {S} from a header produced by render_header.
    std::optional<std::string> subject_label_from_header(std::string_view header) const;
};

const std::vector<SummaryRule>& summary_rules();
const SummaryRule* find_summary_rule(std::string_view source_tag);
const SummaryRule& tactics_rule();

bool is_summary_source(std::string_view source_tag);

/// "attack technique", "data component", "mitigation", ... for an endpoint type.
std::string_view endpoint_noun(std::string_view endpoint_type);

/// "attack group 'G1024: Akira'"; ID-less entities render as "data component 'Process Access'".
std::string entity_label(std::string_view noun, std::string_view id, std::string_view name);

/// Relationship endpoint type with aliases folded ("mitigation strategy" -> "mitigation").
std::string normalize_endpoint_type(std::string_view type);

}  // namespace attackqa
