#include "attackqa/ingest/validate.hpp"

#include <algorithm>
#include <map>

#include "attackqa/common/text.hpp"

namespace attackqa {

std::string_view finding_kind_name(FindingKind k) noexcept {
    switch (k) {
        case FindingKind::DuplicateId: return "duplicate_id";
        case FindingKind::EmptyDescription: return "empty_description";
        case FindingKind::UnresolvableEndpoint: return "unresolvable_endpoint";
        case FindingKind::MalformedUrl: return "malformed_url";
    }
    return "unknown";
}

std::size_t ValidationReport::count(FindingKind k) const {
    return static_cast<std::size_t>(std::count_if(
        findings.begin(), findings.end(), [k](const Finding& f) { return f.kind == k; }));
}

ValidationReport validate(const KnowledgeBase& kb) {
    ValidationReport report;
    for (auto c : kAllCategories) {
        const std::string table(category_name(c));
        std::map<std::string, std::size_t> seen;
        for (const auto& e : kb.table(c)) {
            if (++seen[e.id] == 2) {
                report.findings.push_back({FindingKind::DuplicateId, table, e.id,
                                           "id appears more than once in " + table});
            }
            if (text::trim(e.description).empty()) {
                report.findings.push_back(
                    {FindingKind::EmptyDescription, table, e.id, "empty description"});
            }
            if (!text::starts_with(e.url, kAttackUrlPrefix) ||
                e.url.size() == kAttackUrlPrefix.size()) {
                report.findings.push_back(
                    {FindingKind::MalformedUrl, table, e.id, "url \"" + e.url + "\""});
            }
        }
    }
    auto check_endpoint = [&](const std::string& id, const std::string& type,
                              const Relationship& r) {
        if (id.empty()) return;  // data components carry names only
        auto category = category_from_endpoint_type(type);
        const Entity* hit = category ? kb.find(*category, id) : kb.find_any(id);
        if (!hit) {
            report.findings.push_back({FindingKind::UnresolvableEndpoint, "relationships", id,
                                       r.source_id + " " + r.mapping_type + " " + r.target_id});
        }
    };
    for (const auto& r : kb.relationships) {
        check_endpoint(r.source_id, r.source_type, r);
        check_endpoint(r.target_id, r.target_type, r);
    }
    return report;
}

}  // namespace attackqa
