#pragma once

#include <string>
#include <vector>

#include "attackqa/ingest/types.hpp"

namespace attackqa {

enum class FindingKind { DuplicateId, EmptyDescription, UnresolvableEndpoint, MalformedUrl };

std::string_view finding_kind_name(FindingKind k) noexcept;

struct Finding {
    FindingKind kind;
    std::string category;  // table name, or "relationships"
    std::string id;
    std::string detail;
};

struct ValidationReport {
    std::vector<Finding> findings;

    std::size_t count(FindingKind k) const;
    bool clean() const { return findings.empty(); }
};

ValidationReport validate(const KnowledgeBase& kb);

}  // namespace attackqa
