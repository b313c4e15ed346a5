#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "attackqa/ingest/types.hpp"

namespace attackqa {

struct StixParseError : std::runtime_error {
    std::size_t byte_offset;
    StixParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what), byte_offset(offset) {}
};

struct ParsedBundle {
    KnowledgeBase kb;
    IngestStats stats;
};

/// Parses a STIX 2.x bundle. Deprecated and revoked objects are excluded,
/// unmapped object types are skipped; both are counted in stats. Sub-technique
/// entities get the "Parent: Child" display name while relationship rows keep
/// the object's own name.
ParsedBundle parse_bundle(std::string_view raw);

}  // namespace attackqa
