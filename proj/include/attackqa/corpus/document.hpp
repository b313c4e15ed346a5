#pragma once

#include <optional>
#include <string>

#include "attackqa/common/jsonl.hpp"

namespace attackqa {

/// One retrieval unit. `text()` (header, a space, body) is what gets embedded,
/// shown to the generator and stored as a pair's golden document.
struct Document {
    std::string doc_id;
    std::string header;
    std::string body;
    std::string url;
    std::string source;
    std::string subject_id;
    std::string subject_name;
    std::string subject_type;
    std::optional<std::string> relation_id;
    std::optional<std::string> relation_name;
    std::optional<std::string> field;

    std::string text() const;

    /// "<path>: <url>" string used as the `source` of generated references,
    /// e.g. "groups/G1024/description: https://attack.mitre.org/groups/G1024".
    std::string reference_source() const;

    friend bool operator==(const Document&, const Document&) = default;
};

/// Content-derived id: "d" followed by the fingerprint of header and body.
std::string make_doc_id(const std::string& header, const std::string& body);

ordered_json to_json(const Document& d);
Document document_from_json(const json& j);

}  // namespace attackqa
