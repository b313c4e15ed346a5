#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "attackqa/common/jsonl.hpp"
#include "attackqa/corpus/document.hpp"

namespace attackqa {

struct Reference {
    std::string source;    // "<path>: <url>"
    std::string citation;  // text quoted from the golden document
    friend bool operator==(const Reference&, const Reference&) = default;
};

/// One AttackQA record. `document` is the full text of the golden document.
struct QAPair {
    std::string question;
    std::string thought;
    std::string answer;
    std::string document;
    std::string subject_id;
    std::string subject_name;
    std::string subject_type;
    std::string url;
    std::string source;
    std::optional<std::vector<Reference>> references;
    bool human_question = false;
    bool human_answer = false;
    std::optional<std::string> field;
    std::optional<std::string> relation_id;
    std::optional<std::string> relation_name;
    friend bool operator==(const QAPair&, const QAPair&) = default;
};

/// Copies subject, url, source, field and relation metadata from the golden
/// document into a pair with the given content.
QAPair pair_for_document(const Document& doc);

ordered_json to_json(const QAPair& p);
QAPair qa_pair_from_json(const json& j);
std::vector<QAPair> load_pairs(const std::filesystem::path& path);
void save_pairs(const std::vector<QAPair>& pairs, const std::filesystem::path& path);

}  // namespace attackqa
