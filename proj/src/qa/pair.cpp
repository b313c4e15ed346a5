#include "attackqa/qa/pair.hpp"

namespace attackqa {

QAPair pair_for_document(const Document& doc) {
    QAPair p;
    p.document = doc.text();
    p.subject_id = doc.subject_id;
    p.subject_name = doc.subject_name;
    p.subject_type = doc.subject_type;
    p.url = doc.url;
    p.source = doc.source;
    p.field = doc.field;
    p.relation_id = doc.relation_id;
    p.relation_name = doc.relation_name;
    return p;
}

ordered_json to_json(const QAPair& p) {
    auto opt = [](const std::optional<std::string>& v) {
        return v ? ordered_json(*v) : ordered_json(nullptr);
    };
    ordered_json j;
    j["question"] = p.question;
    j["thought"] = p.thought;
    j["answer"] = p.answer;
    j["document"] = p.document;
    j["subject_id"] = p.subject_id;
    j["subject_name"] = p.subject_name;
    j["subject_type"] = p.subject_type;
    j["url"] = p.url;
    j["source"] = p.source;
    if (p.references) {
        auto refs = ordered_json::array();
        for (const auto& r : *p.references) {
            ordered_json rj;
            rj["source"] = r.source;
            rj["citation"] = r.citation;
            refs.push_back(std::move(rj));
        }
        j["references"] = std::move(refs);
    } else {
        j["references"] = nullptr;
    }
    j["human_question"] = p.human_question;
    j["human_answer"] = p.human_answer;
    j["field"] = opt(p.field);
    j["relation_id"] = opt(p.relation_id);
    j["relation_name"] = opt(p.relation_name);
    return j;
}

QAPair qa_pair_from_json(const json& j) {
    QAPair p;
    p.question = j.at("question").get<std::string>();
    p.thought = j.value("thought", "");
    p.answer = j.at("answer").get<std::string>();
    p.document = j.at("document").get<std::string>();
    p.subject_id = j.value("subject_id", "");
    p.subject_name = j.value("subject_name", "");
    p.subject_type = j.value("subject_type", "");
    p.url = j.at("url").get<std::string>();
    p.source = j.value("source", "");
    if (auto it = j.find("references"); it != j.end() && it->is_array()) {
        std::vector<Reference> refs;
        for (const auto& r : *it) {
            refs.push_back({r.value("source", ""), r.value("citation", "")});
        }
        p.references = std::move(refs);
    }
    p.human_question = j.value("human_question", false);
    p.human_answer = j.value("human_answer", false);
    p.field = opt_string(j, "field");
    p.relation_id = opt_string(j, "relation_id");
    p.relation_name = opt_string(j, "relation_name");
    return p;
}

std::vector<QAPair> load_pairs(const std::filesystem::path& path) {
    std::vector<QAPair> out;
    for (const auto& j : read_jsonl(path)) out.push_back(qa_pair_from_json(j));
    return out;
}

void save_pairs(const std::vector<QAPair>& pairs, const std::filesystem::path& path) {
    std::vector<ordered_json> rows;
    rows.reserve(pairs.size());
    for (const auto& p : pairs) rows.push_back(to_json(p));
    write_jsonl(path, rows);
}

}  // namespace attackqa
