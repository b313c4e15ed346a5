#include "attackqa/corpus/document.hpp"

#include "attackqa/common/hash.hpp"

namespace attackqa {

std::string Document::text() const {
    if (header.empty()) return body;
    if (body.empty()) return header;
    return header + " " + body;
}

std::string Document::reference_source() const {
    std::string path;
    if (field) {
        path = subject_type + "/" + subject_id + "/" + *field;
    } else if (relation_name) {
        path = subject_id + "/" + *relation_name;
    } else {
        path = source + "/" + subject_id;
    }
    return path + ": " + url;
}

std::string make_doc_id(const std::string& header, const std::string& body) {
    std::string key = header;
    key.push_back('\x1f');
    key += body;
    return "d" + fingerprint(key);
}

ordered_json to_json(const Document& d) {
    auto opt = [](const std::optional<std::string>& v) {
        return v ? ordered_json(*v) : ordered_json(nullptr);
    };
    ordered_json j;
    j["doc_id"] = d.doc_id;
    j["header"] = d.header;
    j["body"] = d.body;
    j["url"] = d.url;
    j["source"] = d.source;
    j["subject_id"] = d.subject_id;
    j["subject_name"] = d.subject_name;
    j["subject_type"] = d.subject_type;
    j["relation_id"] = opt(d.relation_id);
    j["relation_name"] = opt(d.relation_name);
    j["field"] = opt(d.field);
    return j;
}

Document document_from_json(const json& j) {
    Document d;
    d.doc_id = j.at("doc_id").get<std::string>();
    d.header = j.at("header").get<std::string>();
    d.body = j.at("body").get<std::string>();
    d.url = j.at("url").get<std::string>();
    d.source = j.at("source").get<std::string>();
    d.subject_id = j.value("subject_id", "");
    d.subject_name = j.value("subject_name", "");
    d.subject_type = j.value("subject_type", "");
    d.relation_id = opt_string(j, "relation_id");
    d.relation_name = opt_string(j, "relation_name");
    d.field = opt_string(j, "field");
    return d;
}

}  // namespace attackqa
