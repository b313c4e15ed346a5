#include "attackqa/corpus/builder.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

#include "attackqa/common/text.hpp"
#include "attackqa/corpus/clean.hpp"
#include "attackqa/corpus/summary_rules.hpp"

namespace attackqa {

namespace {

std::string source_category_tag(std::string_view endpoint_type) {
    if (endpoint_type == "data component") return "datacomponents";
    if (auto c = category_from_endpoint_type(endpoint_type)) return std::string(category_name(*c));
    return text::replace_all(std::string(endpoint_type), " ", "");
}

std::optional<std::string> relation_header_template(std::string_view mapping) {
    if (mapping == "uses") return "How {S} uses {T}:";
    if (mapping == "detects") return "How {S} can be used to detect {T}:";
    if (mapping == "mitigates") return "How {S} mitigates {T}:";
    if (mapping == "attributed-to") return "How {S} is attributed to {T}:";
    return std::nullopt;
}

struct SubjectInfo {
    std::string name;
    std::string type;  // table name when resolvable
    std::string url;
};

SubjectInfo resolve_subject(const KnowledgeBase* kb, std::string_view endpoint_type,
                            const std::string& id, const std::string& fallback_name) {
    SubjectInfo info{fallback_name, std::string(endpoint_type), ""};
    auto category = category_from_endpoint_type(endpoint_type);
    if (category) {
        info.type = std::string(category_name(*category));
        info.url = id.empty() ? std::string{} : canonical_url(*category, id);
    }
    if (kb && category) {
        if (const auto* e = kb->find(*category, id)) {
            info.name = e->name;
            info.url = e->url;
        }
    }
    return info;
}

Document finish(Document d) {
    d.doc_id = make_doc_id(d.header, d.body);
    return d;
}

}  // namespace

ordered_json CorpusBuildReport::to_json() const {
    ordered_json j;
    j["description_docs"] = description_docs;
    j["relation_docs"] = relation_docs;
    j["summary_docs"] = summary_docs;
    j["skipped_empty_description"] = skipped_empty_description;
    j["skipped_empty"] = skipped_empty;
    j["unsupported_relationships"] = unsupported_relationships;
    j["duplicate_docs"] = duplicate_docs;
    j["per_source"] = per_source;
    return j;
}

std::optional<Document> build_description_doc(const Entity& entity) {
    auto body = clean_text(entity.description);
    if (body.empty()) return std::nullopt;
    Document d;
    const auto noun = "attack " + std::string(category_endpoint_type(entity.category));
    d.header = "Description of " + entity_label(noun, entity.id, entity.name) + ":";
    d.body = std::move(body);
    d.url = entity.url;
    d.source = std::string(category_name(entity.category));
    d.subject_id = entity.id;
    d.subject_name = entity.name;
    d.subject_type = std::string(category_name(entity.category));
    d.field = "description";
    return finish(std::move(d));
}

std::optional<Document> build_relation_doc(const Relationship& rel, const KnowledgeBase* kb) {
    auto body = clean_text(rel.mapping_description);
    if (body.empty()) return std::nullopt;
    auto tmpl = relation_header_template(rel.mapping_type);
    if (!tmpl) return std::nullopt;

    const auto src_type = normalize_endpoint_type(rel.source_type);
    const auto dst_type = normalize_endpoint_type(rel.target_type);
    const auto src_label = entity_label(endpoint_noun(src_type), rel.source_id, rel.source_name);
    const auto dst_label = entity_label(endpoint_noun(dst_type), rel.target_id, rel.target_name);

    Document d;
    d.header = text::replace_all(text::replace_all(*tmpl, "{S}", src_label), "{T}", dst_label);
    d.body = std::move(body);
    const auto subject = resolve_subject(kb, dst_type, rel.target_id, rel.target_name);
    d.url = subject.url;
    d.subject_id = rel.target_id;
    d.subject_name = subject.name;
    d.subject_type = subject.type;
    if (!rel.source_id.empty()) d.relation_id = rel.source_id;
    d.relation_name = rel.source_name;
    d.source = "relationships_" + text::replace_all(rel.mapping_type, "-", "_") + "_" +
               source_category_tag(src_type);
    return finish(std::move(d));
}

std::vector<Document> build_relation_summary_docs(const KnowledgeBase& kb) {
    struct Group {
        std::string label_name;
        std::set<std::pair<std::string, std::string>> items;  // (sort key, rendered)
    };
    std::vector<Document> out;

    for (const auto& rule : summary_rules()) {
        if (rule.source_type.empty()) continue;  // tactics handled below
        std::map<std::string, Group> groups;
        for (const auto& r : kb.relationships) {
            if (r.mapping_type != rule.mapping_type ||
                normalize_endpoint_type(r.source_type) != rule.source_type ||
                normalize_endpoint_type(r.target_type) != rule.target_type) {
                continue;
            }
            const auto& subject_id = rule.subject_is_target ? r.target_id : r.source_id;
            const auto& subject_name = rule.subject_is_target ? r.target_name : r.source_name;
            const auto& item_id = rule.subject_is_target ? r.source_id : r.target_id;
            const auto& item_name = rule.subject_is_target ? r.source_name : r.target_name;
            if (subject_id.empty()) continue;
            auto& g = groups[subject_id];
            if (g.label_name.empty()) g.label_name = subject_name;
            if (rule.quoted_items) {
                const auto rendered =
                    "'" + (item_id.empty() ? item_name : item_id + ": " + item_name) + "'";
                g.items.emplace(item_id + '\x1f' + item_name, rendered);
            } else {
                g.items.emplace(item_name, item_name);
            }
        }
        const std::string subject_type(rule.subject_kind);
        for (const auto& [subject_id, g] : groups) {
            std::vector<std::string> items;
            for (const auto& [key, rendered] : g.items) items.push_back(rendered);
            Document d;
            const auto label = entity_label(endpoint_noun(subject_type), subject_id, g.label_name);
            d.header = rule.render_header(label, items.size());
            d.body = text::join(items, ", ");
            const auto subject = resolve_subject(&kb, subject_type, subject_id, g.label_name);
            d.url = subject.url;
            d.source = rule.source_tag();
            d.subject_id = subject_id;
            d.subject_name = subject.name;
            d.subject_type = subject.type;
            out.push_back(finish(std::move(d)));
        }
    }

    const auto& tactics = tactics_rule();
    for (const auto& t : kb.table(Category::Techniques)) {
        auto it = t.extras.find("tactics");
        if (it == t.extras.end() || text::trim(it->second).empty()) continue;
        std::vector<std::string> names;
        for (auto& n : text::split(it->second, ',')) {
            auto trimmed = text::trim(n);
            if (!trimmed.empty() &&
                std::find(names.begin(), names.end(), trimmed) == names.end()) {
                names.push_back(std::move(trimmed));
            }
        }
        Document d;
        d.header = tactics.render_header(entity_label("attack technique", t.id, t.name),
                                         names.size());
        d.body = text::join(names, ", ");
        d.url = t.url;
        d.source = tactics.source_tag();
        d.subject_id = t.id;
        d.subject_name = t.name;
        d.subject_type = std::string(category_name(Category::Techniques));
        out.push_back(finish(std::move(d)));
    }
    return out;
}

Corpus build_corpus(const KnowledgeBase& kb) {
    Corpus corpus;
    auto& report = corpus.report;
    std::unordered_set<std::string> seen;
    auto add = [&](Document d) {
        if (!seen.insert(d.doc_id).second) {
            ++report.duplicate_docs;
            return false;
        }
        ++report.per_source[d.source];
        corpus.docs.push_back(std::move(d));
        return true;
    };

    for (auto c : kAllCategories) {
        for (const auto& e : kb.table(c)) {
            if (auto d = build_description_doc(e)) {
                report.description_docs += add(std::move(*d)) ? 1 : 0;
            } else {
                ++report.skipped_empty_description;
            }
        }
    }
    for (const auto& r : kb.relationships) {
        if (clean_text(r.mapping_description).empty()) {
            ++report.skipped_empty;
            continue;
        }
        if (auto d = build_relation_doc(r, &kb)) {
            report.relation_docs += add(std::move(*d)) ? 1 : 0;
        } else {
            ++report.unsupported_relationships;
        }
    }
    for (auto& d : build_relation_summary_docs(kb)) {
        report.summary_docs += add(std::move(d)) ? 1 : 0;
    }
    return corpus;
}

CorpusStats corpus_stats(const std::vector<Document>& corpus, const Tokenizer& tokenizer) {
    if (corpus.empty()) throw CorpusError("empty corpus");
    CorpusStats s;
    s.doc_count = corpus.size();
    s.tokenizer = tokenizer.name();
    s.min_tokens = SIZE_MAX;
    double total = 0.0;
    for (const auto& d : corpus) {
        const auto n = tokenizer.count(d.text());
        s.max_tokens = std::max(s.max_tokens, n);
        s.min_tokens = std::min(s.min_tokens, n);
        total += static_cast<double>(n);
    }
    s.mean_tokens = total / static_cast<double>(corpus.size());
    return s;
}

std::vector<Document> load_corpus(const std::filesystem::path& path) {
    std::vector<Document> docs;
    for (const auto& row : read_jsonl(path)) docs.push_back(document_from_json(row));
    return docs;
}

void save_corpus(const std::vector<Document>& docs, const std::filesystem::path& path) {
    std::vector<ordered_json> rows;
    rows.reserve(docs.size());
    for (const auto& d : docs) rows.push_back(to_json(d));
    write_jsonl(path, rows);
}

}  // namespace attackqa
