#include "attackqa/ingest/stix.hpp"

#include <unordered_map>
#include <unordered_set>

#include "attackqa/common/jsonl.hpp"
#include "attackqa/common/text.hpp"

namespace attackqa {

namespace {

std::optional<Category> category_for_stix_type(std::string_view type) {
    if (type == "attack-pattern") return Category::Techniques;
    if (type == "x-mitre-tactic") return Category::Tactics;
    if (type == "malware" || type == "tool") return Category::Software;
    if (type == "intrusion-set") return Category::Groups;
    if (type == "campaign") return Category::Campaigns;
    if (type == "course-of-action") return Category::Mitigations;
    return std::nullopt;
}

std::string endpoint_type_for_ref(std::string_view ref) {
    const auto sep = ref.find("--");
    const auto type = ref.substr(0, sep);
    if (type == "x-mitre-data-component") return "data component";
    if (auto c = category_for_stix_type(type)) return std::string(category_endpoint_type(*c));
    return std::string(type);
}

std::string str(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) return {};
    return it->get<std::string>();
}

std::string joined_list(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_array()) return {};
    std::vector<std::string> parts;
    for (const auto& v : *it) {
        if (v.is_string()) parts.push_back(v.get<std::string>());
    }
    return text::join(parts, ", ");
}

bool excluded(const json& obj) {
    auto flag = [&](const char* key) {
        auto it = obj.find(key);
        return it != obj.end() && it->is_boolean() && it->get<bool>();
    };
    return flag("revoked") || flag("x_mitre_deprecated");
}

struct AttackRef {
    std::string id;
    std::string url;
};

std::optional<AttackRef> attack_reference(const json& obj) {
    auto it = obj.find("external_references");
    if (it == obj.end() || !it->is_array()) return std::nullopt;
    for (const auto& ref : *it) {
        const auto source = str(ref, "source_name");
        if (source == "mitre-attack" || source == "mitre-mobile-attack" ||
            source == "mitre-ics-attack") {
            auto id = str(ref, "external_id");
            if (id.empty()) continue;
            return AttackRef{std::move(id), str(ref, "url")};
        }
    }
    return std::nullopt;
}

struct Endpoint {
    std::string id;
    std::string name;
    std::string type;
};

}  // namespace

ParsedBundle parse_bundle(std::string_view raw) {
    json doc;
    try {
        doc = json::parse(raw);
    } catch (const json::parse_error& e) {
        throw StixParseError(std::string("malformed JSON at byte ") + std::to_string(e.byte) +
                                 ": " + e.what(),
                             e.byte);
    }
    if (!doc.is_object() || !doc.contains("objects") || !doc["objects"].is_array()) {
        throw StixParseError("not a STIX bundle: missing \"objects\" array", 0);
    }

    ParsedBundle out;
    auto& kb = out.kb;
    auto& stats = out.stats;

    // Keep only the newest revision of each STIX id.
    std::unordered_map<std::string, const json*> latest;
    std::vector<std::string> order;
    for (const auto& obj : doc["objects"]) {
        if (!obj.is_object()) {
            ++stats.skipped_types["<non-object>"];
            continue;
        }
        const auto id = str(obj, "id");
        auto [it, inserted] = latest.emplace(id, &obj);
        if (inserted) {
            order.push_back(id);
        } else if (str(obj, "modified") > str(*it->second, "modified")) {
            it->second = &obj;
        }
    }

    std::unordered_map<std::string, Endpoint> endpoints;  // STIX id -> endpoint
    std::unordered_set<std::string> excluded_ids;
    std::unordered_map<std::string, std::string> tactic_by_shortname;
    std::vector<const json*> relationship_objects;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> technique_phases;

    for (const auto& stix_id : order) {
        const json& obj = *latest[stix_id];
        const auto type = str(obj, "type");

        if (type == "relationship") {
            if (excluded(obj)) {
                ++stats.deprecated_or_revoked;
                continue;
            }
            relationship_objects.push_back(&obj);
            continue;
        }
        if (type == "x-mitre-collection") {
            if (auto v = str(obj, "x_mitre_version"); !v.empty()) kb.version = v;
            ++stats.skipped_types[type];
            continue;
        }
        if (type == "x-mitre-data-component") {
            if (excluded(obj)) {
                ++stats.deprecated_or_revoked;
                excluded_ids.insert(stix_id);
            } else {
                endpoints[stix_id] = Endpoint{"", str(obj, "name"), "data component"};
            }
            continue;
        }

        auto category = category_for_stix_type(type);
        if (!category) {
            ++stats.skipped_types[type.empty() ? "<untyped>" : type];
            continue;
        }
        if (excluded(obj)) {
            ++stats.deprecated_or_revoked;
            excluded_ids.insert(stix_id);
            continue;
        }
        auto ref = attack_reference(obj);
        if (!ref) {
            ++stats.skipped_types[type + " (no ATT&CK id)"];
            continue;
        }

        Entity e;
        e.id = ref->id;
        e.name = str(obj, "name");
        e.description = str(obj, "description");
        e.url = ref->url.empty() ? canonical_url(*category, e.id) : ref->url;
        e.category = *category;
        if (auto v = joined_list(obj, "x_mitre_platforms"); !v.empty()) e.extras["platforms"] = v;
        if (auto v = joined_list(obj, "x_mitre_contributors"); !v.empty())
            e.extras["contributors"] = v;
        if (*category == Category::Software) {
            e.extras["type"] = type;
            if (auto v = joined_list(obj, "x_mitre_aliases"); !v.empty()) e.extras["aliases"] = v;
        }
        if (*category == Category::Groups || *category == Category::Campaigns) {
            if (auto v = joined_list(obj, "aliases"); !v.empty()) e.extras["aliases"] = v;
        }
        if (*category == Category::Tactics) {
            const auto shortname = str(obj, "x_mitre_shortname");
            if (!shortname.empty()) {
                e.extras["shortname"] = shortname;
                tactic_by_shortname[shortname] = e.name;
            }
        }

        endpoints[stix_id] =
            Endpoint{e.id, e.name, std::string(category_endpoint_type(*category))};

        auto& table = kb.table(*category);
        if (*category == Category::Techniques) {
            std::vector<std::string> phases;
            if (auto it = obj.find("kill_chain_phases"); it != obj.end() && it->is_array()) {
                for (const auto& p : *it) {
                    const auto chain = str(p, "kill_chain_name");
                    if (chain.empty() || text::starts_with(chain, "mitre-")) {
                        phases.push_back(str(p, "phase_name"));
                    }
                }
            }
            technique_phases.emplace_back(table.size(), std::move(phases));
        }
        table.push_back(std::move(e));
    }

    // Tactic names and "Parent: Child" names need the full entity set.
    auto& techniques = kb.table(Category::Techniques);
    for (auto& [index, phases] : technique_phases) {
        std::vector<std::string> names;
        for (const auto& p : phases) {
            auto it = tactic_by_shortname.find(p);
            names.push_back(it != tactic_by_shortname.end() ? it->second : p);
        }
        if (!names.empty()) techniques[index].extras["tactics"] = text::join(names, ", ");
    }
    std::unordered_map<std::string, std::string> technique_names;
    for (const auto& t : techniques) technique_names.emplace(t.id, t.name);
    for (auto& t : techniques) {
        const auto parent = base_id(t.id);
        if (parent.size() == t.id.size()) continue;
        if (auto it = technique_names.find(std::string(parent)); it != technique_names.end()) {
            t.name = it->second + ": " + t.name;
        }
    }

    for (const json* rel_ptr : relationship_objects) {
        const json& rel = *rel_ptr;
        const auto mapping = str(rel, "relationship_type");
        bool known = false;
        for (auto m : kMappingTypes) known = known || m == mapping;
        if (!known) {
            ++stats.skipped_relationship_types[mapping];
            continue;
        }
        const auto src = str(rel, "source_ref");
        const auto dst = str(rel, "target_ref");
        if (excluded_ids.count(src) || excluded_ids.count(dst)) {
            ++stats.relationships_to_excluded;
            continue;
        }
        auto resolve = [&](const std::string& ref) {
            if (auto it = endpoints.find(ref); it != endpoints.end()) return it->second;
            ++stats.unresolvable_endpoints;
            return Endpoint{ref, "", endpoint_type_for_ref(ref)};
        };
        const auto s = resolve(src);
        const auto t = resolve(dst);
        kb.relationships.push_back(Relationship{s.id, s.name, s.type, mapping, t.id, t.name,
                                                t.type, str(rel, "description")});
    }

    kb.canonicalize();
    for (auto c : kAllCategories) {
        stats.entities_per_category[std::string(category_name(c))] = kb.table(c).size();
    }
    stats.relationships = kb.relationships.size();
    return out;
}

}  // namespace attackqa
