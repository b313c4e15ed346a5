#include "attackqa/ingest/types.hpp"

#include <algorithm>
#include <tuple>

namespace attackqa {

std::string_view category_name(Category c) noexcept {
    switch (c) {
        case Category::Techniques: return "techniques";
        case Category::Tactics: return "tactics";
        case Category::Software: return "software";
        case Category::Groups: return "groups";
        case Category::Campaigns: return "campaigns";
        case Category::Mitigations: return "mitigations";
    }
    return "techniques";
}

std::optional<Category> category_from_name(std::string_view name) noexcept {
    for (auto c : kAllCategories) {
        if (category_name(c) == name) return c;
    }
    return std::nullopt;
}

std::string_view category_endpoint_type(Category c) noexcept {
    switch (c) {
        case Category::Techniques: return "technique";
        case Category::Tactics: return "tactic";
        case Category::Software: return "software";
        case Category::Groups: return "group";
        case Category::Campaigns: return "campaign";
        case Category::Mitigations: return "mitigation";
    }
    return "technique";
}

std::optional<Category> category_from_endpoint_type(std::string_view type) noexcept {
    if (type == "mitigation strategy") return Category::Mitigations;
    for (auto c : kAllCategories) {
        if (category_endpoint_type(c) == type) return c;
    }
    return std::nullopt;
}

std::size_t KnowledgeBase::entity_count() const noexcept {
    std::size_t n = 0;
    for (const auto& t : entities) n += t.size();
    return n;
}

const Entity* KnowledgeBase::find(Category c, std::string_view id) const {
    const auto& t = table(c);
    auto it = std::lower_bound(t.begin(), t.end(), id,
                               [](const Entity& e, std::string_view key) { return e.id < key; });
    if (it != t.end() && it->id == id) return &*it;
    // Tables are sorted after canonicalize(); fall back to a scan otherwise.
    for (const auto& e : t) {
        if (e.id == id) return &e;
    }
    return nullptr;
}

const Entity* KnowledgeBase::find_any(std::string_view id) const {
    for (auto c : kAllCategories) {
        if (const auto* e = find(c, id)) return e;
    }
    return nullptr;
}

void KnowledgeBase::canonicalize() {
    for (auto& t : entities) {
        std::stable_sort(t.begin(), t.end(), [](const Entity& a, const Entity& b) {
            return std::tie(a.id, a.name, a.url, a.description) <
                   std::tie(b.id, b.name, b.url, b.description);
        });
    }
    auto key = [](const Relationship& r) {
        return std::tie(r.source_id, r.mapping_type, r.target_id, r.source_type, r.target_type,
                        r.source_name, r.target_name, r.mapping_description);
    };
    std::stable_sort(relationships.begin(), relationships.end(),
                     [&](const Relationship& a, const Relationship& b) { return key(a) < key(b); });
}

std::string_view base_id(std::string_view id) noexcept {
    const auto dot = id.find('.');
    return dot == std::string_view::npos ? id : id.substr(0, dot);
}

std::string canonical_url(Category c, std::string_view id) {
    std::string path(id);
    std::replace(path.begin(), path.end(), '.', '/');
    return std::string(kAttackUrlPrefix) + std::string(category_name(c)) + "/" + path;
}

}  // namespace attackqa
