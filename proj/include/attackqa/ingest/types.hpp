#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace attackqa {

/// The six ATT&CK entity tables, in canonical order.
enum class Category { Techniques, Tactics, Software, Groups, Campaigns, Mitigations };

inline constexpr std::array<Category, 6> kAllCategories{
    Category::Techniques, Category::Tactics,   Category::Software,
    Category::Groups,     Category::Campaigns, Category::Mitigations};

/// Table name, e.g. "techniques".
std::string_view category_name(Category c) noexcept;
std::optional<Category> category_from_name(std::string_view name) noexcept;

/// Relationship endpoint type ("technique", "software", ...) for a category.
std::string_view category_endpoint_type(Category c) noexcept;
/// Accepts relationship endpoint types; "data component" has no entity table.
std::optional<Category> category_from_endpoint_type(std::string_view type) noexcept;

inline constexpr std::string_view kAttackUrlPrefix = "https://attack.mitre.org/";

struct Entity {
    std::string id;
    std::string name;
    std::string description;
    std::string url;
    Category category = Category::Techniques;
    std::map<std::string, std::string> extras;

    friend bool operator==(const Entity&, const Entity&) = default;
};

inline constexpr std::array<std::string_view, 4> kMappingTypes{"uses", "detects", "mitigates",
                                                               "attributed-to"};
inline constexpr std::array<std::string_view, 6> kSourceTypes{
    "software", "group", "data component", "mitigation", "mitigation strategy", "campaign"};
inline constexpr std::array<std::string_view, 3> kTargetTypes{"technique", "software", "group"};

struct Relationship {
    std::string source_id;
    std::string source_name;
    std::string source_type;
    std::string mapping_type;
    std::string target_id;
    std::string target_name;
    std::string target_type;
    std::string mapping_description;

    friend bool operator==(const Relationship&, const Relationship&) = default;
};

/// Parse/load counters. Excluded and skipped objects are counted here rather
/// than dropped silently.
struct IngestStats {
    std::map<std::string, std::size_t> entities_per_category;
    std::size_t relationships = 0;
    std::size_t deprecated_or_revoked = 0;
    std::size_t relationships_to_excluded = 0;
    std::size_t unresolvable_endpoints = 0;
    std::map<std::string, std::size_t> skipped_types;
    std::map<std::string, std::size_t> skipped_relationship_types;

    friend bool operator==(const IngestStats&, const IngestStats&) = default;
};

class KnowledgeBase {
public:
    std::array<std::vector<Entity>, 6> entities;
    std::vector<Relationship> relationships;
    std::optional<std::string> version;

    std::vector<Entity>& table(Category c) { return entities[static_cast<std::size_t>(c)]; }
    const std::vector<Entity>& table(Category c) const {
        return entities[static_cast<std::size_t>(c)];
    }

    std::size_t entity_count() const noexcept;

    /// First entity with this id in the given category, or nullptr.
    const Entity* find(Category c, std::string_view id) const;
    /// First entity with this id in any category, or nullptr.
    const Entity* find_any(std::string_view id) const;

    /// Sorts entities by ID within each category and relationships by their
    /// full field tuple. Both load paths call this.
    void canonicalize();

    friend bool operator==(const KnowledgeBase& a, const KnowledgeBase& b) {
        return a.entities == b.entities && a.relationships == b.relationships &&
               a.version == b.version;
    }
};

/// "T1562.001" -> "T1562"; IDs without a dot are returned unchanged.
std::string_view base_id(std::string_view id) noexcept;

/// Canonical page for an ID: https://attack.mitre.org/techniques/T1562/001.
std::string canonical_url(Category c, std::string_view id);

}  // namespace attackqa
