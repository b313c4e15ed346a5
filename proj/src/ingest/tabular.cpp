#include "attackqa/ingest/tabular.hpp"

#include <array>

#include "attackqa/common/jsonl.hpp"

namespace attackqa {

namespace fs = std::filesystem;

namespace {

constexpr std::array<const char*, 8> kRelationshipColumns{
    "source ID", "source name", "source type", "mapping type",
    "target ID", "target name", "target type", "mapping description"};

using Record = std::vector<std::pair<std::string, std::string>>;

std::string value_string(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
        std::string out;
        for (const auto& item : v) {
            if (!out.empty()) out += ", ";
            out += item.is_string() ? item.get<std::string>() : item.dump();
        }
        return out;
    }
    return v.dump();
}

// Both file formats are reduced to ordered (column, value) records.
std::vector<Record> read_records(const fs::path& stem) {
    std::vector<Record> out;
    if (auto jsonl = fs::path(stem).replace_extension(".jsonl"); fs::exists(jsonl)) {
        for (const auto& row : read_jsonl(jsonl)) {
            if (!row.is_object()) throw TabularError(jsonl.string() + ": row is not an object");
            Record r;
            for (auto it = row.begin(); it != row.end(); ++it) {
                if (it.value().is_null()) continue;
                r.emplace_back(it.key(), value_string(it.value()));
            }
            out.push_back(std::move(r));
        }
        return out;
    }
    // Blank spreadsheet cells in extra columns are dropped by the entity loader.
    if (auto csv = fs::path(stem).replace_extension(".csv"); fs::exists(csv)) {
        auto rows = parse_csv(read_file(csv));
        if (rows.empty()) return out;
        const auto header = rows.front();
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto& row = rows[i];
            if (row.size() == 1 && row[0].empty()) continue;
            if (row.size() > header.size()) {
                throw TabularError(csv.string() + ": row " + std::to_string(i + 1) +
                                   " has more fields than the header");
            }
            Record r;
            for (std::size_t c = 0; c < row.size(); ++c) {
                r.emplace_back(header[c], row[c]);
            }
            out.push_back(std::move(r));
        }
        return out;
    }
    throw TabularError("missing table " + stem.string() + ".{jsonl,csv}");
}

const std::string* field(const Record& r, std::string_view key) {
    for (const auto& [k, v] : r) {
        if (k == key) return &v;
    }
    return nullptr;
}

std::string required(const Record& r, std::string_view key, const fs::path& where) {
    if (const auto* v = field(r, key)) return *v;
    throw TabularError(where.string() + ": missing column \"" + std::string(key) + "\"");
}

bool table_exists(const fs::path& stem) {
    return fs::exists(fs::path(stem).replace_extension(".jsonl")) ||
           fs::exists(fs::path(stem).replace_extension(".csv"));
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(std::string_view content) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;
    bool any = false;
    std::size_t i = 0;
    if (content.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
    for (; i < content.size(); ++i) {
        const char c = content[i];
        any = true;
        if (quoted) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"': quoted = true; break;
            case ',':
                row.push_back(std::move(cell));
                cell.clear();
                break;
            case '\r': break;
            case '\n':
                row.push_back(std::move(cell));
                cell.clear();
                rows.push_back(std::move(row));
                row.clear();
                any = false;
                break;
            default: cell.push_back(c);
        }
    }
    if (quoted) throw TabularError("unterminated quoted CSV field");
    if (any) {
        row.push_back(std::move(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

KnowledgeBase load_tabular(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw TabularError(dir.string() + " is not a directory");
    KnowledgeBase kb;
    bool found_any = false;
    for (auto c : kAllCategories) {
        const auto stem = dir / std::string(category_name(c));
        if (!table_exists(stem)) continue;
        found_any = true;
        const bool csv = !fs::exists(fs::path(stem).replace_extension(".jsonl"));
        for (const auto& rec : read_records(stem)) {
            Entity e;
            e.category = c;
            for (const auto& [k, v] : rec) {
                if (k == "ID" || k == "id") e.id = v;
                else if (k == "name") e.name = v;
                else if (k == "description") e.description = v;
                else if (k == "url") e.url = v;
                else if (!(csv && v.empty())) e.extras[k] = v;
            }
            if (!field(rec, "ID") && !field(rec, "id")) {
                throw TabularError(stem.string() + ": missing column \"ID\"");
            }
            kb.table(c).push_back(std::move(e));
        }
    }
    const auto rel_stem = dir / "relationships";
    if (table_exists(rel_stem)) {
        found_any = true;
        for (const auto& rec : read_records(rel_stem)) {
            Relationship r;
            r.source_id = required(rec, kRelationshipColumns[0], rel_stem);
            r.source_name = required(rec, kRelationshipColumns[1], rel_stem);
            r.source_type = required(rec, kRelationshipColumns[2], rel_stem);
            r.mapping_type = required(rec, kRelationshipColumns[3], rel_stem);
            r.target_id = required(rec, kRelationshipColumns[4], rel_stem);
            r.target_name = required(rec, kRelationshipColumns[5], rel_stem);
            r.target_type = required(rec, kRelationshipColumns[6], rel_stem);
            const auto* desc = field(rec, kRelationshipColumns[7]);
            r.mapping_description = desc ? *desc : std::string{};
            kb.relationships.push_back(std::move(r));
        }
    }
    if (!found_any) throw TabularError(dir.string() + ": no ATT&CK tables found");
    if (fs::exists(dir / "manifest.json")) {
        const auto manifest = json::parse(read_file(dir / "manifest.json"));
        if (auto v = opt_string(manifest, "version")) kb.version = *v;
    }
    kb.canonicalize();
    return kb;
}

void export_tabular(const KnowledgeBase& kb, const fs::path& dir) {
    fs::create_directories(dir);
    ordered_json counts = ordered_json::object();
    for (auto c : kAllCategories) {
        std::vector<ordered_json> rows;
        for (const auto& e : kb.table(c)) {
            ordered_json row;
            row["ID"] = e.id;
            row["name"] = e.name;
            row["description"] = e.description;
            row["url"] = e.url;
            for (const auto& [k, v] : e.extras) row[k] = v;
            rows.push_back(std::move(row));
        }
        write_jsonl(dir / (std::string(category_name(c)) + ".jsonl"), rows);
        counts[std::string(category_name(c))] = kb.table(c).size();
    }
    std::vector<ordered_json> rels;
    for (const auto& r : kb.relationships) {
        ordered_json row;
        row[kRelationshipColumns[0]] = r.source_id;
        row[kRelationshipColumns[1]] = r.source_name;
        row[kRelationshipColumns[2]] = r.source_type;
        row[kRelationshipColumns[3]] = r.mapping_type;
        row[kRelationshipColumns[4]] = r.target_id;
        row[kRelationshipColumns[5]] = r.target_name;
        row[kRelationshipColumns[6]] = r.target_type;
        row[kRelationshipColumns[7]] = r.mapping_description;
        rels.push_back(std::move(row));
    }
    write_jsonl(dir / "relationships.jsonl", rels);
    counts["relationships"] = kb.relationships.size();

    ordered_json manifest;
    manifest["version"] = kb.version ? ordered_json(*kb.version) : ordered_json(nullptr);
    manifest["counts"] = counts;
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace attackqa
