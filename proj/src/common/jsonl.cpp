#include "attackqa/common/jsonl.hpp"

#include <fstream>
#include <sstream>

namespace attackqa {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("write failed for " + path.string());
}

std::string to_jsonl(const std::vector<ordered_json>& rows) {
    std::string out;
    for (const auto& row : rows) {
        out += row.dump(-1, ' ', false, json::error_handler_t::replace);
        out += '\n';
    }
    return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<ordered_json>& rows) {
    write_file(path, to_jsonl(rows));
}

std::vector<json> parse_jsonl(const std::string& content, json* header) {
    std::vector<json> rows;
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start <= content.size()) {
        auto end = content.find('\n', start);
        if (end == std::string::npos) end = content.size();
        std::string_view line(content.data() + start, end - start);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") != std::string_view::npos) {
            json value;
            try {
                value = json::parse(line);
            } catch (const json::parse_error& e) {
                throw IoError("line " + std::to_string(line_no) + ": " + e.what());
            }
            if (rows.empty() && value.is_object() && value.size() == 1 &&
                value.contains("header")) {
                if (header) *header = value["header"];
            } else {
                rows.push_back(std::move(value));
            }
        }
        start = end + 1;
    }
    return rows;
}

std::vector<json> read_jsonl(const std::filesystem::path& path, json* header) {
    try {
        return parse_jsonl(read_file(path), header);
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

std::optional<std::string> opt_string(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (it->is_string()) return it->get<std::string>();
    return it->dump();
}

}  // namespace attackqa
