#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace attackqa {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// One compact JSON value per line, '\n' terminated. Key order is preserved for
// ordered_json so artifacts are byte-stable.
std::string to_jsonl(const std::vector<ordered_json>& rows);
void write_jsonl(const std::filesystem::path& path, const std::vector<ordered_json>& rows);

// Blank lines are skipped. A first line holding only a "header" object is
// never returned as a row; it is stored in `header` when that is non-null.
std::vector<json> read_jsonl(const std::filesystem::path& path, json* header = nullptr);
std::vector<json> parse_jsonl(const std::string& content, json* header = nullptr);

std::optional<std::string> opt_string(const json& j, const char* key);

}  // namespace attackqa
