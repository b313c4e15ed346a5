#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace attackqa::text {

std::string trim(std::string_view s);

/// Collapses every run of whitespace (including newlines) to one space and trims.
std::string normalize_ws(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix) noexcept;
bool ends_with(std::string_view s, std::string_view suffix) noexcept;

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Splits on ". ", "! ", "? " boundaries; each sentence keeps its terminator.
std::vector<std::string> sentences(std::string_view s);

std::string replace_all(std::string s, std::string_view from, std::string_view to);

std::string to_lower(std::string_view s);

}  // namespace attackqa::text
