#include "attackqa/common/json_repair.hpp"

#include <cctype>

namespace attackqa::json_repair {

std::optional<std::string> outer_span(std::string_view text, char open, char close) {
    const auto first = text.find(open);
    const auto last = text.rfind(close);
    if (first == std::string_view::npos || last == std::string_view::npos || last < first) {
        return std::nullopt;
    }
    return std::string(text.substr(first, last - first + 1));
}

std::string escape_lone_backslashes(std::string_view text) {
    std::string out;
    out.reserve(text.size() + 8);
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c != '\\') {
            out.push_back(c);
            continue;
        }
        const char next = i + 1 < text.size() ? text[i + 1] : '\0';
        switch (next) {
            case '"': case '\\': case '/': case 'b': case 'f': case 'n': case 'r': case 't':
                out.push_back(c);
                out.push_back(next);
                ++i;
                continue;
            case 'u': {
                bool hex4 = true;
                for (std::size_t k = 2; hex4 && k < 6; ++k) {
                    hex4 = i + k < text.size() &&
                           std::isxdigit(static_cast<unsigned char>(text[i + k])) != 0;
                }
                if (hex4) {
                    out.append(text.substr(i, 6));
                    i += 5;
                    continue;
                }
                break;
            }
            default:
                break;
        }
        out += "\\\\";
    }
    return out;
}

std::string escape_raw_controls(std::string_view text) {
    std::string out;
    out.reserve(text.size() + 8);
    bool in_string = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (!in_string) {
            if (c == '"') in_string = true;
            out.push_back(c);
            continue;
        }
        if (c == '\\' && i + 1 < text.size()) {
            out.push_back(c);
            out.push_back(text[++i]);
        } else if (c == '"') {
            in_string = false;
            out.push_back(c);
        } else if (c == '\n') {
            out += "\\n";
        } else if (c == '\r') {
            out += "\\r";
        } else if (c == '\t') {
            out += "\\t";
        } else {
            out.push_back(c);
        }
    }
    return out;
}

}  // namespace attackqa::json_repair
