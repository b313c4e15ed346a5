#include "attackqa/corpus/clean.hpp"

#include "attackqa/common/text.hpp"

namespace attackqa {

namespace {

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
bool is_blank(char c) { return c == ' ' || c == '\t'; }

// Index one past the bracket closing the one at `open`, or npos.
std::size_t match_close(std::string_view s, std::size_t open, char o, char c) {
    int depth = 0;
    for (std::size_t i = open; i < s.size(); ++i) {
        if (s[i] == o) ++depth;
        else if (s[i] == c && --depth == 0) return i + 1;
    }
    return std::string_view::npos;
}

std::string strip_markup(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '[') {
            const auto text_end = match_close(s, i, '[', ']');
            if (text_end != std::string_view::npos && text_end < s.size() && s[text_end] == '(') {
                const auto url_end = match_close(s, text_end, '(', ')');
                if (url_end != std::string_view::npos) {
                    out.append(s.substr(i + 1, text_end - i - 2));
                    i = url_end;
                    continue;
                }
            }
        } else if (s[i] == '<') {
            bool tag = false;
            for (std::string_view t : {"<code>", "</code>"}) {
                if (s.substr(i, t.size()) == t) {
                    i += t.size();
                    tag = true;
                    break;
                }
            }
            if (tag) continue;
        }
        out.push_back(s[i++]);
    }
    return out;
}

// Drops citation spans. When a removed span sat between two whitespace
// characters, one of them goes too so the removal leaves a single gap.
std::string strip_citations(std::string_view s) {
    static constexpr std::string_view kCitation = "(Citation:";
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '(' && s.substr(i, kCitation.size()) == kCitation) {
            const auto end = match_close(s, i, '(', ')');
            if (end != std::string_view::npos) {
                i = end;
                if (!out.empty() && is_ws(out.back()) && i < s.size() && is_ws(s[i])) {
                    if (is_blank(out.back())) out.pop_back();
                    else if (is_blank(s[i])) ++i;
                }
                continue;
            }
        }
        out.push_back(s[i++]);
    }
    return out;
}

// Each line break becomes one space; existing spacing is left alone.
std::string flatten_lines(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\r') {
            if (i + 1 < s.size() && s[i + 1] == '\n') ++i;
            out.push_back(' ');
        } else if (s[i] == '\n') {
            out.push_back(' ');
        } else {
            out.push_back(s[i]);
        }
    }
    return out;
}

std::string rewrite_once(std::string_view s) {
    return text::trim(flatten_lines(strip_citations(strip_markup(s))));
}

}  // namespace

std::string clean_text(std::string_view raw) {
    std::string current = rewrite_once(raw);
    // Link text can itself contain markup; iterate to a fixpoint.
    for (;;) {
        auto next = rewrite_once(current);
        if (next == current) return current;
        current = std::move(next);
    }
}

}  // namespace attackqa
