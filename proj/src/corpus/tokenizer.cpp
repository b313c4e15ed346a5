#include "attackqa/corpus/tokenizer.hpp"

#include <cctype>
#include <stdexcept>

namespace attackqa {

std::size_t WhitespaceTokenizer::count(std::string_view text) const {
    std::size_t n = 0;
    bool in_token = false;
    for (char c : text) {
        const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (!space && !in_token) ++n;
        in_token = !space;
    }
    return n;
}

std::size_t WordPunctTokenizer::count(std::string_view text) const {
    std::size_t n = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (std::isspace(c)) {
            ++i;
        } else if (std::isalpha(c) || c >= 0x80) {
            std::size_t len = 0;
            while (i < text.size() && (std::isalpha(static_cast<unsigned char>(text[i])) ||
                                       static_cast<unsigned char>(text[i]) >= 0x80)) {
                ++i;
                ++len;
            }
            n += (len + 7) / 8;
        } else if (std::isdigit(c)) {
            std::size_t len = 0;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
                ++i;
                ++len;
            }
            n += (len + 2) / 3;
        } else {
            ++n;
            ++i;
        }
    }
    return n;
}

std::unique_ptr<Tokenizer> make_tokenizer(std::string_view name) {
    if (name == "whitespace") return std::make_unique<WhitespaceTokenizer>();
    if (name == "wordpunct-approx" || name == "default" || name.empty()) {
        return std::make_unique<WordPunctTokenizer>();
    }
    throw std::invalid_argument("unknown tokenizer \"" + std::string(name) + "\"");
}

}  // namespace attackqa
