#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

namespace attackqa {

class Tokenizer {
public:
    virtual ~Tokenizer() = default;
    virtual std::string name() const = 0;
    virtual std::size_t count(std::string_view text) const = 0;
};

/// Splits on whitespace.
class WhitespaceTokenizer final : public Tokenizer {
public:
    std::string name() const override { return "whitespace"; }
    std::size_t count(std::string_view text) const override;
};

/// Offline stand-in for cl100k_base: letter runs cost one token per 8 letters
/// (rounded up), digit runs one per 3 digits, every other visible character one
/// token, whitespace is free. Counts land near cl100k on English prose but are
/// not exact.
class WordPunctTokenizer final : public Tokenizer {
public:
    std::string name() const override { return "wordpunct-approx"; }
    std::size_t count(std::string_view text) const override;
};

/// "whitespace" or "wordpunct-approx" (also accepted: "default").
std::unique_ptr<Tokenizer> make_tokenizer(std::string_view name);

}  // namespace attackqa
