#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace attackqa {

enum class SetCount { One, Two, Three };

/// "one set", "two sets", "three sets".
std::string_view set_count_phrase(SetCount count) noexcept;

/// Under 80 tokens one set, 80 to 250 two, above 250 three.
SetCount choose_set_count(std::size_t doc_tokens) noexcept;

/// Llama 3 prompt asking for up to three {question, thought, answer,
/// references} objects from one document.
std::string build_docgen_prompt(std::string_view doc_text, SetCount count);
/// Same with the count phrase given verbatim.
std::string build_docgen_prompt(std::string_view doc_text, std::string_view count_phrase);

/// Same frame with a fixed question: asks for one {thought, answer,
/// references} object.
std::string build_templated_prompt(std::string_view doc_text, std::string_view question);

}  // namespace attackqa
