#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace attackqa::json_repair {

/// Text from the first `open` to the last `close`, inclusive. nullopt when
/// either is missing or they are out of order.
std::optional<std::string> outer_span(std::string_view text, char open, char close);

/// Doubles every backslash that does not start a valid JSON escape, so raw
/// Windows paths such as "HKEY_CURRENT_USER\Software" survive parsing.
std::string escape_lone_backslashes(std::string_view text);

/// Escapes raw newlines, carriage returns and tabs inside string literals.
std::string escape_raw_controls(std::string_view text);

}  // namespace attackqa::json_repair
