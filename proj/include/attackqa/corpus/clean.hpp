#pragma once

#include <string>
#include <string_view>

namespace attackqa {

/// Rewrites ATT&CK markdown into plain text: "[X](url)" becomes "X",
/// "(Citation: ...)" spans and <code> tags are dropped, each line break becomes
/// one space, and the result is trimmed. A citation removed from between two
/// spaces leaves one space. Other spacing is preserved as written. Idempotent.
std::string clean_text(std::string_view raw);

}  // namespace attackqa
