#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace attackqa::gateway {

struct ChatMessage {
    std::string role;
    std::string content;
    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

/// Splits a Llama 3 tagged prompt into chat messages, dropping the special
/// tags. Header blocks with other role names become user turns, or vanish
/// when empty (the trailing response header). Untagged text is one user turn.
std::vector<ChatMessage> to_chat_messages(std::string_view prompt);

/// Removes every "<|...|>" tag, leaving the text between them.
std::string strip_special_tags(std::string_view prompt);

}  // namespace attackqa::gateway
