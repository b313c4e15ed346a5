#include "attackqa/gateway/chat.hpp"

#include "attackqa/common/text.hpp"

namespace attackqa::gateway {

namespace {

constexpr std::string_view kStart = "<|start_header_id|>";
constexpr std::string_view kEnd = "<|end_header_id|>";
constexpr std::string_view kEot = "<|eot_id|>";

}  // namespace

std::vector<ChatMessage> to_chat_messages(std::string_view prompt) {
    std::vector<ChatMessage> out;
    auto pos = prompt.find(kStart);
    if (pos == std::string_view::npos) {
        auto content = text::trim(strip_special_tags(prompt));
        if (!content.empty()) out.push_back({"user", std::move(content)});
        return out;
    }
    while (pos != std::string_view::npos) {
        const auto role_begin = pos + kStart.size();
        const auto role_end = prompt.find(kEnd, role_begin);
        if (role_end == std::string_view::npos) break;
        const auto role = text::trim(prompt.substr(role_begin, role_end - role_begin));
        const auto body_begin = role_end + kEnd.size();
        const auto next = prompt.find(kStart, body_begin);
        auto body = prompt.substr(body_begin, next == std::string_view::npos
                                                  ? std::string_view::npos
                                                  : next - body_begin);
        if (auto eot = body.find(kEot); eot != std::string_view::npos) body = body.substr(0, eot);
        auto content = text::trim(strip_special_tags(body));
        if (role == "system" || role == "user" || role == "assistant") {
            out.push_back({role, std::move(content)});
        } else if (!content.empty()) {
            out.push_back({"user", std::move(content)});
        }
        pos = next;
    }
    return out;
}

std::string strip_special_tags(std::string_view prompt) {
    std::string out;
    out.reserve(prompt.size());
    std::size_t i = 0;
    while (i < prompt.size()) {
        if (prompt.compare(i, 2, "<|") == 0) {
            const auto close = prompt.find("|>", i + 2);
            if (close != std::string_view::npos) {
                i = close + 2;
                continue;
            }
        }
        out.push_back(prompt[i++]);
    }
    return out;
}

}  // namespace attackqa::gateway
