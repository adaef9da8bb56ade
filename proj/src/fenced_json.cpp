#include "mateval/fenced_json.hpp"

namespace mateval {

std::optional<nlohmann::json> extract_fenced_json(std::string_view reply) {
    std::string_view rest = reply;
    while (true) {
        auto open = rest.find("```");
        if (open == std::string_view::npos) break;
        auto content_start = rest.find('\n', open);
        if (content_start == std::string_view::npos) break;
        ++content_start;
        auto close = rest.find("```", content_start);
        if (close == std::string_view::npos) break;
        std::string_view block = rest.substr(content_start, close - content_start);
        auto parsed = nlohmann::json::parse(block, nullptr, false);
        if (!parsed.is_discarded()) return parsed;
        rest = rest.substr(close + 3);  // malformed block; try the next fence
    }
    // No usable fence; maybe the reply is bare JSON.
    std::size_t b = reply.find_first_not_of(" \t\r\n");
    std::size_t e = reply.find_last_not_of(" \t\r\n");
    if (b == std::string_view::npos) return std::nullopt;
    std::string_view trimmed = reply.substr(b, e - b + 1);
    if (!trimmed.empty() && (trimmed.front() == '[' || trimmed.front() == '{')) {
        auto parsed = nlohmann::json::parse(trimmed, nullptr, false);
        if (!parsed.is_discarded()) return parsed;
    }
    return std::nullopt;
}

}  // namespace mateval
