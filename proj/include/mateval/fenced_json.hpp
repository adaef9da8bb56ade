#pragma once

#include <optional>
#include <string_view>

#include <json.hpp>

namespace mateval {

/// Extracts and parses the first fenced code block (``` or ```json) from
/// agent output. Falls back to parsing the whole trimmed text when no fence
/// is present. Returns nullopt when nothing parses as JSON.
std::optional<nlohmann::json> extract_fenced_json(std::string_view reply);

}  // namespace mateval
