#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mateval/errors.hpp"

namespace mateval::gateway {

enum class Role { system, user, assistant };

std::string_view to_string(Role r);
Role role_from_string(std::string_view s);

struct Message {
    Role role = Role::user;
    std::string content;  // non-empty

    static Message system(std::string content) {
        return Message{Role::system, std::move(content)};
    }
    static Message user(std::string content) {
        return Message{Role::user, std::move(content)};
    }
    static Message assistant(std::string content) {
        return Message{Role::assistant, std::move(content)};
    }
};

using Conversation = std::vector<Message>;

struct GenerationParams {
    std::string model = "gpt-4";
    double temperature = 0.0;  // zero for reproducibility
    int max_tokens = 1024;
    std::chrono::milliseconds timeout{30000};
};

void to_json(nlohmann::json& j, const GenerationParams& p);
void from_json(const nlohmann::json& j, GenerationParams& p);

}  // namespace mateval::gateway
