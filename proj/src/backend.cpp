#include "mateval/gateway/backend.hpp"

namespace mateval::gateway {

std::string_view to_string(Role r) {
    switch (r) {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::assistant: return "assistant";
    }
    return "user";
}

Role role_from_string(std::string_view s) {
    if (s == "system") return Role::system;
    if (s == "user") return Role::user;
    if (s == "assistant") return Role::assistant;
    throw InvalidState("unknown message role: " + std::string(s));
}

void to_json(nlohmann::json& j, const GenerationParams& p) {
    j = nlohmann::json{{"model", p.model},
                       {"temperature", p.temperature},
                       {"max_tokens", p.max_tokens},
                       {"timeout_ms", p.timeout.count()}};
}

void from_json(const nlohmann::json& j, GenerationParams& p) {
    p.model = j.value("model", "gpt-4");
    p.temperature = j.value("temperature", 0.0);
    p.max_tokens = j.value("max_tokens", 1024);
    p.timeout = std::chrono::milliseconds(j.value("timeout_ms", 30000));
}

void ScriptedBackend::load_script(const std::string& agent_id,
                                  std::vector<std::string> replies) {
    auto& q = scripts_[agent_id];
    for (auto& r : replies) q.push_back(std::move(r));
}

void ScriptedBackend::push_reply(const std::string& agent_id, std::string reply) {
    scripts_[agent_id].push_back(std::move(reply));
}

std::string ScriptedBackend::complete(const std::string& agent_id,
                                      const Conversation& conversation,
                                      const GenerationParams& params) {
    auto it = scripts_.find(agent_id);
    if (it == scripts_.end() || it->second.empty()) throw ScriptUnderflow(agent_id);
    std::string reply = std::move(it->second.front());
    it->second.pop_front();
    calls_.push_back(RecordedCall{agent_id, conversation, params, reply});
    return reply;
}

std::size_t ScriptedBackend::remaining(const std::string& agent_id) const {
    auto it = scripts_.find(agent_id);
    return it == scripts_.end() ? 0 : it->second.size();
}

std::string BudgetedBackend::complete(const std::string& agent_id,
                                      const Conversation& conversation,
                                      const GenerationParams& params) {
    int before = remaining_->fetch_sub(1);
    if (before <= 0) {
        remaining_->fetch_add(1);  // pin the counter instead of drifting down
        throw CallBudgetExceeded(budget_);
    }
    return inner_->complete(agent_id, conversation, params);
}

std::string complete(const AgentHandle& handle, const Conversation& conversation) {
    if (conversation.empty()) {
        throw InvalidState("conversation must be non-empty");
    }
    if (conversation.front().role != Role::system) {
        throw InvalidState("conversation must start with a system message");
    }
    for (const auto& m : conversation) {
        if (m.content.empty()) throw InvalidState("message content must be non-empty");
    }
    return handle.backend->complete(handle.agent_id, conversation, handle.params);
}

}  // namespace mateval::gateway
