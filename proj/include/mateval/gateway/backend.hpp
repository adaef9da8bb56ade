#pragma once

#include <atomic>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "mateval/gateway/message.hpp"

namespace mateval::gateway {

/// One call as seen by a backend; kept by test doubles for assertions.
struct RecordedCall {
    std::string agent_id;
    Conversation conversation;
    GenerationParams params;
    std::string reply;
};

/// Uniform chat interface. Implementations must tolerate concurrent calls
/// from different discussions unless documented otherwise.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;

    /// Returns the reply text for the conversation. The conversation must be
    /// non-empty and start with a system message (checked by complete()).
    virtual std::string complete(const std::string& agent_id,
                                 const Conversation& conversation,
                                 const GenerationParams& params) = 0;

    virtual std::string name() const = 0;
};

/// Deterministic backend for tests and offline runs: each agent_id owns a
/// FIFO of scripted replies. Confined to one discussion at a time — replies
/// are positional, so interleaving discussions would corrupt both scripts.
class ScriptedBackend : public ChatBackend {
public:
    ScriptedBackend() = default;

    void load_script(const std::string& agent_id, std::vector<std::string> replies);
    void push_reply(const std::string& agent_id, std::string reply);

    std::string complete(const std::string& agent_id,
                         const Conversation& conversation,
                         const GenerationParams& params) override;

    std::string name() const override { return "scripted"; }

    /// Every call served so far, in order. For test assertions.
    const std::vector<RecordedCall>& calls() const { return calls_; }
    std::size_t call_count() const { return calls_.size(); }
    std::size_t remaining(const std::string& agent_id) const;

private:
    std::map<std::string, std::deque<std::string>> scripts_;
    std::vector<RecordedCall> calls_;
};

/// Decorator enforcing the --max-calls cost guard across a whole run.
/// Thread-safe; throws CallBudgetExceeded once the budget is spent.
class BudgetedBackend : public ChatBackend {
public:
    BudgetedBackend(std::shared_ptr<ChatBackend> inner,
                    std::shared_ptr<std::atomic<int>> remaining, int budget)
        : inner_(std::move(inner)), remaining_(std::move(remaining)),
          budget_(budget) {}

    std::string complete(const std::string& agent_id,
                         const Conversation& conversation,
                         const GenerationParams& params) override;

    std::string name() const override { return inner_->name() + "+budget"; }

private:
    std::shared_ptr<ChatBackend> inner_;
    std::shared_ptr<std::atomic<int>> remaining_;
    int budget_;
};

/// One agent as the engine sees it: an id, a backend, and generation
/// parameters. agent_id must be unique within one discussion.
struct AgentHandle {
    std::string agent_id;
    std::shared_ptr<ChatBackend> backend;
    GenerationParams params;
};

/// Validates the conversation shape and dispatches to the handle's backend.
std::string complete(const AgentHandle& handle, const Conversation& conversation);

}  // namespace mateval::gateway
