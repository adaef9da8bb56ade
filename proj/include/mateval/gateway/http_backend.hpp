#pragma once

#include <chrono>
#include <mutex>
#include <string>
#include <vector>

#include "mateval/gateway/backend.hpp"

namespace mateval::gateway {

/// Exponential backoff schedule. Delays strictly increase per burst until
/// the ceiling, then stay at the ceiling.
struct RetryPolicy {
    int max_attempts = 4;  // total tries, including the first
    std::chrono::milliseconds initial_delay{500};
    double multiplier = 2.0;
    std::chrono::milliseconds max_delay{30000};

    std::chrono::milliseconds delay_for(int retry_index) const;
};

/// Live backend speaking the de-facto chat-completion HTTP JSON protocol:
/// POST {base_url}/chat/completions with bearer-token auth. The base URL is
/// configurable so any compatible provider or a local stub works. Transient
/// failures (429, 5xx, timeouts, connection errors) are retried with
/// exponential backoff; a per-backend rate limiter bounds the request rate.
class HttpChatBackend : public ChatBackend {
public:
    struct Options {
        std::string base_url = "https://api.openai.com/v1";
        std::string api_key_env = "MATEVAL_API_KEY";
        RetryPolicy retry;
        std::chrono::milliseconds min_request_interval{0};
    };

    /// Throws AuthMissing when the credential env var is unset or empty.
    explicit HttpChatBackend(Options opts);

    std::string complete(const std::string& agent_id,
                         const Conversation& conversation,
                         const GenerationParams& params) override;

    std::string name() const override { return "http:" + opts_.base_url; }

    /// Backoff delays of the most recent retry burst, for diagnostics and
    /// tests. Empty when the last call succeeded first try.
    std::vector<std::chrono::milliseconds> last_retry_delays() const;

private:
    void rate_limit_pause();

    Options opts_;
    std::string api_key_;
    std::string host_;  // scheme://host[:port]
    std::string path_prefix_;
    mutable std::mutex mu_;
    std::chrono::steady_clock::time_point last_request_{};
    std::vector<std::chrono::milliseconds> last_delays_;
};

}  // namespace mateval::gateway
