#include "mateval/gateway/http_backend.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace mateval::gateway {

using nlohmann::json;

std::chrono::milliseconds RetryPolicy::delay_for(int retry_index) const {
    double ms = static_cast<double>(initial_delay.count());
    for (int i = 0; i < retry_index; ++i) ms *= multiplier;
    auto capped = std::chrono::milliseconds(static_cast<long long>(ms));
    return capped > max_delay ? max_delay : capped;
}

HttpChatBackend::HttpChatBackend(Options opts) : opts_(std::move(opts)) {
    const char* key = std::getenv(opts_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') throw AuthMissing(opts_.api_key_env);
    api_key_ = key;

    // Split "scheme://host[:port][/prefix]" for httplib.
    auto scheme_end = opts_.base_url.find("://");
    std::size_t path_start = scheme_end == std::string::npos
                                 ? opts_.base_url.find('/')
                                 : opts_.base_url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        host_ = opts_.base_url;
    } else {
        host_ = opts_.base_url.substr(0, path_start);
        path_prefix_ = opts_.base_url.substr(path_start);
        while (!path_prefix_.empty() && path_prefix_.back() == '/') {
            path_prefix_.pop_back();
        }
    }
}

void HttpChatBackend::rate_limit_pause() {
    if (opts_.min_request_interval.count() <= 0) return;
    std::chrono::steady_clock::time_point wake;
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto now = std::chrono::steady_clock::now();
        auto earliest = last_request_ + opts_.min_request_interval;
        wake = earliest > now ? earliest : now;
        last_request_ = wake;
    }
    std::this_thread::sleep_until(wake);
}

std::string HttpChatBackend::complete(const std::string& agent_id,
                                      const Conversation& conversation,
                                      const GenerationParams& params) {
    json body;
    body["model"] = params.model;
    body["temperature"] = params.temperature;
    body["max_tokens"] = params.max_tokens;
    auto& msgs = body["messages"] = json::array();
    for (const auto& m : conversation) {
        msgs.push_back({{"role", std::string(to_string(m.role))},
                        {"content", m.content}});
    }
    const std::string payload = body.dump();
    const std::string path = path_prefix_ + "/chat/completions";
    const httplib::Headers headers = {
        {"Authorization", "Bearer " + api_key_}};

    std::vector<std::chrono::milliseconds> delays;
    std::string last_error;
    for (int attempt = 0; attempt < opts_.retry.max_attempts; ++attempt) {
        if (attempt > 0) {
            auto delay = opts_.retry.delay_for(attempt - 1);
            delays.push_back(delay);
            std::this_thread::sleep_for(delay);
        }
        rate_limit_pause();

        httplib::Client client(host_);
        auto secs = std::chrono::duration_cast<std::chrono::seconds>(params.timeout);
        if (secs.count() < 1) secs = std::chrono::seconds(1);
        client.set_connection_timeout(secs.count(), 0);
        client.set_read_timeout(secs.count(), 0);
        client.set_write_timeout(secs.count(), 0);

        auto res = client.Post(path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;  // timeouts and connection failures are transient
        }
        if (res->status == 200) {
            {
                std::lock_guard<std::mutex> lock(mu_);
                last_delays_ = std::move(delays);
            }
            try {
                json reply = json::parse(res->body);
                return reply.at("choices").at(0).at("message").at("content")
                    .get<std::string>();
            } catch (const json::exception& e) {
                throw Error("malformed chat-completion response for agent '" +
                            agent_id + "': " + e.what());
            }
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        // Non-retryable client error; surface immediately.
        throw Error("backend rejected request for agent '" + agent_id +
                    "': HTTP " + std::to_string(res->status) + " " + res->body);
    }
    {
        std::lock_guard<std::mutex> lock(mu_);
        last_delays_ = std::move(delays);
    }
    throw BackendExhausted(std::to_string(opts_.retry.max_attempts) +
                           " attempts, last failure: " + last_error);
}

std::vector<std::chrono::milliseconds> HttpChatBackend::last_retry_delays() const {
    std::lock_guard<std::mutex> lock(mu_);
    return last_delays_;
}

}  // namespace mateval::gateway
