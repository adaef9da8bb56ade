#include "mateval/gateway/transcript.hpp"

#include <chrono>
#include <ctime>

namespace mateval::gateway {

using nlohmann::json;

namespace {

std::string now_utc_iso8601() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json conversation_to_json(const Conversation& c) {
    json arr = json::array();
    for (const auto& m : c) {
        arr.push_back({{"role", std::string(to_string(m.role))},
                       {"content", m.content}});
    }
    return arr;
}

Conversation conversation_from_json(const json& arr) {
    Conversation c;
    for (const auto& m : arr) {
        c.push_back(Message{role_from_string(m.at("role").get<std::string>()),
                            m.at("content").get<std::string>()});
    }
    return c;
}

}  // namespace

json transcript_entry_to_json(const TranscriptEntry& e) {
    return json{{"ts", e.timestamp},
                {"agent_id", e.agent_id},
                {"request",
                 {{"model", e.params.model},
                  {"temperature", e.params.temperature},
                  {"max_tokens", e.params.max_tokens},
                  {"messages", conversation_to_json(e.request)}}},
                {"reply", e.reply}};
}

TranscriptEntry transcript_entry_from_json(const json& j) {
    TranscriptEntry e;
    e.timestamp = j.value("ts", "");
    j.at("agent_id").get_to(e.agent_id);
    const auto& req = j.at("request");
    req.at("model").get_to(e.params.model);
    e.params.temperature = req.value("temperature", 0.0);
    e.params.max_tokens = req.value("max_tokens", 1024);
    e.request = conversation_from_json(req.at("messages"));
    j.at("reply").get_to(e.reply);
    return e;
}

TranscriptWriter::TranscriptWriter(const std::filesystem::path& path)
    : path_(path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    out_.open(path, std::ios::app);
    if (!out_) throw StorageFailure("cannot open " + path.string());
}

TranscriptEntry TranscriptWriter::record(const std::string& agent_id,
                                         const Conversation& conversation,
                                         const GenerationParams& params,
                                         const std::string& reply) {
    TranscriptEntry e{now_utc_iso8601(), agent_id, params, conversation, reply};
    std::lock_guard<std::mutex> lock(mu_);
    out_ << transcript_entry_to_json(e).dump() << '\n';
    out_.flush();
    if (!out_) throw StorageFailure("write failed on " + path_.string());
    return e;
}

std::string RecordingBackend::complete(const std::string& agent_id,
                                       const Conversation& conversation,
                                       const GenerationParams& params) {
    std::string reply = inner_->complete(agent_id, conversation, params);
    writer_->record(agent_id, conversation, params, reply);
    return reply;
}

std::string replay_key(const std::string& agent_id,
                       const Conversation& conversation) {
    json j = {{"agent_id", agent_id},
              {"messages", conversation_to_json(conversation)}};
    return j.dump();
}

std::shared_ptr<ReplayBackend> ReplayBackend::load(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw StorageFailure("cannot open transcript " + path.string());
    auto backend = std::make_shared<ReplayBackend>();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        TranscriptEntry e;
        try {
            e = transcript_entry_from_json(json::parse(line));
        } catch (const std::exception& ex) {
            throw MalformedLine(line_no, ex.what());
        }
        backend->replies_[replay_key(e.agent_id, e.request)].push_back(e.reply);
        backend->entry_count_++;
    }
    return backend;
}

std::string ReplayBackend::complete(const std::string& agent_id,
                                    const Conversation& conversation,
                                    const GenerationParams& params) {
    (void)params;  // replay matches on conversation content only
    std::string key = replay_key(agent_id, conversation);
    std::lock_guard<std::mutex> lock(mu_);
    auto it = replies_.find(key);
    if (it == replies_.end()) {
        throw ReplayMiss("no recorded reply for agent '" + agent_id +
                         "' and this conversation");
    }
    std::size_t& cur = cursor_[key];
    if (cur >= it->second.size()) {
        throw ReplayMiss("recorded replies for agent '" + agent_id +
                         "' exhausted for this conversation");
    }
    return it->second[cur++];
}

}  // namespace mateval::gateway
