#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "mateval/gateway/backend.hpp"

namespace mateval::gateway {

/// One persisted backend call: request, params, reply, wall-clock stamp.
struct TranscriptEntry {
    std::string timestamp;  // ISO-8601 UTC
    std::string agent_id;
    GenerationParams params;
    Conversation request;
    std::string reply;
};

nlohmann::json transcript_entry_to_json(const TranscriptEntry& e);
TranscriptEntry transcript_entry_from_json(const nlohmann::json& j);

/// Appends call records to a JSON Lines file, one call per line.
/// Thread-safe: the transcript store accepts concurrent appends from
/// different discussions.
class TranscriptWriter {
public:
    /// Throws StorageFailure when the file cannot be opened.
    explicit TranscriptWriter(const std::filesystem::path& path);

    /// Persists one call and returns the appended entry.
    TranscriptEntry record(const std::string& agent_id,
                           const Conversation& conversation,
                           const GenerationParams& params,
                           const std::string& reply);

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::mutex mu_;
};

/// Decorator that persists every call passing through it.
class RecordingBackend : public ChatBackend {
public:
    RecordingBackend(std::shared_ptr<ChatBackend> inner,
                     std::shared_ptr<TranscriptWriter> writer)
        : inner_(std::move(inner)), writer_(std::move(writer)) {}

    std::string complete(const std::string& agent_id,
                         const Conversation& conversation,
                         const GenerationParams& params) override;

    std::string name() const override { return inner_->name() + "+record"; }

private:
    std::shared_ptr<ChatBackend> inner_;
    std::shared_ptr<TranscriptWriter> writer_;
};

/// Serves recorded replies byte-identically, keyed by (agent_id, request
/// messages); repeats of the same conversation replay in recorded order.
/// Throws ReplayMiss for conversations absent from the transcript.
class ReplayBackend : public ChatBackend {
public:
    /// Throws StorageFailure when the file cannot be read, MalformedLine on
    /// broken JSONL.
    static std::shared_ptr<ReplayBackend> load(const std::filesystem::path& path);

    std::string complete(const std::string& agent_id,
                         const Conversation& conversation,
                         const GenerationParams& params) override;

    std::string name() const override { return "replay"; }

    std::size_t entry_count() const { return entry_count_; }

private:
    std::map<std::string, std::vector<std::string>> replies_;
    std::map<std::string, std::size_t> cursor_;
    std::mutex mu_;
    std::size_t entry_count_ = 0;
};

/// Canonical replay key for a call.
std::string replay_key(const std::string& agent_id, const Conversation& conversation);

}  // namespace mateval::gateway
