#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eloreview/domain.hpp"

namespace eloreview {

struct CompletionRequest {
    std::string system_prompt;
    std::vector<std::string> user_messages;
    double temperature = 0.0;
    int max_output_tokens = 1024;
    // Uniquely identifies the call site within a run,
    // e.g. "round3/syn-0007/r2/initial".
    std::string tag;

    friend bool operator==(const CompletionRequest&, const CompletionRequest&) = default;
};

struct CompletionResponse {
    std::string text;
    std::int64_t latency_ms = 0;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    std::string provider_id;

    friend bool operator==(const CompletionResponse&, const CompletionResponse&) = default;
};

// One attempt at one call site. Failed attempts keep the request and carry
// the error text instead of a response.
struct CallRecord {
    CompletionRequest request;
    std::optional<CompletionResponse> response;
    std::string error;
    int attempt = 1;

    friend bool operator==(const CallRecord&, const CallRecord&) = default;
};

void to_json(json& j, const CompletionRequest& request);
void from_json(const json& j, CompletionRequest& request);
void to_json(json& j, const CompletionResponse& response);
void from_json(const json& j, CompletionResponse& response);
void to_json(json& j, const CallRecord& record);
void from_json(const json& j, CallRecord& record);

struct ProviderError : std::runtime_error {
    ProviderError(const std::string& message, std::string call_tag)
        : std::runtime_error(message), tag(std::move(call_tag)) {}
    std::string tag;
};

// The single boundary through which agents obtain text. complete() may be
// called from several threads at once; the call log is internally
// synchronized and records every attempt in completion order.
class CompletionProvider {
public:
    virtual ~CompletionProvider() = default;

    virtual CompletionResponse complete(const CompletionRequest& request) = 0;

    // Moves the accumulated call records out.
    std::vector<CallRecord> drain_log();
    std::vector<CallRecord> snapshot_log() const;

protected:
    void log_call(CallRecord record);

private:
    mutable std::mutex log_mutex_;
    std::vector<CallRecord> log_;
};

using ScriptTable = std::map<std::string, std::string>;

// Deterministic provider answering each tag from a fixed table. Missing
// tags are an error naming the tag.
class ScriptedProvider : public CompletionProvider {
public:
    explicit ScriptedProvider(ScriptTable table) : table_(std::move(table)) {}

    CompletionResponse complete(const CompletionRequest& request) override;

    std::size_t size() const { return table_.size(); }

private:
    ScriptTable table_;
    std::mutex mutex_;
};

// Test/tooling provider that computes the response from the request.
class CallbackProvider : public CompletionProvider {
public:
    using Fn = std::function<std::string(const CompletionRequest&)>;
    explicit CallbackProvider(Fn fn) : fn_(std::move(fn)) {}

    CompletionResponse complete(const CompletionRequest& request) override;

private:
    Fn fn_;
};

// Reads a script table from a file: either a transcript (its embedded call
// log becomes the table, keeping the last successful response per tag) or a
// plain JSONL table of {"tag": ..., "text": ...} objects.
ScriptTable load_script_table(const std::filesystem::path& path);

std::unique_ptr<ScriptedProvider> scripted_from_transcript(const std::filesystem::path& path);

// Live HTTP provider for chat-completion style endpoints. Retries transient
// transport failures with exponential backoff, fails immediately on
// authentication errors, and enforces the configured concurrency cap and
// token-bucket rate limit.
std::unique_ptr<CompletionProvider> make_http_provider(const ProviderSettings& settings,
                                                       std::string api_key);

}  // namespace eloreview
