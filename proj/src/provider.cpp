#include "eloreview/provider.hpp"

#include <fstream>

namespace eloreview {

void to_json(json& j, const CompletionRequest& request) {
    j = json{{"system_prompt", request.system_prompt},
             {"user_messages", request.user_messages},
             {"temperature", request.temperature},
             {"max_output_tokens", request.max_output_tokens},
             {"tag", request.tag}};
}

void from_json(const json& j, CompletionRequest& request) {
    j.at("system_prompt").get_to(request.system_prompt);
    j.at("user_messages").get_to(request.user_messages);
    j.at("temperature").get_to(request.temperature);
    j.at("max_output_tokens").get_to(request.max_output_tokens);
    j.at("tag").get_to(request.tag);
}

void to_json(json& j, const CompletionResponse& response) {
    j = json{{"text", response.text},
             {"latency_ms", response.latency_ms},
             {"prompt_tokens", response.prompt_tokens},
             {"completion_tokens", response.completion_tokens},
             {"provider_id", response.provider_id}};
}

void from_json(const json& j, CompletionResponse& response) {
    j.at("text").get_to(response.text);
    j.at("latency_ms").get_to(response.latency_ms);
    j.at("prompt_tokens").get_to(response.prompt_tokens);
    j.at("completion_tokens").get_to(response.completion_tokens);
    j.at("provider_id").get_to(response.provider_id);
}

void to_json(json& j, const CallRecord& record) {
    j = json{{"request", record.request}, {"attempt", record.attempt}};
    if (record.response) j["response"] = *record.response;
    if (!record.error.empty()) j["error"] = record.error;
}

void from_json(const json& j, CallRecord& record) {
    j.at("request").get_to(record.request);
    j.at("attempt").get_to(record.attempt);
    if (j.contains("response")) record.response = j.at("response").get<CompletionResponse>();
    if (j.contains("error")) j.at("error").get_to(record.error);
}

std::vector<CallRecord> CompletionProvider::drain_log() {
    std::lock_guard lock(log_mutex_);
    std::vector<CallRecord> out;
    out.swap(log_);
    return out;
}

std::vector<CallRecord> CompletionProvider::snapshot_log() const {
    std::lock_guard lock(log_mutex_);
    return log_;
}

void CompletionProvider::log_call(CallRecord record) {
    std::lock_guard lock(log_mutex_);
    log_.push_back(std::move(record));
}

CompletionResponse ScriptedProvider::complete(const CompletionRequest& request) {
    std::string text;
    {
        std::lock_guard lock(mutex_);
        auto it = table_.find(request.tag);
        if (it == table_.end()) {
            const std::string message = "no script entry for tag '" + request.tag + "'";
            log_call({request, std::nullopt, message, 1});
            throw ProviderError(message, request.tag);
        }
        text = it->second;
    }
    CompletionResponse response{text, 0, 0, 0, "scripted"};
    log_call({request, response, "", 1});
    return response;
}

CompletionResponse CallbackProvider::complete(const CompletionRequest& request) {
    std::string text;
    try {
        text = fn_(request);
    } catch (const ProviderError&) {
        log_call({request, std::nullopt, "callback failure", 1});
        throw;
    } catch (const std::exception& e) {
        log_call({request, std::nullopt, e.what(), 1});
        throw ProviderError(e.what(), request.tag);
    }
    CompletionResponse response{text, 0, 0, 0, "callback"};
    log_call({request, response, "", 1});
    return response;
}

ScriptTable load_script_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ProviderError("cannot open script file '" + path.string() + "'", "");

    ScriptTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw ProviderError("script file '" + path.string() + "' line " +
                                    std::to_string(line_no) + ": malformed JSON",
                                "");
        const std::string type = j.value("type", "");
        if (type == "header" || type == "round") continue;
        if (type == "call") {
            auto record = j.get<CallRecord>();
            if (record.response)  // last successful attempt per tag wins
                table[record.request.tag] = record.response->text;
            continue;
        }
        if (j.contains("tag") && j.contains("text")) {
            table[j.at("tag").get<std::string>()] = j.at("text").get<std::string>();
            continue;
        }
        throw ProviderError("script file '" + path.string() + "' line " +
                                std::to_string(line_no) +
                                ": expected a transcript line or {\"tag\", \"text\"}",
                            "");
    }
    return table;
}

std::unique_ptr<ScriptedProvider> scripted_from_transcript(const std::filesystem::path& path) {
    auto table = load_script_table(path);
    if (table.empty())
        throw ProviderError("transcript '" + path.string() + "' contains no call log", "");
    return std::make_unique<ScriptedProvider>(std::move(table));
}

}  // namespace eloreview
