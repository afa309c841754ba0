#include <chrono>
#include <condition_variable>
#include <thread>

#include <httplib.h>

#include "eloreview/provider.hpp"

namespace eloreview {

namespace {

struct ParsedEndpoint {
    std::string base;    // scheme://host[:port]
    std::string prefix;  // path prefix, possibly empty
};

ParsedEndpoint parse_endpoint(const std::string& endpoint) {
    if (endpoint.rfind("http://", 0) != 0 && endpoint.rfind("https://", 0) != 0)
        throw ProviderError("endpoint '" + endpoint + "' must start with http:// or https://", "");
    const auto scheme_end = endpoint.find("://");
    const auto path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {endpoint, ""};
    std::string prefix = endpoint.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {endpoint.substr(0, path_start), prefix};
}

bool transient_status(int status) {
    return status == 408 || status == 429 || (status >= 500 && status < 600);
}

// Counting semaphore bounding in-flight requests.
class ConcurrencyGate {
public:
    explicit ConcurrencyGate(int slots) : slots_(slots) {}

    void acquire() {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [this] { return slots_ > 0; });
        --slots_;
    }

    void release() {
        {
            std::lock_guard lock(mutex_);
            ++slots_;
        }
        cv_.notify_one();
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int slots_;
};

// Token bucket: `rate` tokens per second, burst up to `burst`. A rate of 0
// disables limiting.
class TokenBucket {
public:
    TokenBucket(double rate, double burst)
        : rate_(rate), burst_(burst), tokens_(burst), last_(Clock::now()) {}

    void take() {
        if (rate_ <= 0.0) return;
        std::unique_lock lock(mutex_);
        for (;;) {
            refill();
            if (tokens_ >= 1.0) {
                tokens_ -= 1.0;
                return;
            }
            const double deficit = 1.0 - tokens_;
            const auto wait = std::chrono::duration<double>(deficit / rate_);
            lock.unlock();
            std::this_thread::sleep_for(wait);
            lock.lock();
        }
    }

private:
    using Clock = std::chrono::steady_clock;

    void refill() {
        const auto now = Clock::now();
        const double elapsed = std::chrono::duration<double>(now - last_).count();
        tokens_ = std::min(burst_, tokens_ + elapsed * rate_);
        last_ = now;
    }

    std::mutex mutex_;
    double rate_;
    double burst_;
    double tokens_;
    Clock::time_point last_;
};

class HttpProvider : public CompletionProvider {
public:
    HttpProvider(ProviderSettings settings, std::string api_key)
        : settings_(std::move(settings)),
          api_key_(std::move(api_key)),
          endpoint_(parse_endpoint(settings_.endpoint)),
          gate_(settings_.concurrency),
          bucket_(settings_.requests_per_second,
                  std::max(1.0, static_cast<double>(settings_.concurrency))) {
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
        if (endpoint_.base.rfind("https://", 0) == 0)
            throw ProviderError("built without TLS support; https endpoints unavailable", "");
#endif
    }

    CompletionResponse complete(const CompletionRequest& request) override {
        gate_.acquire();
        struct Release {
            ConcurrencyGate& gate;
            ~Release() { gate.release(); }
        } release{gate_};

        std::string last_error;
        const int attempts = settings_.max_retries + 1;
        for (int attempt = 1; attempt <= attempts; ++attempt) {
            if (attempt > 1) {
                const auto backoff = std::chrono::milliseconds(
                    settings_.retry_backoff_ms << (attempt - 2));
                std::this_thread::sleep_for(backoff);
            }
            bucket_.take();
            auto outcome = try_once(request, attempt);
            if (outcome.response) return *outcome.response;
            last_error = outcome.error;
            if (outcome.fatal) break;
        }
        throw ProviderError("provider call '" + request.tag + "' failed: " + last_error,
                            request.tag);
    }

private:
    struct Outcome {
        std::optional<CompletionResponse> response;
        std::string error;
        bool fatal = false;
    };

    Outcome try_once(const CompletionRequest& request, int attempt) {
        json messages = json::array();
        messages.push_back({{"role", "system"}, {"content", request.system_prompt}});
        for (const auto& user : request.user_messages)
            messages.push_back({{"role", "user"}, {"content", user}});
        const json body = {{"model", settings_.model},
                           {"messages", messages},
                           {"temperature", request.temperature},
                           {"max_tokens", request.max_output_tokens}};

        httplib::Client client(endpoint_.base);
        client.set_connection_timeout(30);
        client.set_read_timeout(300);
        client.set_bearer_token_auth(api_key_);

        const auto start = std::chrono::steady_clock::now();
        auto result = client.Post(endpoint_.prefix + "/chat/completions", body.dump(),
                                  "application/json");
        const auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();

        Outcome outcome;
        if (!result) {
            outcome.error = "transport error: " + httplib::to_string(result.error());
            log_call({request, std::nullopt, outcome.error, attempt});
            return outcome;
        }
        if (result->status == 401 || result->status == 403) {
            outcome.error = "authentication failure (HTTP " +
                            std::to_string(result->status) + ")";
            outcome.fatal = true;
            log_call({request, std::nullopt, outcome.error, attempt});
            return outcome;
        }
        if (result->status != 200) {
            outcome.error = "HTTP " + std::to_string(result->status);
            outcome.fatal = !transient_status(result->status);
            log_call({request, std::nullopt, outcome.error, attempt});
            return outcome;
        }

        json reply = json::parse(result->body, nullptr, false);
        if (reply.is_discarded()) {
            outcome.error = "response body is not JSON";
            log_call({request, std::nullopt, outcome.error, attempt});
            return outcome;
        }
        try {
            CompletionResponse response;
            response.text = reply.at("choices").at(0).at("message").at("content")
                                .get<std::string>();
            response.latency_ms = latency;
            if (reply.contains("usage")) {
                response.prompt_tokens = reply["usage"].value("prompt_tokens", 0);
                response.completion_tokens = reply["usage"].value("completion_tokens", 0);
            }
            response.provider_id = settings_.model;
            log_call({request, response, "", attempt});
            outcome.response = std::move(response);
        } catch (const std::exception& e) {
            outcome.error = std::string("unexpected response shape: ") + e.what();
            log_call({request, std::nullopt, outcome.error, attempt});
        }
        return outcome;
    }

    ProviderSettings settings_;
    std::string api_key_;
    ParsedEndpoint endpoint_;
    ConcurrencyGate gate_;
    TokenBucket bucket_;
};

}  // namespace

std::unique_ptr<CompletionProvider> make_http_provider(const ProviderSettings& settings,
                                                       std::string api_key) {
    if (settings.endpoint.empty())
        throw ProviderError("live provider requires a configured endpoint", "");
    if (api_key.empty())
        throw ProviderError("live provider requires an API key (set ELOREVIEW_API_KEY)", "");
    return std::make_unique<HttpProvider>(settings, std::move(api_key));
}

}  // namespace eloreview
