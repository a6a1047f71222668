#pragma once

#include <chrono>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "ael/llm/operator.hpp"

namespace ael::llm {

/// Exponential backoff: initial * 2^k, capped at max.
struct BackoffPolicy {
    double initial_s = 1.0;
    double max_s = 30.0;

    double delay_for_retry(int retry) const;
};

/// One failed or successful HTTP attempt, kept for auditing.
struct AttemptRecord {
    std::uint64_t request = 0;
    int attempt = 0;
    int http_status = 0;  // 0 when the transport failed
    std::string error;
    double delay_before_s = 0.0;
};

/// Chat-completion client for OpenAI-compatible endpoints.
///
/// Sends POST {base_url}/v1/chat/completions with
///   {"model", "messages": [{"role": "user", "content": <prompt>}], "temperature"}
/// and a bearer token read from the environment variable named in the
/// settings. The response text is choices[0].message.content.
///
/// Transport errors, HTTP 429 and 5xx are retried up to max_retries times;
/// 401/403 raise AuthError immediately.
class HttpLlm : public LlmOperator {
public:
    using Sleeper = std::function<void(double seconds)>;

    /// Reads the API key from settings.api_key_env; throws AuthError if unset.
    explicit HttpLlm(LlmSettings settings);
    HttpLlm(LlmSettings settings, std::string api_key, Sleeper sleeper = {});

    LlmExchange chat(const prompt::PromptBundle& prompt) override;
    std::uint64_t calls() const override;
    void skip(std::uint64_t n) override;

    std::vector<AttemptRecord> attempt_log() const;

    /// Request body for a prompt; exposed for tests.
    std::string request_body(const prompt::PromptBundle& prompt) const;

private:
    LlmSettings settings_;
    std::string api_key_;
    Sleeper sleeper_;
    BackoffPolicy backoff_;
    std::string scheme_host_port_;
    std::string path_;

    mutable std::mutex mutex_;
    std::uint64_t calls_ = 0;
    std::vector<AttemptRecord> attempts_;
};

}  // namespace ael::llm
