#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "ael/errors.hpp"
#include "ael/prompt.hpp"

namespace ael::llm {

/// Connection and sampling settings for the chat-completion operator.
struct LlmSettings {
    std::string model = "gpt-3.5-turbo";
    double temperature_init = 1.0;
    double temperature_crossover = 1.0;
    double temperature_mutation = 1.0;
    int max_retries = 3;
    std::string base_url = "https://api.openai.com";
    /// Environment variable holding the bearer token.
    std::string api_key_env = "AEL_LLM_API_KEY";
    double request_timeout_s = 120.0;
    double backoff_initial_s = 1.0;
    double backoff_max_s = 30.0;

    double temperature_for(prompt::PromptKind kind) const;

    friend bool operator==(const LlmSettings&, const LlmSettings&) = default;
};

/// One request/response pair as seen by the engine.
struct LlmExchange {
    std::uint64_t id = 0;
    prompt::PromptKind kind = prompt::PromptKind::Init;
    std::string prompt;
    std::vector<std::uint64_t> parent_ids;
    std::string raw_response;
    std::string model;
    double latency_ms = 0.0;
    int attempt = 1;
};

class LlmUnavailable : public Error {
public:
    using Error::Error;
};

class AuthError : public Error {
public:
    using Error::Error;
};

class ScriptExhausted : public Error {
public:
    using Error::Error;
};

class ReplayMismatch : public Error {
public:
    using Error::Error;
};

/// Anything that turns a prompt into a model response.
class LlmOperator {
public:
    virtual ~LlmOperator() = default;

    virtual LlmExchange chat(const prompt::PromptBundle& prompt) = 0;

    /// Number of exchanges served so far.
    virtual std::uint64_t calls() const = 0;

    /// Advances past `n` exchanges without serving them (used when resuming
    /// from a checkpoint). Operators without state may ignore it.
    virtual void skip(std::uint64_t n) = 0;
};

}  // namespace ael::llm
