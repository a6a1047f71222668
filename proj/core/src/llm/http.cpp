#include "ael/llm/http.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace ael::llm {

namespace {

using nlohmann::json;

// Splits "scheme://host[:port][/prefix]" into the origin and the path prefix.
std::pair<std::string, std::string> split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto slash = url.find('/', host_start);
    if (slash == std::string::npos) {
        return {url, ""};
    }
    auto prefix = url.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') {
        prefix.pop_back();
    }
    return {url.substr(0, slash), prefix};
}

}  // namespace

double BackoffPolicy::delay_for_retry(int retry) const {
    return std::min(max_s, initial_s * std::pow(2.0, std::max(0, retry - 1)));
}

HttpLlm::HttpLlm(LlmSettings settings) : HttpLlm(settings, [&] {
    const char* key = std::getenv(settings.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
        throw AuthError("environment variable " + settings.api_key_env + " is not set");
    }
    return std::string(key);
}()) {}

HttpLlm::HttpLlm(LlmSettings settings, std::string api_key, Sleeper sleeper)
    : settings_(std::move(settings)),
      api_key_(std::move(api_key)),
      sleeper_(std::move(sleeper)),
      backoff_{settings_.backoff_initial_s, settings_.backoff_max_s} {
    if (!sleeper_) {
        sleeper_ = [](double s) { std::this_thread::sleep_for(std::chrono::duration<double>(s)); };
    }
    auto [origin, prefix] = split_url(settings_.base_url);
    scheme_host_port_ = std::move(origin);
    path_ = prefix + "/v1/chat/completions";
}

std::string HttpLlm::request_body(const prompt::PromptBundle& prompt) const {
    json body;
    body["model"] = settings_.model;
    body["messages"] = json::array({{{"role", "user"}, {"content", prompt.text}}});
    body["temperature"] = settings_.temperature_for(prompt.kind);
    return body.dump();
}

LlmExchange HttpLlm::chat(const prompt::PromptBundle& prompt) {
    std::uint64_t request_id = 0;
    {
        std::lock_guard lock(mutex_);
        request_id = calls_++;
    }
    const auto body = request_body(prompt);

    httplib::Client client(scheme_host_port_);
    const auto timeout = std::chrono::duration<double>(settings_.request_timeout_s);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_bearer_token_auth(api_key_);

    const int max_attempts = std::max(0, settings_.max_retries) + 1;
    std::string last_error;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        AttemptRecord record{request_id, attempt, 0, {}, 0.0};
        if (attempt > 1) {
            record.delay_before_s = backoff_.delay_for_retry(attempt - 1);
            sleeper_(record.delay_before_s);
        }
        const auto started = std::chrono::steady_clock::now();
        auto result = client.Post(path_, body, "application/json");
        const double latency_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();

        if (!result) {
            record.error = httplib::to_string(result.error());
        } else {
            record.http_status = result->status;
            if (result->status == 401 || result->status == 403) {
                record.error = "authentication rejected";
                std::lock_guard lock(mutex_);
                attempts_.push_back(record);
                throw AuthError("LLM endpoint rejected credentials (HTTP " +
                                std::to_string(result->status) + ")");
            }
            if (result->status == 200) {
                try {
                    const auto doc = json::parse(result->body);
                    LlmExchange ex;
                    ex.id = request_id;
                    ex.kind = prompt.kind;
                    ex.prompt = prompt.text;
                    ex.parent_ids = prompt.parent_ids;
                    ex.raw_response = doc.at("choices").at(0).at("message").at("content").get<std::string>();
                    ex.model = doc.value("model", settings_.model);
                    ex.latency_ms = latency_ms;
                    ex.attempt = attempt;
                    std::lock_guard lock(mutex_);
                    attempts_.push_back(record);
                    return ex;
                } catch (const json::exception& e) {
                    record.error = std::string("malformed response body: ") + e.what();
                }
            } else if (result->status == 429 || result->status >= 500) {
                record.error = "HTTP " + std::to_string(result->status);
            } else {
                record.error = "HTTP " + std::to_string(result->status) + ": " + result->body.substr(0, 200);
                std::lock_guard lock(mutex_);
                attempts_.push_back(record);
                throw LlmUnavailable("LLM request failed: " + record.error);
            }
        }
        last_error = record.error;
        std::lock_guard lock(mutex_);
        attempts_.push_back(record);
    }
    throw LlmUnavailable("LLM unavailable after " + std::to_string(max_attempts) +
                         " attempts: " + last_error);
}

std::uint64_t HttpLlm::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

void HttpLlm::skip(std::uint64_t n) {
    std::lock_guard lock(mutex_);
    calls_ += n;
}

std::vector<AttemptRecord> HttpLlm::attempt_log() const {
    std::lock_guard lock(mutex_);
    return attempts_;
}

}  // namespace ael::llm
