#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include "ael/llm/operator.hpp"

namespace ael::llm {

/// Returns canned responses in order. Throws ScriptExhausted once they run out.
class ScriptedLlm : public LlmOperator {
public:
    explicit ScriptedLlm(std::vector<std::string> responses, std::string model = "mock");
    ScriptedLlm(ScriptedLlm&& other) noexcept
        : responses_(std::move(other.responses_)), model_(std::move(other.model_)), cursor_(other.cursor_) {}

    /// Script file: one JSON value per line, either a string or an object with
    /// a "response" (or "raw_response") member. Blank lines are ignored.
    static ScriptedLlm from_file(const std::filesystem::path& path);

    LlmExchange chat(const prompt::PromptBundle& prompt) override;
    std::uint64_t calls() const override;
    void skip(std::uint64_t n) override;

    std::size_t remaining() const;

private:
    mutable std::mutex mutex_;
    std::vector<std::string> responses_;
    std::string model_;
    std::uint64_t cursor_ = 0;
};

/// Append-only JSON-lines log of exchanges.
class TranscriptWriter {
public:
    explicit TranscriptWriter(const std::filesystem::path& path);
    void append(const LlmExchange& exchange);

private:
    std::mutex mutex_;
    std::ofstream out_;
};

std::string exchange_to_json(const LlmExchange& exchange);
LlmExchange exchange_from_json(const std::string& line);
std::vector<LlmExchange> read_transcript(const std::filesystem::path& path);

/// Replays a recorded transcript. Each request must carry the same prompt
/// text as the recorded one, otherwise ReplayMismatch is thrown.
class ReplayLlm : public LlmOperator {
public:
    explicit ReplayLlm(std::vector<LlmExchange> transcript);
    ReplayLlm(ReplayLlm&& other) noexcept : transcript_(std::move(other.transcript_)), cursor_(other.cursor_) {}
    static ReplayLlm from_file(const std::filesystem::path& path);

    LlmExchange chat(const prompt::PromptBundle& prompt) override;
    std::uint64_t calls() const override;
    void skip(std::uint64_t n) override;

private:
    mutable std::mutex mutex_;
    std::vector<LlmExchange> transcript_;
    std::uint64_t cursor_ = 0;
};

/// Forwards to another operator and appends every exchange to a transcript.
class RecordingLlm : public LlmOperator {
public:
    RecordingLlm(LlmOperator& inner, TranscriptWriter& writer) : inner_(inner), writer_(writer) {}

    LlmExchange chat(const prompt::PromptBundle& prompt) override;
    std::uint64_t calls() const override { return inner_.calls(); }
    void skip(std::uint64_t n) override { inner_.skip(n); }

private:
    LlmOperator& inner_;
    TranscriptWriter& writer_;
};

/// Offline stand-in for a model that writes score-with-threshold programs.
/// The response is a pure function of (seed, prompt text): parents are read
/// back from the fenced blocks of the prompt, recombined or perturbed, and
/// returned in the expected output format.
class SyntheticLlm : public LlmOperator {
public:
    explicit SyntheticLlm(std::uint64_t seed) : seed_(seed) {}

    LlmExchange chat(const prompt::PromptBundle& prompt) override;
    std::uint64_t calls() const override;
    void skip(std::uint64_t n) override;

private:
    std::uint64_t seed_;
    mutable std::mutex mutex_;
    std::uint64_t calls_ = 0;
};

}  // namespace ael::llm
