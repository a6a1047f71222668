#include "ael/llm/mock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ael/llm/parse.hpp"

namespace ael::llm {

namespace {

using nlohmann::json;

prompt::PromptKind kind_from_string(std::string_view s) {
    if (s == "init") return prompt::PromptKind::Init;
    if (s == "crossover") return prompt::PromptKind::Crossover;
    if (s == "mutation") return prompt::PromptKind::Mutation;
    throw IoError("transcript: unknown prompt kind '" + std::string(s) + "'");
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double gaussian(std::mt19937_64& rng) {
    const double u1 = 1.0 - unit_double(rng);
    const double u2 = unit_double(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Rounds to 1e-3 so generated programs read like hand-written ones.
double tidy(double v) { return std::round(v * 1000.0) / 1000.0; }

std::vector<tsp::ScoredParams> parents_in(std::string_view prompt) {
    std::vector<tsp::ScoredParams> parents;
    std::string_view rest = prompt;
    while (true) {
        const auto open = rest.find("```");
        if (open == std::string_view::npos) {
            break;
        }
        const auto block = first_code_block(rest.substr(open));
        // Skip past this block whether or not it parsed.
        auto close = rest.find("```", open + 3);
        if (close == std::string_view::npos) {
            break;
        }
        if (block) {
            try {
                if (const auto native = CandidateProgram::parse_native(*block)) {
                    if (const auto* s = std::get_if<NativeScored>(&native->variant())) {
                        parents.push_back(s->params);
                    } else {
                        parents.push_back(tsp::ScoredParams{});
                    }
                }
            } catch (const MalformedProgram&) {
            }
        }
        const auto nl = rest.find('\n', close);
        close = (nl == std::string_view::npos) ? rest.size() : nl;
        rest = rest.substr(std::min(close + 1, rest.size()));
    }
    return parents;
}

std::string describe(const tsp::ScoredParams& p) {
    std::ostringstream out;
    out << "Scores every unvisited node by " << format_number(p.c1) << " times its distance from the "
        << "current node, minus " << format_number(p.c2) << " times its mean distance to the other "
        << "unvisited nodes, plus " << format_number(p.c3) << " times the spread of those distances, "
        << "minus " << format_number(p.c4) << " times its distance to the destination. "
        << "The node with the lowest score is chosen next.";
    return out.str();
}

}  // namespace

double LlmSettings::temperature_for(prompt::PromptKind kind) const {
    switch (kind) {
        case prompt::PromptKind::Init: return temperature_init;
        case prompt::PromptKind::Crossover: return temperature_crossover;
        case prompt::PromptKind::Mutation: return temperature_mutation;
    }
    return temperature_init;
}

ScriptedLlm::ScriptedLlm(std::vector<std::string> responses, std::string model)
    : responses_(std::move(responses)), model_(std::move(model)) {}

ScriptedLlm ScriptedLlm::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read mock script " + path.string());
    }
    std::vector<std::string> responses;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            const auto value = json::parse(line);
            if (value.is_string()) {
                responses.push_back(value.get<std::string>());
            } else if (value.contains("response")) {
                responses.push_back(value.at("response").get<std::string>());
            } else {
                responses.push_back(value.at("raw_response").get<std::string>());
            }
        } catch (const json::exception& e) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return ScriptedLlm(std::move(responses));
}

LlmExchange ScriptedLlm::chat(const prompt::PromptBundle& prompt) {
    std::lock_guard lock(mutex_);
    if (cursor_ >= responses_.size()) {
        throw ScriptExhausted("mock script exhausted after " + std::to_string(responses_.size()) +
                              " responses");
    }
    LlmExchange ex;
    ex.id = cursor_;
    ex.kind = prompt.kind;
    ex.prompt = prompt.text;
    ex.parent_ids = prompt.parent_ids;
    ex.raw_response = responses_[cursor_];
    ex.model = model_;
    ++cursor_;
    return ex;
}

std::uint64_t ScriptedLlm::calls() const {
    std::lock_guard lock(mutex_);
    return cursor_;
}

void ScriptedLlm::skip(std::uint64_t n) {
    std::lock_guard lock(mutex_);
    cursor_ += n;
}

std::size_t ScriptedLlm::remaining() const {
    std::lock_guard lock(mutex_);
    return cursor_ >= responses_.size() ? 0 : responses_.size() - cursor_;
}

std::string exchange_to_json(const LlmExchange& ex) {
    json doc;
    doc["id"] = ex.id;
    doc["kind"] = std::string(prompt::to_string(ex.kind));
    doc["prompt"] = ex.prompt;
    doc["parent_ids"] = ex.parent_ids;
    doc["raw_response"] = ex.raw_response;
    doc["model"] = ex.model;
    doc["latency_ms"] = ex.latency_ms;
    doc["attempt"] = ex.attempt;
    return doc.dump();
}

LlmExchange exchange_from_json(const std::string& line) {
    try {
        const auto doc = json::parse(line);
        LlmExchange ex;
        ex.id = doc.at("id").get<std::uint64_t>();
        ex.kind = kind_from_string(doc.at("kind").get<std::string>());
        ex.prompt = doc.at("prompt").get<std::string>();
        ex.parent_ids = doc.value("parent_ids", std::vector<std::uint64_t>{});
        ex.raw_response = doc.at("raw_response").get<std::string>();
        ex.model = doc.value("model", std::string{});
        ex.latency_ms = doc.value("latency_ms", 0.0);
        ex.attempt = doc.value("attempt", 1);
        return ex;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed transcript record: ") + e.what());
    }
}

TranscriptWriter::TranscriptWriter(const std::filesystem::path& path)
    : out_(path, std::ios::app | std::ios::binary) {
    if (!out_) {
        throw IoError("cannot open transcript " + path.string());
    }
}

void TranscriptWriter::append(const LlmExchange& exchange) {
    std::lock_guard lock(mutex_);
    out_ << exchange_to_json(exchange) << '\n';
    out_.flush();
}

std::vector<LlmExchange> read_transcript(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read transcript " + path.string());
    }
    std::vector<LlmExchange> records;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            records.push_back(exchange_from_json(line));
        }
    }
    return records;
}

ReplayLlm::ReplayLlm(std::vector<LlmExchange> transcript) : transcript_(std::move(transcript)) {}

ReplayLlm ReplayLlm::from_file(const std::filesystem::path& path) {
    return ReplayLlm(read_transcript(path));
}

LlmExchange ReplayLlm::chat(const prompt::PromptBundle& prompt) {
    std::lock_guard lock(mutex_);
    if (cursor_ >= transcript_.size()) {
        throw ScriptExhausted("replay transcript exhausted after " +
                              std::to_string(transcript_.size()) + " exchanges");
    }
    const auto& recorded = transcript_[cursor_];
    if (recorded.prompt != prompt.text) {
        throw ReplayMismatch("replay: prompt of exchange " + std::to_string(recorded.id) +
                             " differs from the recorded one");
    }
    ++cursor_;
    return recorded;
}

std::uint64_t ReplayLlm::calls() const {
    std::lock_guard lock(mutex_);
    return cursor_;
}

void ReplayLlm::skip(std::uint64_t n) {
    std::lock_guard lock(mutex_);
    cursor_ += n;
}

LlmExchange RecordingLlm::chat(const prompt::PromptBundle& prompt) {
    auto ex = inner_.chat(prompt);
    writer_.append(ex);
    return ex;
}

LlmExchange SyntheticLlm::chat(const prompt::PromptBundle& prompt) {
    LlmExchange ex;
    {
        std::lock_guard lock(mutex_);
        ex.id = calls_++;
    }
    // The call index keeps repeated identical prompts (initialization) apart.
    std::mt19937_64 rng(fnv1a(prompt.text) ^ (seed_ * 0x9e3779b97f4a7c15ULL) ^ (ex.id * 0xbf58476d1ce4e5b9ULL));
    const auto parents = parents_in(prompt.text);

    tsp::ScoredParams p;
    if (prompt.kind == prompt::PromptKind::Init || parents.empty()) {
        p.c1 = tidy(0.25 + 0.75 * unit_double(rng));
        p.c2 = tidy(unit_double(rng));
        p.c3 = tidy(unit_double(rng));
        p.c4 = tidy(unit_double(rng));
    } else if (prompt.kind == prompt::PromptKind::Crossover) {
        auto pick = [&](auto member) {
            const auto& a = parents[rng() % parents.size()];
            const auto& b = parents[rng() % parents.size()];
            const double w = unit_double(rng);
            return std::max(0.0, tidy(w * a.*member + (1.0 - w) * b.*member + 0.05 * gaussian(rng)));
        };
        p.c1 = pick(&tsp::ScoredParams::c1);
        p.c2 = pick(&tsp::ScoredParams::c2);
        p.c3 = pick(&tsp::ScoredParams::c3);
        p.c4 = pick(&tsp::ScoredParams::c4);
        p.tau = parents.front().tau;
    } else {
        p = parents.front();
        auto jitter = [&](double v) { return std::max(0.0, tidy(v + 0.15 * gaussian(rng))); };
        p.c1 = jitter(p.c1);
        p.c2 = jitter(p.c2);
        p.c3 = jitter(p.c3);
        p.c4 = jitter(p.c4);
    }

    ex.kind = prompt.kind;
    ex.prompt = prompt.text;
    ex.parent_ids = prompt.parent_ids;
    ex.raw_response = format_individual(describe(p), CandidateProgram::scored(p));
    ex.model = "synthetic";
    return ex;
}

std::uint64_t SyntheticLlm::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

void SyntheticLlm::skip(std::uint64_t n) {
    std::lock_guard lock(mutex_);
    calls_ += n;
}

}  // namespace ael::llm
