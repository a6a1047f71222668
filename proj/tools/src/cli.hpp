#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ael/evo/config.hpp"
#include "ael/individual.hpp"
#include "ael/tsp/instance.hpp"

namespace ael::cli {

/// Process exit codes of the `ael` tool.
enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kConfigError = 2,
    kLlmError = 3,
    kCandidateFailed = 4,
};

/// Everything needed to identify and reproduce a run directory.
struct RunManifest {
    evo::EvolutionConfig config;
    /// live, mock:PATH, replay:PATH or synthetic:SEED.
    std::string llm_mode;
    std::string transcript;
    std::string output_dir;
    std::string started_at;
    std::string finished_at;
    std::optional<Individual> best;

    friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

std::string manifest_to_json(const RunManifest& manifest);
/// Throws ConfigError on malformed input.
RunManifest manifest_from_json(std::string_view text);

/// Closed tour drawn over the instance; the start node is highlighted.
std::string route_svg(const tsp::Instance& instance, std::span<const tsp::NodeId> order);

/// Entry point of the command-line tool; returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ael::cli
