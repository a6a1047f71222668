#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "ael/errors.hpp"
#include "ael/llm/operator.hpp"

namespace ael::evo {

/// Hyperparameters of one evolution run.
struct EvolutionConfig {
    std::size_t population_size = 10;
    std::size_t generations = 10;
    double crossover_prob = 1.0;
    double mutation_prob = 0.2;
    std::size_t parents_per_crossover = 2;
    std::size_t offspring_per_crossover = 1;
    std::uint64_t rng_seed = 2024;

    std::size_t evaluation_instance_count = 64;
    std::size_t evaluation_instance_size = 50;
    std::size_t baseline_restarts = 5;
    double evaluation_timeout_s = 60.0;

    /// LLM creation attempts allowed during initialization; 0 means 3*N.
    std::size_t max_init_attempts = 0;
    /// Fill missing initial slots with the greedy individual instead of failing.
    bool backfill_with_greedy = true;
    /// Drop exact-duplicate programs before truncation.
    bool deduplicate = true;
    /// Worker threads for fitness evaluation.
    unsigned parallel = 1;

    llm::LlmSettings llm;

    std::size_t init_attempt_limit() const {
        return max_init_attempts > 0 ? max_init_attempts : 3 * population_size;
    }

    /// Throws ConfigError on out-of-range values.
    void validate() const;

    friend bool operator==(const EvolutionConfig&, const EvolutionConfig&) = default;
};

/// JSON object whose keys mirror the field names; "llm" is a nested object.
/// Missing keys keep their defaults, unknown keys are rejected.
std::string config_to_json(const EvolutionConfig& config);
EvolutionConfig config_from_json(std::string_view text);
EvolutionConfig load_config(const std::filesystem::path& path);

/// Hash of every setting that influences results (excludes generations,
/// parallelism and transport details).
std::string config_hash(const EvolutionConfig& config);

}  // namespace ael::evo
