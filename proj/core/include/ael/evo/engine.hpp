#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ael/eval/evaluator.hpp"
#include "ael/evo/config.hpp"
#include "ael/individual.hpp"
#include "ael/llm/operator.hpp"
#include "ael/prompt.hpp"

namespace ael::evo {

using Rng = std::mt19937_64;

/// Uniform integer in [0, n) by rejection sampling; identical across
/// standard library implementations.
std::size_t uniform_index(Rng& rng, std::size_t n);
/// Uniform double in [0, 1) from the top 53 bits.
double uniform_unit(Rng& rng);

/// Generator for one generation (generation 0 is initialization).
Rng generation_rng(std::uint64_t seed, std::size_t generation);

class Population {
public:
    Population() = default;
    Population(std::vector<Individual> members, std::size_t capacity);

    const std::vector<Individual>& members() const noexcept { return members_; }
    std::size_t size() const noexcept { return members_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    bool empty() const noexcept { return members_.empty(); }
    const Individual& operator[](std::size_t k) const { return members_[k]; }

    /// Member with the smallest fitness; ties go to the earlier member.
    const Individual& best() const;
    /// Mean fitness over members with a non-sentinel fitness.
    double mean_fitness() const;

    friend bool operator==(const Population&, const Population&) = default;

private:
    std::vector<Individual> members_;
    std::size_t capacity_ = 0;
};

/// `l` members drawn uniformly, without replacement when l <= size, with
/// replacement otherwise. Draw order is preserved.
std::vector<Individual> select_parents(const Population& population, std::size_t l, Rng& rng);

/// Reduces `pool` to `n` members: unique programs by ascending fitness, then
/// duplicates, then failed members; ties keep insertion order. A pool of at
/// most n members is returned unchanged.
std::vector<Individual> manage_population(std::vector<Individual> pool, std::size_t n,
                                          bool deduplicate = true);

/// What happened to one LLM-created candidate.
struct CreatedRecord {
    std::optional<IndividualId> id;
    OperatorTag op = OperatorTag::Init;
    std::vector<IndividualId> parents;
    std::optional<std::uint64_t> exchange_id;
    std::optional<std::uint64_t> mutation_exchange_id;
    bool mutation_drawn = false;
    /// "ok", "parse_error:<kind>", "mutation_parse_error:<kind>" or "eval_failed".
    std::string outcome = "ok";
    std::string detail;
    /// Fitness when evaluated; nullopt for parse failures, sentinel for failed evaluations.
    std::optional<double> fitness;
};

struct GenerationRecord {
    std::size_t generation = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    std::size_t crossover_attempts = 0;
    std::size_t mutation_attempts = 0;
    std::vector<CreatedRecord> created;
};

struct EvolutionTrace {
    GenerationRecord initial;
    std::vector<GenerationRecord> generations;
    std::vector<std::string> warnings;

    /// Records (initial included) whose outcome starts with `prefix`.
    std::size_t count_outcomes(std::string_view prefix) const;
};

std::string trace_to_json(const EvolutionTrace& trace);
EvolutionTrace trace_from_json(std::string_view text);
/// Rows "generation,best_gap,mean_gap" for generations 1..N_g.
std::string trace_to_csv(const EvolutionTrace& trace);

class InitializationExhausted : public Error {
public:
    using Error::Error;
};

/// Engine state after a generation, enough to resume deterministically.
struct Checkpoint {
    std::string config_hash;
    std::size_t generation = 0;
    IndividualId next_id = 1;
    std::uint64_t llm_calls = 0;
    Population population;
    Individual best;
};

std::string checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(std::string_view text);

std::string individual_to_json(const Individual& individual);
Individual individual_from_json(std::string_view text);

struct EvolutionResult {
    Individual best;
    EvolutionTrace trace;
    Population final_population;
};

/// The evolution loop: LLM creation, uniform selection, LLM crossover and
/// mutation, evaluation and truncation.
class Engine {
public:
    using GenerationCallback = std::function<void(const Checkpoint&, const GenerationRecord&)>;

    Engine(EvolutionConfig config, llm::LlmOperator& llm, const eval::FitnessEvaluator& evaluator,
           prompt::PromptForge forge = prompt::PromptForge(prompt::TaskSpec::tsp()));

    /// Called after initialization (generation 0) and after every generation.
    void on_generation(GenerationCallback callback) { callback_ = std::move(callback); }

    Population initialize_population();
    Population run_generation(const Population& population, std::size_t generation);

    /// Initialization followed by config.generations generations.
    EvolutionResult run();
    /// Continues from a checkpoint up to config.generations. The config hash
    /// must match; the LLM operator is advanced to the recorded call count.
    EvolutionResult resume(const Checkpoint& checkpoint);

    const EvolutionTrace& trace() const noexcept { return trace_; }
    const EvolutionConfig& config() const noexcept { return config_; }

private:
    struct Draft {
        Individual individual;
        CreatedRecord record;
    };

    std::optional<Individual> create(const prompt::PromptBundle& bundle, OperatorTag op,
                                     CreatedRecord& record, bool mutation);
    void evaluate_all(std::vector<Draft>& drafts);
    void track_best(const Population& population);
    Checkpoint checkpoint(const Population& population, std::size_t generation) const;
    GenerationRecord summarize(const Population& population, std::size_t generation,
                               std::vector<CreatedRecord> created) const;
    EvolutionResult evolve(Population population, std::size_t first_generation);

    EvolutionConfig config_;
    llm::LlmOperator& llm_;
    const eval::FitnessEvaluator& evaluator_;
    prompt::PromptForge forge_;
    GenerationCallback callback_;
    EvolutionTrace trace_;
    IndividualId next_id_ = 1;
    std::optional<Individual> best_;
};

}  // namespace ael::evo
