#include "ael/evo/engine.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "../parallel.hpp"
#include "ael/llm/parse.hpp"

namespace ael::evo {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double fitness_or_sentinel(const Individual& ind) {
    return ind.fitness ? *ind.fitness : kSentinelFitness;
}

std::vector<IndividualId> ids_of(std::span<const Individual> individuals) {
    std::vector<IndividualId> ids;
    ids.reserve(individuals.size());
    for (const auto& ind : individuals) {
        ids.push_back(ind.id);
    }
    return ids;
}

constexpr std::string_view kGreedyDescription =
    "Chooses the unvisited node nearest to the current node at every step.";

}  // namespace

std::size_t uniform_index(Rng& rng, std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = Rng::max() - (Rng::max() % bound + 1) % bound;
    while (true) {
        const std::uint64_t x = rng();
        if (x <= limit) {
            return static_cast<std::size_t>(x % bound);
        }
    }
}

double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Rng generation_rng(std::uint64_t seed, std::size_t generation) {
    return Rng(splitmix64(splitmix64(seed) ^ (0xa5a5a5a5ULL + generation)));
}

Population::Population(std::vector<Individual> members, std::size_t capacity)
    : members_(std::move(members)), capacity_(capacity) {
    std::unordered_set<IndividualId> ids;
    for (const auto& m : members_) {
        if (!ids.insert(m.id).second) {
            throw Error("population holds duplicate id " + std::to_string(m.id));
        }
    }
}

const Individual& Population::best() const {
    if (members_.empty()) {
        throw Error("best() of an empty population");
    }
    const Individual* best = &members_.front();
    for (const auto& m : members_) {
        if (fitness_or_sentinel(m) < fitness_or_sentinel(*best)) {
            best = &m;
        }
    }
    return *best;
}

double Population::mean_fitness() const {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& m : members_) {
        if (m.fitness && !m.failed()) {
            sum += *m.fitness;
            ++count;
        }
    }
    return count > 0 ? sum / static_cast<double>(count) : kSentinelFitness;
}

std::vector<Individual> select_parents(const Population& population, std::size_t l, Rng& rng) {
    const std::size_t n = population.size();
    if (n == 0) {
        throw Error("select_parents: empty population");
    }
    std::vector<Individual> parents;
    parents.reserve(l);
    if (l <= n) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        for (std::size_t i = 0; i < l; ++i) {
            std::swap(idx[i], idx[i + uniform_index(rng, n - i)]);
            parents.push_back(population[idx[i]]);
        }
    } else {
        for (std::size_t i = 0; i < l; ++i) {
            parents.push_back(population[uniform_index(rng, n)]);
        }
    }
    return parents;
}

std::vector<Individual> manage_population(std::vector<Individual> pool, std::size_t n, bool deduplicate) {
    if (pool.size() <= n) {
        return pool;
    }
    // 0: first valid copy of a program, 1: valid duplicate, 2: failed.
    std::vector<int> rank(pool.size(), 0);
    std::unordered_set<std::string> seen;
    for (std::size_t k = 0; k < pool.size(); ++k) {
        if (!pool[k].fitness || pool[k].failed()) {
            rank[k] = 2;
        } else if (deduplicate && !seen.insert(pool[k].program.canonical_text()).second) {
            rank[k] = 1;
        }
    }
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rank[a] != rank[b]) {
            return rank[a] < rank[b];
        }
        return fitness_or_sentinel(pool[a]) < fitness_or_sentinel(pool[b]);
    });
    std::vector<Individual> kept;
    kept.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        kept.push_back(std::move(pool[order[k]]));
    }
    return kept;
}

std::size_t EvolutionTrace::count_outcomes(std::string_view prefix) const {
    std::size_t count = 0;
    auto scan = [&](const GenerationRecord& g) {
        for (const auto& r : g.created) {
            if (r.outcome.starts_with(prefix)) {
                ++count;
            }
        }
    };
    scan(initial);
    for (const auto& g : generations) {
        scan(g);
    }
    return count;
}

Engine::Engine(EvolutionConfig config, llm::LlmOperator& llm, const eval::FitnessEvaluator& evaluator,
               prompt::PromptForge forge)
    : config_(std::move(config)), llm_(llm), evaluator_(evaluator), forge_(std::move(forge)) {
    config_.validate();
}

std::optional<Individual> Engine::create(const prompt::PromptBundle& bundle, OperatorTag op,
                                         CreatedRecord& record, bool mutation) {
    const auto exchange = llm_.chat(bundle);
    (mutation ? record.mutation_exchange_id : record.exchange_id) = exchange.id;
    try {
        auto parsed = llm::parse_individual(exchange.raw_response, forge_.task());
        Individual ind;
        ind.description = std::move(parsed.description);
        ind.program = std::move(parsed.program);
        ind.lineage = {op, bundle.parent_ids};
        return ind;
    } catch (const llm::ParseError& e) {
        record.outcome = std::string(mutation ? "mutation_parse_error:" : "parse_error:") +
                         std::string(llm::to_string(e.kind()));
        record.detail = e.what();
        return std::nullopt;
    }
}

void Engine::evaluate_all(std::vector<Draft>& drafts) {
    std::vector<std::size_t> pending;
    for (std::size_t k = 0; k < drafts.size(); ++k) {
        if (drafts[k].record.id) {
            pending.push_back(k);
        }
    }
    detail::parallel_for(pending.size(), config_.parallel, [&](std::size_t i) {
        auto& draft = drafts[pending[i]];
        const auto report = evaluator_.evaluate(draft.individual.program);
        draft.individual.fitness = report.fitness();
        draft.record.fitness = report.fitness();
        if (!report.ok) {
            draft.record.outcome = "eval_failed";
            draft.record.detail = report.failure();
        }
    });
}

GenerationRecord Engine::summarize(const Population& population, std::size_t generation,
                                   std::vector<CreatedRecord> created) const {
    GenerationRecord record;
    record.generation = generation;
    record.best_fitness = fitness_or_sentinel(population.best());
    record.mean_fitness = population.mean_fitness();
    record.created = std::move(created);
    return record;
}

void Engine::track_best(const Population& population) {
    const auto& candidate = population.best();
    if (!best_ || fitness_or_sentinel(candidate) < fitness_or_sentinel(*best_)) {
        best_ = candidate;
    }
}

Checkpoint Engine::checkpoint(const Population& population, std::size_t generation) const {
    return {config_hash(config_), generation, next_id_, llm_.calls(), population, *best_};
}

Population Engine::initialize_population() {
    const std::size_t n = config_.population_size;
    const std::size_t limit = config_.init_attempt_limit();
    std::vector<Individual> members;
    std::vector<CreatedRecord> created;
    std::size_t attempts = 0;

    // Each round asks for exactly the missing number of individuals, so the
    // sequence of LLM calls matches a one-at-a-time loop.
    while (members.size() < n && attempts < limit) {
        const std::size_t want = std::min(n - members.size(), limit - attempts);
        std::vector<Draft> drafts;
        for (std::size_t i = 0; i < want; ++i) {
            ++attempts;
            Draft draft;
            draft.record.op = OperatorTag::Init;
            if (auto ind = create(forge_.render_init(), OperatorTag::Init, draft.record, false)) {
                draft.individual = std::move(*ind);
                draft.individual.id = next_id_++;
                draft.record.id = draft.individual.id;
            }
            drafts.push_back(std::move(draft));
        }
        evaluate_all(drafts);
        for (auto& d : drafts) {
            if (d.record.id && !d.individual.failed()) {
                members.push_back(std::move(d.individual));
            }
            created.push_back(std::move(d.record));
        }
    }

    if (members.size() < n) {
        const std::size_t missing = n - members.size();
        if (!config_.backfill_with_greedy) {
            throw InitializationExhausted("only " + std::to_string(members.size()) + " of " +
                                          std::to_string(n) + " initial individuals after " +
                                          std::to_string(attempts) + " attempts");
        }
        const auto report = evaluator_.evaluate(CandidateProgram::greedy());
        if (!report.ok) {
            throw InitializationExhausted("greedy backfill failed to evaluate: " + report.failure());
        }
        trace_.warnings.push_back("initialization produced " + std::to_string(members.size()) + " of " +
                                  std::to_string(n) + " individuals in " + std::to_string(attempts) +
                                  " attempts; backfilled " + std::to_string(missing) + " with greedy");
        for (std::size_t k = 0; k < missing; ++k) {
            Individual ind;
            ind.id = next_id_++;
            ind.description = std::string(kGreedyDescription);
            ind.program = CandidateProgram::greedy();
            ind.fitness = report.fitness();
            ind.lineage = {OperatorTag::Backfill, {}};
            CreatedRecord rec;
            rec.id = ind.id;
            rec.op = OperatorTag::Backfill;
            rec.fitness = ind.fitness;
            created.push_back(std::move(rec));
            members.push_back(std::move(ind));
        }
    }

    Population population(std::move(members), n);
    trace_.initial = summarize(population, 0, std::move(created));
    track_best(population);
    if (callback_) {
        callback_(checkpoint(population, 0), trace_.initial);
    }
    return population;
}

Population Engine::run_generation(const Population& population, std::size_t generation) {
    const std::size_t iterations = config_.population_size;
    const std::size_t s = config_.offspring_per_crossover;

    // All random decisions are drawn up front, in iteration order.
    struct Plan {
        std::vector<Individual> parents;
        bool crossover = false;
        std::vector<char> mutate;
    };
    auto rng = generation_rng(config_.rng_seed, generation);
    std::vector<Plan> plans(iterations);
    for (auto& plan : plans) {
        plan.parents = select_parents(population, config_.parents_per_crossover, rng);
        plan.crossover = uniform_unit(rng) < config_.crossover_prob;
        plan.mutate.resize(s);
        for (auto& m : plan.mutate) {
            m = uniform_unit(rng) < config_.mutation_prob;
        }
    }

    std::size_t crossover_attempts = 0;
    std::size_t mutation_attempts = 0;
    std::vector<Draft> drafts;
    for (const auto& plan : plans) {
        if (!plan.crossover) {
            continue;
        }
        const auto crossover_prompt = forge_.render_crossover(plan.parents);
        for (std::size_t k = 0; k < s; ++k) {
            Draft draft;
            draft.record.op = OperatorTag::Crossover;
            draft.record.parents = ids_of(plan.parents);
            ++crossover_attempts;
            auto child = create(crossover_prompt, OperatorTag::Crossover, draft.record, false);
            if (!child) {
                drafts.push_back(std::move(draft));
                continue;
            }
            child->id = next_id_++;
            draft.record.id = child->id;
            draft.record.mutation_drawn = plan.mutate[k];
            if (plan.mutate[k]) {
                ++mutation_attempts;
                if (auto mutated = create(forge_.render_mutation(*child), OperatorTag::Mutation, draft.record, true)) {
                    child->description = std::move(mutated->description);
                    child->program = std::move(mutated->program);
                    child->lineage.op = OperatorTag::Mutation;
                    draft.record.op = OperatorTag::Mutation;
                }
            }
            draft.individual = std::move(*child);
            drafts.push_back(std::move(draft));
        }
    }
    evaluate_all(drafts);

    std::vector<Individual> pool = population.members();
    std::vector<CreatedRecord> created;
    for (auto& d : drafts) {
        if (d.record.id) {
            pool.push_back(std::move(d.individual));
        }
        created.push_back(std::move(d.record));
    }
    Population next(manage_population(std::move(pool), config_.population_size, config_.deduplicate),
                    config_.population_size);

    auto record = summarize(next, generation, std::move(created));
    record.crossover_attempts = crossover_attempts;
    record.mutation_attempts = mutation_attempts;
    trace_.generations.push_back(record);
    track_best(next);
    if (callback_) {
        callback_(checkpoint(next, generation), trace_.generations.back());
    }
    return next;
}

EvolutionResult Engine::evolve(Population population, std::size_t first_generation) {
    for (std::size_t g = first_generation; g <= config_.generations; ++g) {
        population = run_generation(population, g);
    }
    return {*best_, trace_, std::move(population)};
}

EvolutionResult Engine::run() {
    trace_ = {};
    next_id_ = 1;
    best_.reset();
    auto population = initialize_population();
    return evolve(std::move(population), 1);
}

EvolutionResult Engine::resume(const Checkpoint& cp) {
    if (cp.config_hash != config_hash(config_)) {
        throw ConfigError("checkpoint was written with a different configuration (hash " + cp.config_hash +
                          ", current " + config_hash(config_) + ")");
    }
    trace_ = {};
    trace_.initial.generation = cp.generation;
    next_id_ = cp.next_id;
    best_ = cp.best;
    if (cp.llm_calls > llm_.calls()) {
        llm_.skip(cp.llm_calls - llm_.calls());
    }
    return evolve(cp.population, cp.generation + 1);
}

}  // namespace ael::evo
