#include "ael/evo/config.hpp"

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ael::evo {

namespace {

using nlohmann::json;

json llm_to_json(const llm::LlmSettings& s) {
    return json{
        {"model", s.model},
        {"temperature_init", s.temperature_init},
        {"temperature_crossover", s.temperature_crossover},
        {"temperature_mutation", s.temperature_mutation},
        {"max_retries", s.max_retries},
        {"base_url", s.base_url},
        {"api_key_env", s.api_key_env},
        {"request_timeout_s", s.request_timeout_s},
        {"backoff_initial_s", s.backoff_initial_s},
        {"backoff_max_s", s.backoff_max_s},
    };
}

json to_json_object(const EvolutionConfig& c) {
    return json{
        {"population_size", c.population_size},
        {"generations", c.generations},
        {"crossover_prob", c.crossover_prob},
        {"mutation_prob", c.mutation_prob},
        {"parents_per_crossover", c.parents_per_crossover},
        {"offspring_per_crossover", c.offspring_per_crossover},
        {"rng_seed", c.rng_seed},
        {"evaluation_instance_count", c.evaluation_instance_count},
        {"evaluation_instance_size", c.evaluation_instance_size},
        {"baseline_restarts", c.baseline_restarts},
        {"evaluation_timeout_s", c.evaluation_timeout_s},
        {"max_init_attempts", c.max_init_attempts},
        {"backfill_with_greedy", c.backfill_with_greedy},
        {"deduplicate", c.deduplicate},
        {"parallel", c.parallel},
        {"llm", llm_to_json(c.llm)},
    };
}

template <typename T>
void assign(const json& obj, const char* key, T& slot, std::set<std::string>& seen) {
    if (obj.contains(key)) {
        seen.insert(key);
        slot = obj.at(key).get<T>();
    }
}

void reject_unknown(const json& obj, const std::set<std::string>& seen, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (!seen.contains(key)) {
            throw ConfigError("unknown " + where + "key '" + key + "'");
        }
    }
}

}  // namespace

void EvolutionConfig::validate() const {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) {
            throw ConfigError(what);
        }
    };
    require(population_size >= 1, "population_size must be positive");
    require(crossover_prob >= 0.0 && crossover_prob <= 1.0, "crossover_prob must lie in [0,1]");
    require(mutation_prob >= 0.0 && mutation_prob <= 1.0, "mutation_prob must lie in [0,1]");
    require(parents_per_crossover >= 1, "parents_per_crossover must be at least 1");
    require(parents_per_crossover <= population_size, "parents_per_crossover must not exceed population_size");
    require(offspring_per_crossover >= 1, "offspring_per_crossover must be at least 1");
    require(evaluation_instance_count >= 1, "evaluation_instance_count must be positive");
    require(evaluation_instance_size >= 2, "evaluation_instance_size must be at least 2");
    require(baseline_restarts >= 1, "baseline_restarts must be at least 1");
    require(evaluation_timeout_s > 0.0, "evaluation_timeout_s must be positive");
    require(llm.max_retries >= 0, "llm.max_retries must be non-negative");
}

std::string config_to_json(const EvolutionConfig& config) { return to_json_object(config).dump(2); }

EvolutionConfig config_from_json(std::string_view text) {
    EvolutionConfig c;
    try {
        const auto doc = json::parse(text);
        if (!doc.is_object()) {
            throw ConfigError("config must be a JSON object");
        }
        std::set<std::string> seen;
        assign(doc, "population_size", c.population_size, seen);
        assign(doc, "generations", c.generations, seen);
        assign(doc, "crossover_prob", c.crossover_prob, seen);
        assign(doc, "mutation_prob", c.mutation_prob, seen);
        assign(doc, "parents_per_crossover", c.parents_per_crossover, seen);
        assign(doc, "offspring_per_crossover", c.offspring_per_crossover, seen);
        assign(doc, "rng_seed", c.rng_seed, seen);
        assign(doc, "evaluation_instance_count", c.evaluation_instance_count, seen);
        assign(doc, "evaluation_instance_size", c.evaluation_instance_size, seen);
        assign(doc, "baseline_restarts", c.baseline_restarts, seen);
        assign(doc, "evaluation_timeout_s", c.evaluation_timeout_s, seen);
        assign(doc, "max_init_attempts", c.max_init_attempts, seen);
        assign(doc, "backfill_with_greedy", c.backfill_with_greedy, seen);
        assign(doc, "deduplicate", c.deduplicate, seen);
        assign(doc, "parallel", c.parallel, seen);
        if (doc.contains("llm")) {
            seen.insert("llm");
            const auto& l = doc.at("llm");
            std::set<std::string> llm_seen;
            assign(l, "model", c.llm.model, llm_seen);
            assign(l, "temperature_init", c.llm.temperature_init, llm_seen);
            assign(l, "temperature_crossover", c.llm.temperature_crossover, llm_seen);
            assign(l, "temperature_mutation", c.llm.temperature_mutation, llm_seen);
            assign(l, "max_retries", c.llm.max_retries, llm_seen);
            assign(l, "base_url", c.llm.base_url, llm_seen);
            assign(l, "api_key_env", c.llm.api_key_env, llm_seen);
            assign(l, "request_timeout_s", c.llm.request_timeout_s, llm_seen);
            assign(l, "backoff_initial_s", c.llm.backoff_initial_s, llm_seen);
            assign(l, "backoff_max_s", c.llm.backoff_max_s, llm_seen);
            reject_unknown(l, llm_seen, "llm ");
        }
        reject_unknown(doc, seen, "");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    c.validate();
    return c;
}

EvolutionConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return config_from_json(buffer.str());
}

std::string config_hash(const EvolutionConfig& config) {
    auto doc = to_json_object(config);
    doc.erase("generations");
    doc.erase("parallel");
    doc.erase("evaluation_timeout_s");
    for (const char* key : {"base_url", "api_key_env", "request_timeout_s", "backoff_initial_s",
                            "backoff_max_s", "max_retries"}) {
        doc["llm"].erase(key);
    }
    const auto text = doc.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

}  // namespace ael::evo
