#include <cmath>
#include <sstream>

#include <json.hpp>

#include "ael/evo/engine.hpp"

namespace ael::evo {

namespace {

using nlohmann::json;

// JSON has no infinity; the sentinel is written as the string "inf".
json number_to_json(double v) {
    if (std::isinf(v)) {
        return v > 0 ? json("inf") : json("-inf");
    }
    return json(v);
}

double number_from_json(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") {
            return std::numeric_limits<double>::infinity();
        }
        if (s == "-inf") {
            return -std::numeric_limits<double>::infinity();
        }
        throw Error("expected a number, got \"" + s + "\"");
    }
    return j.get<double>();
}

json optional_number(const std::optional<double>& v) { return v ? number_to_json(*v) : json(nullptr); }

std::optional<double> optional_number_from(const json& j) {
    if (j.is_null()) {
        return std::nullopt;
    }
    return number_from_json(j);
}

template <typename T>
json optional_value(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& j) {
    if (j.is_null()) {
        return std::nullopt;
    }
    return j.get<T>();
}

json individual_json(const Individual& ind) {
    return json{
        {"id", ind.id},
        {"description", ind.description},
        {"kind", ind.program.is_native() ? "native" : "guest"},
        {"program", ind.program.canonical_text()},
        {"fitness", optional_number(ind.fitness)},
        {"lineage", {{"op", std::string(to_string(ind.lineage.op))}, {"parents", ind.lineage.parents}}},
    };
}

Individual individual_of(const json& j) {
    Individual ind;
    ind.id = j.at("id").get<IndividualId>();
    ind.description = j.at("description").get<std::string>();
    const auto text = j.at("program").get<std::string>();
    if (j.at("kind").get<std::string>() == "native") {
        auto native = CandidateProgram::parse_native(text);
        if (!native) {
            throw MalformedProgram("not a native program: " + text);
        }
        ind.program = std::move(*native);
    } else {
        ind.program = CandidateProgram::guest(text);
    }
    ind.fitness = optional_number_from(j.at("fitness"));
    ind.lineage.op = operator_tag_from_string(j.at("lineage").at("op").get<std::string>());
    ind.lineage.parents = j.at("lineage").at("parents").get<std::vector<IndividualId>>();
    return ind;
}

json record_json(const CreatedRecord& r) {
    return json{
        {"id", optional_value(r.id)},
        {"op", std::string(to_string(r.op))},
        {"parents", r.parents},
        {"exchange_id", optional_value(r.exchange_id)},
        {"mutation_exchange_id", optional_value(r.mutation_exchange_id)},
        {"mutation_drawn", r.mutation_drawn},
        {"outcome", r.outcome},
        {"detail", r.detail},
        {"fitness", optional_number(r.fitness)},
    };
}

CreatedRecord record_of(const json& j) {
    CreatedRecord r;
    r.id = optional_from<IndividualId>(j.at("id"));
    r.op = operator_tag_from_string(j.at("op").get<std::string>());
    r.parents = j.at("parents").get<std::vector<IndividualId>>();
    r.exchange_id = optional_from<std::uint64_t>(j.at("exchange_id"));
    r.mutation_exchange_id = optional_from<std::uint64_t>(j.at("mutation_exchange_id"));
    r.mutation_drawn = j.at("mutation_drawn").get<bool>();
    r.outcome = j.at("outcome").get<std::string>();
    r.detail = j.at("detail").get<std::string>();
    r.fitness = optional_number_from(j.at("fitness"));
    return r;
}

json generation_json(const GenerationRecord& g) {
    json created = json::array();
    for (const auto& r : g.created) {
        created.push_back(record_json(r));
    }
    return json{
        {"generation", g.generation},
        {"best_fitness", number_to_json(g.best_fitness)},
        {"mean_fitness", number_to_json(g.mean_fitness)},
        {"crossover_attempts", g.crossover_attempts},
        {"mutation_attempts", g.mutation_attempts},
        {"created", created},
    };
}

GenerationRecord generation_of(const json& j) {
    GenerationRecord g;
    g.generation = j.at("generation").get<std::size_t>();
    g.best_fitness = number_from_json(j.at("best_fitness"));
    g.mean_fitness = number_from_json(j.at("mean_fitness"));
    g.crossover_attempts = j.at("crossover_attempts").get<std::size_t>();
    g.mutation_attempts = j.at("mutation_attempts").get<std::size_t>();
    for (const auto& r : j.at("created")) {
        g.created.push_back(record_of(r));
    }
    return g;
}

template <typename F>
auto parse_document(std::string_view text, const char* what, F&& body) {
    try {
        return body(json::parse(text));
    } catch (const json::exception& e) {
        throw Error(std::string("invalid ") + what + ": " + e.what());
    }
}

}  // namespace

std::string individual_to_json(const Individual& individual) { return individual_json(individual).dump(); }

Individual individual_from_json(std::string_view text) {
    return parse_document(text, "individual", [](const json& j) { return individual_of(j); });
}

std::string trace_to_json(const EvolutionTrace& trace) {
    json generations = json::array();
    for (const auto& g : trace.generations) {
        generations.push_back(generation_json(g));
    }
    return json{{"initial", generation_json(trace.initial)},
                {"generations", generations},
                {"warnings", trace.warnings}}
        .dump(2);
}

EvolutionTrace trace_from_json(std::string_view text) {
    return parse_document(text, "trace", [](const json& j) {
        EvolutionTrace trace;
        trace.initial = generation_of(j.at("initial"));
        for (const auto& g : j.at("generations")) {
            trace.generations.push_back(generation_of(g));
        }
        trace.warnings = j.at("warnings").get<std::vector<std::string>>();
        return trace;
    });
}

std::string trace_to_csv(const EvolutionTrace& trace) {
    std::ostringstream out;
    out << "generation,best_gap,mean_gap\n";
    for (const auto& g : trace.generations) {
        out << g.generation << ',' << format_number(g.best_fitness) << ',' << format_number(g.mean_fitness)
            << '\n';
    }
    return out.str();
}

std::string checkpoint_to_json(const Checkpoint& cp) {
    json members = json::array();
    for (const auto& m : cp.population.members()) {
        members.push_back(individual_json(m));
    }
    return json{
        {"config_hash", cp.config_hash},
        {"generation", cp.generation},
        {"next_id", cp.next_id},
        {"llm_calls", cp.llm_calls},
        {"capacity", cp.population.capacity()},
        {"population", members},
        {"best", individual_json(cp.best)},
    }
        .dump(2);
}

Checkpoint checkpoint_from_json(std::string_view text) {
    return parse_document(text, "checkpoint", [](const json& j) {
        Checkpoint cp;
        cp.config_hash = j.at("config_hash").get<std::string>();
        cp.generation = j.at("generation").get<std::size_t>();
        cp.next_id = j.at("next_id").get<IndividualId>();
        cp.llm_calls = j.at("llm_calls").get<std::uint64_t>();
        std::vector<Individual> members;
        for (const auto& m : j.at("population")) {
            members.push_back(individual_of(m));
        }
        cp.population = Population(std::move(members), j.at("capacity").get<std::size_t>());
        cp.best = individual_of(j.at("best"));
        return cp;
    });
}

}  // namespace ael::evo
