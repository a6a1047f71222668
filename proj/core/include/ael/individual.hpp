#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ael/program.hpp"

namespace ael {

using IndividualId = std::uint64_t;

enum class OperatorTag { Init, Crossover, Mutation, Backfill };

std::string_view to_string(OperatorTag tag);
OperatorTag operator_tag_from_string(std::string_view s);

/// Fitness assigned to candidates that failed to evaluate. Sorts after every
/// real fitness.
inline constexpr double kSentinelFitness = std::numeric_limits<double>::infinity();

struct Lineage {
    OperatorTag op = OperatorTag::Init;
    std::vector<IndividualId> parents;

    friend bool operator==(const Lineage&, const Lineage&) = default;
};

/// One evolved algorithm: description, program and fitness (mean gap).
struct Individual {
    IndividualId id = 0;
    std::string description;
    CandidateProgram program;
    std::optional<double> fitness;
    Lineage lineage;

    bool evaluated() const noexcept { return fitness.has_value(); }
    bool failed() const noexcept { return fitness && std::isinf(*fitness); }

    friend bool operator==(const Individual&, const Individual&) = default;
};

}  // namespace ael
