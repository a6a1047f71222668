#include "ael/individual.hpp"

#include <string>

#include "ael/errors.hpp"

namespace ael {

std::string_view to_string(OperatorTag tag) {
    switch (tag) {
        case OperatorTag::Init: return "init";
        case OperatorTag::Crossover: return "crossover";
        case OperatorTag::Mutation: return "mutation";
        case OperatorTag::Backfill: return "backfill";
    }
    return "init";
}

OperatorTag operator_tag_from_string(std::string_view s) {
    if (s == "init") return OperatorTag::Init;
    if (s == "crossover") return OperatorTag::Crossover;
    if (s == "mutation") return OperatorTag::Mutation;
    if (s == "backfill") return OperatorTag::Backfill;
    throw Error("unknown operator tag '" + std::string(s) + "'");
}

}  // namespace ael
