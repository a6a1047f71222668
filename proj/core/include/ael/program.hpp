#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "ael/errors.hpp"
#include "ael/tsp/heuristics.hpp"

namespace ael {

/// Guest-language source text defining the step function.
struct GuestSource {
    std::string source;
    friend bool operator==(const GuestSource&, const GuestSource&) = default;
};

/// Nearest-neighbour selector executed natively.
struct NativeGreedy {
    friend bool operator==(const NativeGreedy&, const NativeGreedy&) = default;
};

/// Score-with-threshold selector executed natively.
struct NativeScored {
    tsp::ScoredParams params;
    friend bool operator==(const NativeScored&, const NativeScored&) = default;
};

class MalformedProgram : public Error {
public:
    using Error::Error;
};

/// The code part of an individual. Native variants have a one-line canonical
/// text in a small DSL:
///
///     greedy
///     scored c1=<x> c2=<x> c3=<x> c4=<x> tau=<x|inf>
///
/// Numbers use the shortest representation that round-trips exactly.
class CandidateProgram {
public:
    using Variant = std::variant<GuestSource, NativeGreedy, NativeScored>;

    CandidateProgram() : variant_(NativeGreedy{}) {}
    CandidateProgram(Variant v) : variant_(std::move(v)) {}

    static CandidateProgram greedy() { return CandidateProgram(NativeGreedy{}); }
    static CandidateProgram scored(const tsp::ScoredParams& p) { return CandidateProgram(NativeScored{p}); }
    static CandidateProgram guest(std::string source) { return CandidateProgram(GuestSource{std::move(source)}); }

    /// Interprets a code block: DSL lines become native variants, anything
    /// else is guest source. Throws MalformedProgram for a DSL keyword with
    /// bad arguments.
    static CandidateProgram from_text(std::string_view text);

    /// Native variant for a DSL line, nullopt if `text` is not DSL.
    static std::optional<CandidateProgram> parse_native(std::string_view text);

    const Variant& variant() const noexcept { return variant_; }
    bool is_native() const noexcept { return !std::holds_alternative<GuestSource>(variant_); }

    std::string canonical_text() const;

    friend bool operator==(const CandidateProgram&, const CandidateProgram&) = default;

private:
    Variant variant_;
};

std::string format_number(double v);

}  // namespace ael
