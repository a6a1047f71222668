#include <doctest.h>

#include <bit>
#include <cmath>
#include <limits>
#include <random>

#include "ael/individual.hpp"
#include "ael/program.hpp"

using namespace ael;

TEST_SUITE("program") {

TEST_CASE("greedy and scored canonical text") {
    CHECK(CandidateProgram::greedy().canonical_text() == "greedy");
    CHECK(CandidateProgram::scored({1, 0, 0, 0}).canonical_text() == "scored c1=1 c2=0 c3=0 c4=0 tau=inf");
    CHECK(CandidateProgram::scored({0.75, 0.5, 0.25, 0.125, -2.5}).canonical_text() ==
          "scored c1=0.75 c2=0.5 c3=0.25 c4=0.125 tau=-2.5");
}

TEST_CASE("DSL parsing accepts any key order and extra whitespace") {
    const auto p = CandidateProgram::from_text("  scored  tau=0.5 c4=4\tc3=3 c2=2 c1=1 \n");
    const auto* s = std::get_if<NativeScored>(&p.variant());
    REQUIRE(s != nullptr);
    CHECK(s->params == tsp::ScoredParams{1, 2, 3, 4, 0.5});
    CHECK(CandidateProgram::from_text("greedy\n") == CandidateProgram::greedy());
}

TEST_CASE("malformed DSL lines throw") {
    CHECK_THROWS_AS(CandidateProgram::from_text("greedy now"), MalformedProgram);
    CHECK_THROWS_AS(CandidateProgram::from_text("scored c1=1 c2=0 c3=0 c4=0"), MalformedProgram);
    CHECK_THROWS_AS(CandidateProgram::from_text("scored c1=1 c2=0 c3=0 c4=0 tau=inf c5=1"), MalformedProgram);
    CHECK_THROWS_AS(CandidateProgram::from_text("scored c1=1 c1=1 c2=0 c3=0 c4=0 tau=inf"), MalformedProgram);
    CHECK_THROWS_AS(CandidateProgram::from_text("scored c1=x c2=0 c3=0 c4=0 tau=inf"), MalformedProgram);
    CHECK_THROWS_AS(CandidateProgram::from_text("scored c1=nan c2=0 c3=0 c4=0 tau=inf"), MalformedProgram);
    CHECK_THROWS_AS(CandidateProgram::from_text("scored c1 c2=0 c3=0 c4=0 tau=inf"), MalformedProgram);
}

TEST_CASE("anything that is not DSL is guest source") {
    const std::string src = "def select_next_node(a, b, c, d):\n    return c[0]\n";
    const auto p = CandidateProgram::from_text(src);
    CHECK_FALSE(p.is_native());
    CHECK(p.canonical_text() == src);
    // Multi-line text starting with a DSL keyword is not DSL.
    CHECK_FALSE(CandidateProgram::from_text("greedy\nprint(1)").is_native());
    CHECK_FALSE(CandidateProgram::parse_native("").has_value());
}

TEST_CASE("property: canonical text round-trips every finite double exactly") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 2000; ++trial) {
        tsp::ScoredParams p;
        double* fields[] = {&p.c1, &p.c2, &p.c3, &p.c4, &p.tau};
        for (double* f : fields) {
            double v;
            do {
                v = std::bit_cast<double>(rng());
            } while (!std::isfinite(v));
            *f = v;
        }
        if (trial % 5 == 0) p.tau = std::numeric_limits<double>::infinity();
        const auto program = CandidateProgram::scored(p);
        const auto text = program.canonical_text();
        const auto back = CandidateProgram::from_text(text);
        const auto* s = std::get_if<NativeScored>(&back.variant());
        REQUIRE(s != nullptr);
        CHECK(std::bit_cast<std::uint64_t>(s->params.c1) == std::bit_cast<std::uint64_t>(p.c1));
        CHECK(std::bit_cast<std::uint64_t>(s->params.c4) == std::bit_cast<std::uint64_t>(p.c4));
        CHECK(s->params == p);
        CHECK(back.canonical_text() == text);
    }
}

TEST_CASE("format_number uses the shortest round-trip form") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("operator tags round-trip through their names") {
    for (auto tag : {OperatorTag::Init, OperatorTag::Crossover, OperatorTag::Mutation, OperatorTag::Backfill}) {
        CHECK(operator_tag_from_string(to_string(tag)) == tag);
    }
    CHECK_THROWS(operator_tag_from_string("bogus"));
}

TEST_CASE("individual evaluation state") {
    Individual ind;
    CHECK_FALSE(ind.evaluated());
    CHECK_FALSE(ind.failed());
    ind.fitness = 0.1;
    CHECK(ind.evaluated());
    CHECK_FALSE(ind.failed());
    ind.fitness = kSentinelFitness;
    CHECK(ind.failed());
    CHECK(0.5 < kSentinelFitness);
}

}  // TEST_SUITE
