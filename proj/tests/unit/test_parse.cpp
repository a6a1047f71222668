#include <doctest.h>

#include <filesystem>

#include "ael/llm/parse.hpp"
#include "support.hpp"

using namespace ael;
using namespace ael::llm;

namespace {

const prompt::TaskSpec kTask = prompt::TaskSpec::tsp();

std::vector<std::filesystem::path> files_in(const std::string& sub) {
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(test::fixture("responses/" + sub))) {
        out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t sentence_count(const std::string& s) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if ((s[i] == '.' || s[i] == '!' || s[i] == '?') && (i + 1 == s.size() || s[i + 1] == ' ')) ++n;
    }
    return n;
}

}  // namespace

TEST_SUITE("parse") {

TEST_CASE("golden corpus: every well-formed response parses") {
    const auto files = files_in("good");
    REQUIRE(files.size() >= 10);
    for (const auto& f : files) {
        CAPTURE(f.filename().string());
        const auto parsed = parse_individual(test::slurp(f), kTask);
        CHECK_FALSE(parsed.description.empty());
        CHECK(sentence_count(parsed.description) <= 2);
        CHECK(parsed.description.find("```") == std::string::npos);
        CHECK_FALSE(parsed.program.canonical_text().empty());
    }
}

TEST_CASE("golden corpus: each corrupted response raises its designated error") {
    const auto files = files_in("bad");
    REQUIRE(files.size() >= 3);
    for (const auto& f : files) {
        const auto name = f.filename().string();
        const auto expected = name.substr(0, name.find("__"));
        CAPTURE(name);
        try {
            parse_individual(test::slurp(f), kTask);
            FAIL("parsed a corrupted response");
        } catch (const ParseError& e) {
            CHECK(to_string(e.kind()) == expected);
        }
    }
}

TEST_CASE("greedy python response gives a guest program and the marker description") {
    const auto parsed = parse_individual(test::slurp(test::fixture("responses/good/01_greedy_python.txt")), kTask);
    CHECK(parsed.description == "The algorithm moves to the unvisited node that is closest to the current node.");
    CHECK_FALSE(parsed.program.is_native());
    CHECK(parsed.program.canonical_text().starts_with("def select_next_node("));
}

TEST_CASE("DSL response gives a native program") {
    const auto parsed =
        parse_individual("Algorithm: pick nearest.\n```\nscored c1=1 c2=0 c3=0 c4=0 tau=inf\n```\n", kTask);
    CHECK(parsed.description == "pick nearest.");
    CHECK(parsed.program == CandidateProgram::scored({1, 0, 0, 0}));
}

TEST_CASE("typed errors are distinct classes") {
    CHECK_THROWS_AS(parse_individual("no code here", kTask), NoCodeBlock);
    CHECK_THROWS_AS(parse_individual("Algorithm: x.\n```python\ndef f(a, b, c, d):\n    pass\n```", kTask),
                    WrongFunctionSignature);
    CHECK_THROWS_AS(parse_individual("```\ngreedy\n```", kTask), EmptyDescription);
    CHECK_THROWS_AS(parse_individual("Algorithm: x.\n```\nscored c1=1\n```", kTask), MalformedNativeProgram);
}

TEST_CASE("signature arity rules") {
    auto sig = [](const std::string& params) {
        return "Algorithm: a.\n```python\ndef select_next_node(" + params + "):\n    return 0\n```\n";
    };
    CHECK_NOTHROW(parse_individual(sig("a, b, c, d"), kTask));
    CHECK_NOTHROW(parse_individual(sig("a, b, c, d, e=1, f=(1, 2)"), kTask));
    CHECK_NOTHROW(parse_individual(sig("a, b, *rest"), kTask));
    CHECK_NOTHROW(parse_individual(sig("a, b, c, d=None"), kTask));
    CHECK_THROWS_AS(parse_individual(sig("a, b, c"), kTask), WrongFunctionSignature);
    CHECK_THROWS_AS(parse_individual(sig("a, b, c, d, e"), kTask), WrongFunctionSignature);
    CHECK_THROWS_AS(parse_individual(sig("a, b, c, d, *, key"), kTask), WrongFunctionSignature);
}

TEST_CASE("python_parameters splits at top-level commas only") {
    const auto params = python_parameters("def select_next_node(a, b=(1, 2), c={'x': [1, 2]}, d=f(3, 4)):\n", "select_next_node");
    REQUIRE(params.has_value());
    CHECK(params->size() == 4);
    CHECK_FALSE(python_parameters("def other(a):\n", "select_next_node").has_value());
    CHECK_FALSE(python_parameters("def select_next_node_v2(a, b, c, d):\n", "select_next_node").has_value());
}

TEST_CASE("first_code_block returns the first fence only") {
    CHECK(first_code_block("x\n```python\nA\n```\n```\nB\n```") == std::optional<std::string>("A"));
    CHECK(first_code_block("```\ngreedy\n```") == std::optional<std::string>("greedy"));
    CHECK_FALSE(first_code_block("```\nunterminated").has_value());
    CHECK_FALSE(first_code_block("plain").has_value());
}

TEST_CASE("truncate_sentences keeps at most the requested count") {
    CHECK(truncate_sentences("One. Two. Three.", 2) == "One. Two.");
    CHECK(truncate_sentences("Only one", 2) == "Only one");
    CHECK(truncate_sentences("Uses 0.5 weights. Then more. And more.", 2) == "Uses 0.5 weights. Then more.");
}

TEST_CASE("three-sentence paragraph descriptions are cut to two") {
    const auto parsed =
        parse_individual(test::slurp(test::fixture("responses/good/05_no_marker_paragraph.txt")), kTask);
    CHECK(parsed.description ==
          "This heuristic prefers nodes that are close to the current node and far from the crowd. It also looks "
          "ahead to the return trip.");
}

TEST_CASE("property: format_individual output parses back to the same individual") {
    const std::vector<CandidateProgram> programs{
        CandidateProgram::greedy(),
        CandidateProgram::scored({0.1, 0.2, 0.3, 0.4, 0.5}),
        CandidateProgram::scored({1e-300, 0, 7, 1e300}),
        CandidateProgram::guest("def select_next_node(a, b, c, d):\n    return c[-1]"),
    };
    for (const auto& p : programs) {
        const auto text = format_individual("A short description.", p);
        const auto back = parse_individual(text, kTask);
        CHECK(back.description == "A short description.");
        CHECK(back.program == p);
    }
}

TEST_CASE("error kind names") {
    CHECK(to_string(ParseErrorKind::NoCodeBlock) == "no_code_block");
    CHECK(to_string(ParseErrorKind::WrongFunctionSignature) == "wrong_function_signature");
    CHECK(to_string(ParseErrorKind::EmptyDescription) == "empty_description");
    CHECK(to_string(ParseErrorKind::MalformedProgram) == "malformed_program");
}

}  // TEST_SUITE
