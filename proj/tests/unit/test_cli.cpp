#include <doctest.h>

#include <sstream>

#include "ael/evo/engine.hpp"
#include "cli.hpp"
#include "support.hpp"

using namespace ael;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> lines;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::istringstream in(line);
    for (std::string cell; std::getline(in, cell, ',');) cells.push_back(cell);
    return cells;
}

Outcome mock_run(const test::TempDir& dir, const std::string& name, const std::string& config = "reference_tsp20.json") {
    return invoke({"run", "--config", test::fixture(config).string(), "--llm",
                "mock:" + test::fixture("mock_script.jsonl").string(), "--out", (dir / name).string()});
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("missing config file exits with the config error code") {
    const auto r = invoke({"run", "--config", "/nonexistent/config.json", "--llm", "synthetic"});
    CHECK(r.code == cli::kConfigError);
    CHECK(r.err.find("/nonexistent/config.json") != std::string::npos);
}

TEST_CASE("unknown flags and modes are config errors") {
    CHECK(invoke({"run", "--bogus"}).code == cli::kConfigError);
    test::TempDir dir;
    CHECK(invoke({"run", "--config", test::fixture("reference_tsp20.json").string(), "--llm", "carrier-pigeon", "--out",
               (dir / "x").string()})
              .code == cli::kConfigError);
}

TEST_CASE("an exhausted mock script exits with the LLM error code") {
    test::TempDir dir;
    std::ofstream(dir / "short.jsonl") << "\"Algorithm: a.\\n```\\ngreedy\\n```\"\n";
    const auto r = invoke({"run", "--config", test::fixture("reference_tsp20.json").string(), "--llm",
                        "mock:" + (dir / "short.jsonl").string(), "--out", (dir / "run").string()});
    CHECK(r.code == cli::kLlmError);
}

TEST_CASE("run with the mock LLM writes every artifact and a trace with N_g rows") {
    test::TempDir dir;
    const auto r = mock_run(dir, "run", "reference_tsp50.json");
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto run = dir / "run";
    for (const char* f : {"manifest.json", "trace.csv", "trace.json", "best_algorithm.txt", "transcript.jsonl"}) {
        CHECK_MESSAGE(std::filesystem::exists(run / f), f);
    }
    CHECK(std::filesystem::exists(run / "checkpoints" / "gen_00.json"));
    CHECK(std::filesystem::exists(run / "checkpoints" / "gen_10.json"));
    const auto lines = split_lines(test::slurp(run / "trace.csv"));
    REQUIRE(lines.size() == 11);
    CHECK(lines[0] == "generation,best_gap,mean_gap");

    const auto manifest = cli::manifest_from_json(test::slurp(run / "manifest.json"));
    CHECK(cli::manifest_to_json(manifest) == test::slurp(run / "manifest.json"));
    REQUIRE(manifest.best.has_value());
    CHECK(manifest.config.evaluation_instance_size == 50);

    // The best algorithm file evaluates to the recorded fitness.
    const auto ev = invoke({"evaluate", "--algorithm", (run / "best_algorithm.txt").string(), "--sizes", "50",
                         "--instances", "64", "--seed", "2024", "--csv", (dir / "best.csv").string()});
    REQUIRE(ev.code == 0);
    const auto row = split_csv(split_lines(test::slurp(dir / "best.csv")).at(1));
    CHECK(std::stod(row.at(4)) == doctest::Approx(*manifest.best->fitness).epsilon(1e-12));
}

TEST_CASE("same seed twice gives identical trace CSVs and checkpoints") {
    test::TempDir dir;
    REQUIRE(mock_run(dir, "a").code == 0);
    REQUIRE(mock_run(dir, "b").code == 0);
    CHECK(test::slurp(dir / "a" / "trace.csv") == test::slurp(dir / "b" / "trace.csv"));
    CHECK(test::slurp(dir / "a" / "trace.json") == test::slurp(dir / "b" / "trace.json"));
    CHECK(test::slurp(dir / "a" / "checkpoints" / "gen_10.json") ==
          test::slurp(dir / "b" / "checkpoints" / "gen_10.json"));
}

TEST_CASE("a recorded transcript replays to the same run") {
    test::TempDir dir;
    REQUIRE(mock_run(dir, "live").code == 0);
    const auto r = invoke({"run", "--config", test::fixture("reference_tsp20.json").string(), "--llm",
                        "replay:" + (dir / "live" / "transcript.jsonl").string(), "--out", (dir / "replay").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(test::slurp(dir / "live" / "trace.json") == test::slurp(dir / "replay" / "trace.json"));
}

TEST_CASE("resume from a checkpoint completes the run identically") {
    test::TempDir dir;
    REQUIRE(mock_run(dir, "full").code == 0);
    const auto partial = invoke({"run", "--config", test::fixture("reference_tsp20.json").string(), "--llm",
                              "mock:" + test::fixture("mock_script.jsonl").string(), "--generations", "4", "--out",
                              (dir / "part").string()});
    REQUIRE(partial.code == 0);
    const auto resumed = invoke({"run", "--config", test::fixture("reference_tsp20.json").string(), "--llm",
                              "mock:" + test::fixture("mock_script.jsonl").string(), "--resume",
                              (dir / "part" / "checkpoints" / "gen_04.json").string(), "--out",
                              (dir / "part").string()});
    REQUIRE_MESSAGE(resumed.code == 0, resumed.err);
    CHECK(test::slurp(dir / "part" / "trace.csv") == test::slurp(dir / "full" / "trace.csv"));
    CHECK(test::slurp(dir / "part" / "checkpoints" / "gen_10.json") ==
          test::slurp(dir / "full" / "checkpoints" / "gen_10.json"));
}

TEST_CASE("report writes the convergence CSV and route plots") {
    test::TempDir dir;
    REQUIRE(mock_run(dir, "run").code == 0);
    const auto r = invoke({"report", "--run", (dir / "run").string(), "--routes", "3"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto lines = split_lines(test::slurp(dir / "run" / "convergence.csv"));
    CHECK(lines.size() == 11);
    double previous = 1e300;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const double best = std::stod(split_csv(lines[k]).at(1));
        CHECK(best <= previous);
        previous = best;
    }
    std::size_t plots = 0;
    const auto seeds = tsp::generate_batch(20, 3, 2024);
    for (const auto& e : std::filesystem::directory_iterator(dir / "run" / "routes")) {
        const auto name = e.path().filename().string();
        CHECK(name.ends_with(".svg"));
        const auto text = test::slurp(e.path());
        CHECK(text.find("<polygon") != std::string::npos);
        CHECK(text.find("#d62728") != std::string::npos);
        ++plots;
    }
    CHECK(plots == 3);
    for (const auto& inst : seeds) {
        bool named = false;
        for (const auto& e : std::filesystem::directory_iterator(dir / "run" / "routes")) {
            named = named || e.path().filename().string().find(std::to_string(inst.seed())) != std::string::npos;
        }
        CHECK(named);
    }
}

TEST_CASE("report on a directory without a manifest is a config error") {
    test::TempDir dir;
    CHECK(invoke({"report", "--run", dir.path().string()}).code == cli::kConfigError);
    std::ofstream(dir / "manifest.json") << "{ broken";
    CHECK(invoke({"report", "--run", dir.path().string()}).code == cli::kConfigError);
}

TEST_CASE("evaluate: single size, single instance gives one row") {
    const auto r = invoke({"evaluate", "--sizes", "20", "--instances", "1"});
    REQUIRE(r.code == 0);
    const auto lines = split_lines(r.out);
    CHECK(lines.size() == 2);
    CHECK(lines[1].find("20") != std::string::npos);
}

TEST_CASE("evaluate: per-instance gaps recompute from stored lengths") {
    test::TempDir dir;
    const auto r = invoke({"evaluate", "--algorithm", test::fixture("tuned_scored.txt").string(), "--sizes", "20,50",
                        "--instances", "8", "--instances-csv", (dir / "inst.csv").string(), "--csv",
                        (dir / "sum.csv").string()});
    REQUIRE(r.code == 0);
    const auto lines = split_lines(test::slurp(dir / "inst.csv"));
    REQUIRE(lines.size() == 17);
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const auto c = split_csv(lines[k]);
        const double length = std::stod(c.at(3)), baseline = std::stod(c.at(4)), gap = std::stod(c.at(5));
        CHECK(std::abs((length - baseline) / baseline - gap) < 1e-9);
    }
    CHECK(split_lines(test::slurp(dir / "sum.csv")).size() == 3);
}

TEST_CASE("evaluate: imported baselines") {
    test::TempDir dir;
    std::ofstream(dir / "b.csv") << "tsp20-0,3.5\ntsp20-1,3.5\n";
    const auto r = invoke({"evaluate", "--sizes", "20", "--instances", "2", "--baseline",
                        "import:" + (dir / "b.csv").string(), "--instances-csv", (dir / "i.csv").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto row = split_csv(split_lines(test::slurp(dir / "i.csv")).at(1));
    CHECK(row.at(4) == "3.5");
    CHECK(invoke({"evaluate", "--sizes", "20", "--instances", "3", "--baseline", "import:" + (dir / "b.csv").string()})
              .code != 0);
}

TEST_CASE("evaluate: a failing candidate exits with the candidate error code") {
    test::TempDir dir;
    std::ofstream(dir / "guest.txt")
        << "Algorithm: guest.\n```python\ndef select_next_node(a, b, c, d):\n    return c[0]\n```\n";
    const auto r = invoke({"evaluate", "--algorithm", (dir / "guest.txt").string(), "--sizes", "20", "--instances",
                        "2", "--guest-cmd", "/nonexistent/guest"});
    CHECK(r.code == cli::kCandidateFailed);
}

TEST_CASE("evaluate: malformed algorithm file is a config error") {
    test::TempDir dir;
    std::ofstream(dir / "bad.txt") << "scored c1=oops c2=0 c3=0 c4=0 tau=inf\n";
    CHECK(invoke({"evaluate", "--algorithm", (dir / "bad.txt").string(), "--sizes", "20", "--instances", "1"}).code ==
          cli::kConfigError);
}

TEST_CASE("manifest round-trips losslessly") {
    cli::RunManifest m;
    m.config.population_size = 7;
    m.llm_mode = "mock:x";
    m.transcript = "t.jsonl";
    m.output_dir = "out";
    m.started_at = "2024-01-01T00:00:00Z";
    Individual best;
    best.id = 3;
    best.description = "d";
    best.program = CandidateProgram::scored({1, 2, 3, 4});
    best.fitness = 0.0625;
    m.best = best;
    CHECK(cli::manifest_from_json(cli::manifest_to_json(m)) == m);
    m.best.reset();
    CHECK(cli::manifest_from_json(cli::manifest_to_json(m)) == m);
}

}  // TEST_SUITE
