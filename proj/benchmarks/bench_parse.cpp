#include <benchmark/benchmark.h>

#include "ael/llm/parse.hpp"

namespace {

const char* kResponse =
    "Here is a new algorithm.\n\n"
    "Algorithm: Pick the node that balances closeness to the current node against its distance "
    "to the destination. Ties go to the lowest index.\n\n"
    "```python\n"
    "def select_next_node(current_node, destination_node, unvisited_nodes, distance_matrix):\n"
    "    return min(unvisited_nodes, key=lambda n: distance_matrix[current_node][n])\n"
    "```\n";

void BM_ParseGuestResponse(benchmark::State& state) {
    const auto task = ael::prompt::TaskSpec::tsp();
    for (auto _ : state) benchmark::DoNotOptimize(ael::llm::parse_individual(kResponse, task));
}
BENCHMARK(BM_ParseGuestResponse);

void BM_ParseDslResponse(benchmark::State& state) {
    const auto task = ael::prompt::TaskSpec::tsp();
    const std::string text = "Algorithm: weighted.\n```\nscored c1=1 c2=0.75 c3=0.5 c4=0.25 tau=0.125\n```\n";
    for (auto _ : state) benchmark::DoNotOptimize(ael::llm::parse_individual(text, task));
}
BENCHMARK(BM_ParseDslResponse);

}  // namespace
