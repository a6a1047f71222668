// Exhaustive search over the score-with-threshold lattice. Writes the best
// parameter vector as one canonical program line.
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <vector>

#include <CLI11.hpp>

#include "ael/eval/evaluator.hpp"
#include "ael/program.hpp"

using namespace ael;

namespace {

// Smallest score at every step of the scored tour, straight from the definition.
void collect_min_scores(const tsp::Instance& inst, const tsp::ScoredParams& p, std::vector<double>& out) {
    const auto selector = [&](const tsp::SelectionContext& ctx) {
        double best = std::numeric_limits<double>::infinity();
        for (auto j : ctx.unvisited) {
            double sum = 0.0, sum_sq = 0.0;
            std::size_t m = 0;
            for (auto k : ctx.unvisited) {
                if (k != j) {
                    sum += inst.dist(j, k);
                    sum_sq += inst.dist(j, k) * inst.dist(j, k);
                    ++m;
                }
            }
            const double mean = m ? sum / m : 0.0;
            const double sd = m ? std::sqrt(std::max(0.0, sum_sq / m - mean * mean)) : 0.0;
            best = std::min(best, p.c1 * inst.dist(ctx.current, j) - p.c2 * mean + p.c3 * sd -
                                      p.c4 * inst.dist(j, ctx.destination));
        }
        out.push_back(best);
        return tsp::scored_select_next(ctx, p);
    };
    tsp::construct_tour(selector, inst);
}

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    return v[static_cast<std::size_t>(q * static_cast<double>(v.size() - 1))];
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grid search for the scored next-node rule"};
    std::size_t n = 50, count = 64;
    std::uint64_t seed = 777;
    unsigned threads = 4;
    std::string out_path;
    app.add_option("--size", n, "Instance size");
    app.add_option("--instances", count, "Instances in the tuning batch");
    app.add_option("--seed", seed, "Tuning batch seed");
    app.add_option("--parallel", threads, "Threads for the baseline solves");
    app.add_option("--out", out_path, "Write the winning program line here");
    CLI11_PARSE(app, argc, argv);

    const auto batch = eval::make_batch(n, count, seed, 5, threads);
    const std::vector<double> lattice{0.0, 0.25, 0.5, 0.75, 1.0};
    const std::vector<double> tau_quantiles{0.5, 0.75, 0.9};

    double best_fit = eval::evaluate(CandidateProgram::greedy(), batch).fitness();
    const double greedy_fit = best_fit;
    CandidateProgram best = CandidateProgram::greedy();
    for (double c1 : lattice)
        for (double c2 : lattice)
            for (double c3 : lattice)
                for (double c4 : lattice) {
                    if (c1 == 0.0 && c2 == 0.0 && c3 == 0.0 && c4 == 0.0) {
                        continue;
                    }
                    tsp::ScoredParams p{c1, c2, c3, c4};
                    std::vector<double> taus{std::numeric_limits<double>::infinity()};
                    std::vector<double> scores;
                    for (std::size_t k = 0; k < std::min<std::size_t>(4, batch.size()); ++k) {
                        collect_min_scores(batch.instances[k], p, scores);
                    }
                    for (double q : tau_quantiles) {
                        taus.push_back(quantile(scores, q));
                    }
                    for (double tau : taus) {
                        p.tau = tau;
                        const auto candidate = CandidateProgram::scored(p);
                        const double fit = eval::evaluate(candidate, batch).fitness();
                        if (fit < best_fit) {
                            best_fit = fit;
                            best = candidate;
                        }
                    }
                }

    std::cout << "greedy gap " << greedy_fit << "\nbest gap   " << best_fit << "\n" << best.canonical_text() << "\n";
    if (!out_path.empty()) {
        std::ofstream(out_path) << best.canonical_text() << "\n";
    }
    return 0;
}
