#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "ael/tsp/heuristics.hpp"
#include "ael/tsp/instance.hpp"
#include "ael/tsp/solvers.hpp"
#include "support.hpp"

using namespace ael;
using namespace ael::tsp;

namespace {

Instance unit_square() { return Instance({{0, 0}, {0, 1}, {1, 1}, {1, 0}}, 0); }

// Exhaustive minimum over all tours that start at node 0.
double brute_force_optimum(const Instance& inst) {
    std::vector<NodeId> rest(inst.size() - 1);
    std::iota(rest.begin(), rest.end(), NodeId{1});
    double best = std::numeric_limits<double>::infinity();
    do {
        double len = inst.dist(0, rest.front()) + inst.dist(rest.back(), 0);
        for (std::size_t k = 1; k < rest.size(); ++k) {
            len += inst.dist(rest[k - 1], rest[k]);
        }
        best = std::min(best, len);
    } while (std::next_permutation(rest.begin(), rest.end()));
    return best;
}

std::vector<NodeId> unvisited_except(std::size_t n, std::initializer_list<NodeId> used) {
    std::vector<NodeId> out;
    for (NodeId j = 0; j < n; ++j) {
        if (std::find(used.begin(), used.end(), j) == used.end()) {
            out.push_back(j);
        }
    }
    return out;
}

// Scores computed naively in double precision, straight from the definition.
std::vector<double> naive_scores(const SelectionContext& ctx, const ScoredParams& p) {
    std::vector<double> scores;
    for (auto j : ctx.unvisited) {
        double sum = 0, sum_sq = 0;
        std::size_t m = 0;
        for (auto k : ctx.unvisited) {
            if (k == j) continue;
            const double d = (*ctx.dist)(j, k);
            sum += d;
            sum_sq += d * d;
            ++m;
        }
        const double mean = m ? sum / m : 0.0;
        const double sd = m ? std::sqrt(std::max(0.0, sum_sq / m - mean * mean)) : 0.0;
        scores.push_back(p.c1 * (*ctx.dist)(ctx.current, j) - p.c2 * mean + p.c3 * sd -
                         p.c4 * (*ctx.dist)(j, ctx.destination));
    }
    return scores;
}

}  // namespace

TEST_SUITE("tsp") {

TEST_CASE("instance generation is deterministic and in the unit square") {
    const auto a = generate_instance(50, 1);
    const auto b = generate_instance(50, 1);
    REQUIRE(a.size() == 50);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.coords()[i].x == b.coords()[i].x);
        CHECK(a.coords()[i].y == b.coords()[i].y);
        CHECK(a.coords()[i].x >= 0.0);
        CHECK(a.coords()[i].x < 1.0);
        CHECK(a.coords()[i].y >= 0.0);
        CHECK(a.coords()[i].y < 1.0);
    }
    const auto c = generate_instance(50, 2);
    CHECK(c.coords()[0].x != a.coords()[0].x);
}

TEST_CASE("batch instances have distinct seeds") {
    const auto batch = generate_batch(20, 16, 99);
    REQUIRE(batch.size() == 16);
    std::vector<std::uint64_t> seeds;
    for (const auto& inst : batch) seeds.push_back(inst.seed());
    std::sort(seeds.begin(), seeds.end());
    CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
    CHECK(batch[3].seed() == batch_instance_seed(99, 20, 3));
}

TEST_CASE("two-node instance has a single off-diagonal distance") {
    const Instance inst({{0, 0}, {3, 4}}, 0);
    CHECK(inst.dist().size() == 2);
    CHECK(inst.dist(0, 0) == 0.0);
    CHECK(inst.dist(1, 1) == 0.0);
    CHECK(inst.dist(0, 1) == 5.0);
    CHECK(inst.dist(1, 0) == 5.0);
}

TEST_CASE("invalid instances are rejected") {
    CHECK_THROWS_AS(Instance({{0, 0}}, 0), InvalidInstance);
    CHECK_THROWS_AS(Instance({{0, 0}, {std::nan(""), 0}}, 0), InvalidInstance);
    CHECK_THROWS_AS(Instance({{0, 0}, {std::numeric_limits<double>::infinity(), 0}}, 0), InvalidInstance);
}

TEST_CASE("mean nearest-neighbour distance at n=1000 is close to 1/(2 sqrt n)") {
    const auto batch = generate_batch(1000, 64, 5);
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& inst : batch) {
        for (NodeId i = 0; i < inst.size(); ++i) {
            double nn = std::numeric_limits<double>::infinity();
            for (NodeId j = 0; j < inst.size(); ++j) {
                if (j != i) nn = std::min(nn, inst.dist(i, j));
            }
            total += nn;
            ++count;
        }
    }
    const double expected = 1.0 / (2.0 * std::sqrt(1000.0));
    CHECK(total / count == doctest::Approx(expected).epsilon(0.20));
}

TEST_CASE("instance JSON round-trips exactly") {
    const auto inst = generate_instance(30, 17);
    const auto back = instance_from_json(instance_to_json(inst));
    REQUIRE(back.size() == inst.size());
    CHECK(back.seed() == 17);
    for (std::size_t i = 0; i < inst.size(); ++i) {
        CHECK(back.coords()[i].x == inst.coords()[i].x);
        CHECK(back.coords()[i].y == inst.coords()[i].y);
    }
    test::TempDir dir;
    save_instance(inst, dir / "i.json");
    CHECK(load_instance(dir / "i.json").coords()[29].y == inst.coords()[29].y);
}

TEST_CASE("gap arithmetic") {
    CHECK(gap(4.49, 3.84) == doctest::Approx(0.65 / 3.84));
    CHECK(gap(4.49, 3.84) == doctest::Approx(0.1693).epsilon(1e-3));
    CHECK(gap(7.01, 5.69) == doctest::Approx(0.2320).epsilon(1e-3));
    CHECK(gap(2.5, 2.5) == 0.0);
    CHECK_THROWS_AS(gap(1.0, 0.0), Error);
}

TEST_CASE("greedy picks the unique minimum") {
    // d(0,2)=5, d(0,3)=2.
    const Instance inst({{0, 0}, {9, 9}, {5, 0}, {0, 2}}, 0);
    const std::vector<NodeId> unvisited{2, 3};
    CHECK(greedy_select_next({0, 1, unvisited, &inst.dist()}) == 3);
}

TEST_CASE("greedy breaks ties towards the lowest index") {
    const auto sq = unit_square();
    const std::vector<NodeId> unvisited{1, 3};
    CHECK(greedy_select_next({0, 0, unvisited, &sq.dist()}) == 1);
}

TEST_CASE("greedy matches a linear argmin scan on random instances") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto inst = generate_instance(10, seed);
        std::mt19937_64 rng(seed);
        std::vector<NodeId> unvisited = unvisited_except(10, {0});
        std::shuffle(unvisited.begin(), unvisited.end(), rng);
        unvisited.resize(1 + rng() % 8);
        std::sort(unvisited.begin(), unvisited.end());
        NodeId oracle = unvisited.front();
        for (auto j : unvisited) {
            if (inst.dist(0, j) < inst.dist(0, oracle)) oracle = j;
        }
        CHECK(greedy_select_next({0, 0, unvisited, &inst.dist()}) == oracle);
    }
}

TEST_CASE("greedy tour on the unit square") {
    const auto tour = construct_greedy_tour(unit_square());
    CHECK(tour.order == std::vector<NodeId>{0, 1, 2, 3});
    CHECK(tour.length == doctest::Approx(4.0));
}

TEST_CASE("greedy tour on two nodes") {
    const Instance inst({{0, 0}, {3, 4}}, 0);
    const auto tour = construct_greedy_tour(inst);
    CHECK(tour.order == std::vector<NodeId>{0, 1});
    CHECK(tour.length == 10.0);
}

TEST_CASE("construct_tour rejects invalid selector choices") {
    const auto inst = generate_instance(6, 3);
    CHECK_THROWS_AS(construct_tour([](const SelectionContext& ctx) { return ctx.current; }, inst), InvalidStep);
    CHECK_THROWS_AS(construct_tour([](const SelectionContext&) { return NodeId{99}; }, inst), InvalidStep);
}

TEST_CASE("selector sees an ascending unvisited set without current or destination") {
    const auto inst = generate_instance(12, 4);
    construct_tour(
        [](const SelectionContext& ctx) {
            CHECK(std::is_sorted(ctx.unvisited.begin(), ctx.unvisited.end()));
            CHECK(std::find(ctx.unvisited.begin(), ctx.unvisited.end(), ctx.current) == ctx.unvisited.end());
            CHECK(std::find(ctx.unvisited.begin(), ctx.unvisited.end(), ctx.destination) == ctx.unvisited.end());
            return ctx.unvisited.back();
        },
        inst, 5);
}

TEST_CASE("scored rule with (1,0,0,0,inf) is greedy") {
    const ScoredParams p{1, 0, 0, 0};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto inst = generate_instance(40, seed);
        CHECK(construct_scored_tour(inst, p).order == construct_greedy_tour(inst).order);
    }
}

TEST_CASE("scored rule takes the only remaining node") {
    const auto inst = generate_instance(8, 2);
    const std::vector<NodeId> one{5};
    CHECK(scored_select_next({0, 0, one, &inst.dist()}, ScoredParams{0.3, 0.9, 0.1, 0.7, 0.0}) == 5);
}

TEST_CASE("scored rule falls back to greedy above the threshold") {
    const auto inst = generate_instance(20, 8);
    const auto unvisited = unvisited_except(20, {0});
    const SelectionContext ctx{0, 0, unvisited, &inst.dist()};
    // A very negative threshold is exceeded by every score.
    const ScoredParams p{0.2, 1.0, 0.0, 1.0, -1e9};
    CHECK(scored_select_next(ctx, p) == greedy_select_next(ctx));
}

TEST_CASE("scored choice attains the naive minimum score") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto inst = generate_instance(15, trial);
        const ScoredParams p{0.25 * (rng() % 5), 0.25 * (rng() % 5), 0.25 * (rng() % 5), 0.25 * (rng() % 5)};
        const auto unvisited = unvisited_except(15, {0, 3});
        const SelectionContext ctx{3, 0, unvisited, &inst.dist()};
        const auto scores = naive_scores(ctx, p);
        const double min_score = *std::min_element(scores.begin(), scores.end());
        const auto choice = scored_select_next(ctx, p);
        const auto pos = std::find(unvisited.begin(), unvisited.end(), choice) - unvisited.begin();
        CHECK(scores[pos] == doctest::Approx(min_score).epsilon(1e-9));
    }
}

TEST_CASE("incremental scored tour equals the direct step-by-step tour") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const auto inst = generate_instance(10 + trial, 100 + trial);
        const ScoredParams p{0.25 * (rng() % 5), 0.25 * (rng() % 5), 0.25 * (rng() % 5), 0.25 * (rng() % 5),
                             trial % 3 == 0 ? 0.1 : std::numeric_limits<double>::infinity()};
        const auto direct =
            construct_tour([&](const SelectionContext& ctx) { return scored_select_next(ctx, p); }, inst, trial % 7);
        const auto fast = construct_scored_tour(inst, p, trial % 7);
        CHECK(direct.order == fast.order);
        CHECK(direct.length == fast.length);
    }
}

TEST_CASE("tour_length includes the closing edge") {
    const auto sq = unit_square();
    const std::vector<NodeId> cross{0, 2, 1, 3};
    CHECK(tour_length(sq, cross) == doctest::Approx(2.0 + 2.0 * std::sqrt(2.0)));
}

TEST_CASE("2-opt on the unit square is optimal") {
    CHECK(two_opt_baseline(unit_square()) == doctest::Approx(4.0));
    std::vector<NodeId> cross{0, 2, 1, 3};
    CHECK(two_opt_local_search(unit_square(), cross) == doctest::Approx(4.0));
}

TEST_CASE("2-opt result is a local optimum and never worse than greedy") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto inst = generate_instance(40, seed);
        const auto tour = two_opt_baseline_tour(inst);
        CHECK(tour.length <= construct_greedy_tour(inst).length + 1e-12);
        CHECK(tour.length == doctest::Approx(tour_length(inst, tour.order)).epsilon(1e-12));
        const auto& o = tour.order;
        const std::size_t n = o.size();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t j = i + 2; j < n; ++j) {
                if (i == 0 && j == n - 1) continue;
                const double delta = inst.dist(o[i], o[j]) + inst.dist(o[i + 1], o[(j + 1) % n]) -
                                     inst.dist(o[i], o[i + 1]) - inst.dist(o[j], o[(j + 1) % n]);
                CHECK(delta > -1e-9);
            }
        }
    }
}

TEST_CASE("Held-Karp on tiny instances") {
    CHECK(held_karp(unit_square()) == doctest::Approx(4.0));
    const Instance tri({{0, 0}, {3, 0}, {0, 4}}, 0);
    CHECK(held_karp(tri) == doctest::Approx(12.0));
    const Instance two({{0, 0}, {0, 2}}, 0);
    CHECK(held_karp(two) == doctest::Approx(4.0));
}

TEST_CASE("Held-Karp equals exhaustive search at n=9") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto inst = generate_instance(9, seed);
        CHECK(held_karp(inst) == doctest::Approx(brute_force_optimum(inst)).epsilon(1e-12));
    }
}

TEST_CASE("Held-Karp refuses large instances") {
    CHECK_NOTHROW(held_karp(generate_instance(kHeldKarpMaxNodes, 1)));
    CHECK_THROWS_AS(held_karp(generate_instance(kHeldKarpMaxNodes + 1, 1)), InstanceTooLarge);
}

}  // TEST_SUITE
