#include "ael/tsp/solvers.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "ael/tsp/heuristics.hpp"

namespace ael::tsp {

namespace {

constexpr double kImprovementEps = 1e-12;

}  // namespace

double two_opt_local_search(const Instance& instance, std::vector<NodeId>& order) {
    const std::size_t n = order.size();
    const auto& d = instance.dist();
    if (n >= 4) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (std::size_t i = 0; i + 2 < n; ++i) {
                // Edge (order[i], order[i+1]) against every non-adjacent edge
                // (order[j], order[j+1 mod n]).
                const std::size_t last = (i == 0) ? n - 1 : n;
                for (std::size_t j = i + 2; j < last; ++j) {
                    const NodeId a = order[i];
                    const NodeId b = order[i + 1];
                    const NodeId c = order[j];
                    const NodeId e = order[(j + 1) % n];
                    const double delta = d(a, c) + d(b, e) - d(a, b) - d(c, e);
                    if (delta < -kImprovementEps) {
                        std::reverse(order.begin() + static_cast<std::ptrdiff_t>(i + 1),
                                     order.begin() + static_cast<std::ptrdiff_t>(j + 1));
                        improved = true;
                    }
                }
            }
        }
    }
    return tour_length(instance, order);
}

Tour two_opt_baseline_tour(const Instance& instance, const TwoOptOptions& options) {
    const std::size_t restarts = std::max<std::size_t>(options.restarts, 1);
    Tour best = construct_greedy_tour(instance);
    best.length = two_opt_local_search(instance, best.order);

    std::mt19937_64 rng(instance.seed() ^ (options.seed * 0x9e3779b97f4a7c15ULL) ^ 0x2f0a7c15ULL);
    std::vector<NodeId> order(instance.size());
    for (std::size_t r = 1; r < restarts; ++r) {
        std::iota(order.begin(), order.end(), NodeId{0});
        for (std::size_t k = order.size() - 1; k > 0; --k) {
            std::swap(order[k], order[rng() % (k + 1)]);
        }
        const double length = two_opt_local_search(instance, order);
        if (length < best.length) {
            best.order = order;
            best.length = length;
        }
    }
    return best;
}

double two_opt_baseline(const Instance& instance, std::size_t restarts) {
    return two_opt_baseline_tour(instance, {.restarts = restarts}).length;
}

double held_karp(const Instance& instance) {
    const std::size_t n = instance.size();
    if (n > kHeldKarpMaxNodes) {
        throw InstanceTooLarge("held_karp supports at most " + std::to_string(kHeldKarpMaxNodes) +
                               " nodes, got " + std::to_string(n));
    }
    if (n == 2) {
        return 2.0 * instance.dist(0, 1);
    }
    // Node 0 is the fixed start; subsets range over nodes 1..n-1.
    const std::size_t m = n - 1;
    const std::size_t full = std::size_t{1} << m;
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> cost(full * m, inf);
    auto at = [&](std::size_t mask, std::size_t last) -> double& { return cost[mask * m + last]; };

    for (std::size_t k = 0; k < m; ++k) {
        at(std::size_t{1} << k, k) = instance.dist(0, k + 1);
    }
    for (std::size_t mask = 1; mask < full; ++mask) {
        for (std::size_t last = 0; last < m; ++last) {
            if (!(mask & (std::size_t{1} << last))) {
                continue;
            }
            const double base = at(mask, last);
            if (base == inf) {
                continue;
            }
            for (std::size_t next = 0; next < m; ++next) {
                if (mask & (std::size_t{1} << next)) {
                    continue;
                }
                double& slot = at(mask | (std::size_t{1} << next), next);
                slot = std::min(slot, base + instance.dist(last + 1, next + 1));
            }
        }
    }
    double best = inf;
    for (std::size_t last = 0; last < m; ++last) {
        best = std::min(best, at(full - 1, last) + instance.dist(last + 1, 0));
    }
    return best;
}

}  // namespace ael::tsp
