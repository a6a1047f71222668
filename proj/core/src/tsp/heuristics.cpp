#include "ael/tsp/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ael::tsp {

namespace {

// Distance sums are accumulated in 2^-60 fixed point so that the direct and
// the incremental scorers see bit-identical means and deviations.
__extension__ typedef __int128 Fixed;
constexpr double kFixedScale = 0x1.0p60;

Fixed to_fixed(double v) { return static_cast<Fixed>(std::nearbyint(v * kFixedScale)); }

struct Moments {
    Fixed sum = 0;
    Fixed sum_sq = 0;
};

// Mean and population standard deviation over `count` values.
std::pair<double, double> mean_std(const Moments& m, std::size_t count) {
    if (count == 0) {
        return {0.0, 0.0};
    }
    const double n = static_cast<double>(count);
    const double mean = static_cast<double>(m.sum) / kFixedScale / n;
    const double var = static_cast<double>(m.sum_sq) / kFixedScale / n - mean * mean;
    return {mean, std::sqrt(std::max(0.0, var))};
}

double score(const ScoredParams& p, double to_current, double mean, double stddev,
             double to_destination) {
    return p.c1 * to_current - p.c2 * mean + p.c3 * stddev - p.c4 * to_destination;
}

void check_choice(NodeId choice, std::size_t n, const std::vector<char>& visited, std::size_t step) {
    if (choice >= n) {
        throw InvalidStep("step " + std::to_string(step) + ": selected node " + std::to_string(choice) +
                          " is out of range [0," + std::to_string(n) + ")");
    }
    if (visited[choice]) {
        throw InvalidStep("step " + std::to_string(step) + ": selected node " + std::to_string(choice) +
                          " was already visited");
    }
}

}  // namespace

NodeId greedy_select_next(const SelectionContext& ctx) {
    const auto row = ctx.dist->row(ctx.current);
    NodeId best = ctx.unvisited.front();
    double best_d = row[best];
    for (NodeId j : ctx.unvisited.subspan(1)) {
        if (row[j] < best_d) {
            best = j;
            best_d = row[j];
        }
    }
    return best;
}

NodeId scored_select_next(const SelectionContext& ctx, const ScoredParams& params) {
    if (ctx.unvisited.size() == 1) {
        return ctx.unvisited.front();
    }
    const auto& d = *ctx.dist;
    NodeId best = ctx.unvisited.front();
    double best_score = std::numeric_limits<double>::infinity();
    bool first = true;
    for (NodeId j : ctx.unvisited) {
        Moments m;
        for (NodeId u : ctx.unvisited) {
            if (u == j) {
                continue;
            }
            m.sum += to_fixed(d(j, u));
            m.sum_sq += to_fixed(d(j, u) * d(j, u));
        }
        const auto [mean, stddev] = mean_std(m, ctx.unvisited.size() - 1);
        const double s = score(params, d(ctx.current, j), mean, stddev, d(j, ctx.destination));
        if (first || s < best_score) {
            best = j;
            best_score = s;
            first = false;
        }
    }
    if (best_score > params.tau) {
        return greedy_select_next(ctx);
    }
    return best;
}

Tour construct_tour(const NodeSelector& selector, const Instance& instance, NodeId start) {
    const std::size_t n = instance.size();
    if (start >= n) {
        throw InvalidStep("start node " + std::to_string(start) + " out of range");
    }
    std::vector<char> visited(n, 0);
    std::vector<NodeId> unvisited;
    unvisited.reserve(n - 1);
    for (NodeId j = 0; j < n; ++j) {
        if (j != start) {
            unvisited.push_back(j);
        }
    }
    visited[start] = 1;

    Tour tour;
    tour.order.reserve(n);
    tour.order.push_back(start);
    NodeId current = start;
    for (std::size_t step = 0; !unvisited.empty(); ++step) {
        const SelectionContext ctx{current, start, unvisited, &instance.dist()};
        const NodeId next = selector(ctx);
        check_choice(next, n, visited, step);
        visited[next] = 1;
        unvisited.erase(std::lower_bound(unvisited.begin(), unvisited.end(), next));
        tour.order.push_back(next);
        current = next;
    }
    tour.length = tour_length(instance, tour.order);
    return tour;
}

Tour construct_greedy_tour(const Instance& instance, NodeId start) {
    return construct_tour(greedy_select_next, instance, start);
}

Tour construct_scored_tour(const Instance& instance, const ScoredParams& params, NodeId start) {
    const std::size_t n = instance.size();
    if (start >= n) {
        throw InvalidStep("start node " + std::to_string(start) + " out of range");
    }
    const auto& d = instance.dist();
    std::vector<char> visited(n, 0);
    visited[start] = 1;

    // moments[j] covers distances from j to every unvisited node (d(j,j) = 0).
    std::vector<Moments> moments(n);
    for (NodeId j = 0; j < n; ++j) {
        for (NodeId u = 0; u < n; ++u) {
            if (u != start && u != j) {
                moments[j].sum += to_fixed(d(j, u));
                moments[j].sum_sq += to_fixed(d(j, u) * d(j, u));
            }
        }
    }

    Tour tour;
    tour.order.reserve(n);
    tour.order.push_back(start);
    NodeId current = start;
    for (std::size_t remaining = n - 1; remaining > 0; --remaining) {
        NodeId best = n;
        double best_score = 0.0;
        NodeId nearest = n;
        double nearest_d = 0.0;
        for (NodeId j = 0; j < n; ++j) {
            if (visited[j]) {
                continue;
            }
            const double to_current = d(current, j);
            if (nearest == n || to_current < nearest_d) {
                nearest = j;
                nearest_d = to_current;
            }
            if (remaining == 1) {
                best = j;
                break;
            }
            const auto [mean, stddev] = mean_std(moments[j], remaining - 1);
            const double s = score(params, to_current, mean, stddev, d(j, start));
            if (best == n || s < best_score) {
                best = j;
                best_score = s;
            }
        }
        const NodeId next = (remaining > 1 && best_score > params.tau) ? nearest : best;
        visited[next] = 1;
        for (NodeId j = 0; j < n; ++j) {
            if (!visited[j]) {
                moments[j].sum -= to_fixed(d(j, next));
                moments[j].sum_sq -= to_fixed(d(j, next) * d(j, next));
            }
        }
        tour.order.push_back(next);
        current = next;
    }
    tour.length = tour_length(instance, tour.order);
    return tour;
}

}  // namespace ael::tsp
