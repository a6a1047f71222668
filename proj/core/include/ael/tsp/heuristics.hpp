#pragma once

#include <functional>
#include <limits>
#include <span>

#include "ael/tsp/instance.hpp"

namespace ael::tsp {

/// Everything a next-node selector may look at. `unvisited` is sorted
/// ascending and never contains `current` or `destination`.
struct SelectionContext {
    NodeId current = 0;
    NodeId destination = 0;
    std::span<const NodeId> unvisited;
    const DistanceMatrix* dist = nullptr;
};

using NodeSelector = std::function<NodeId(const SelectionContext&)>;

/// Nearest unvisited node; ties go to the smallest index.
NodeId greedy_select_next(const SelectionContext& ctx);

/// Weights of the score-with-threshold family. For candidate j:
///   score(j) = c1*d(cur,j) - c2*mean_j + c3*std_j - c4*d(j,dest)
/// where mean_j/std_j are the mean and population standard deviation of the
/// distances from j to the other unvisited nodes. When the smallest score
/// exceeds tau the nearest node is chosen instead.
struct ScoredParams {
    double c1 = 1.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double c4 = 0.0;
    double tau = std::numeric_limits<double>::infinity();

    friend bool operator==(const ScoredParams&, const ScoredParams&) = default;
};

/// Direct O(|U|^2) evaluation of the scored rule for one step.
NodeId scored_select_next(const SelectionContext& ctx, const ScoredParams& params);

class InvalidStep : public Error {
public:
    using Error::Error;
};

/// Builds a tour from `start` (which is also the destination) by repeatedly
/// asking `selector` for the next node. Throws InvalidStep when the selector
/// returns a node that is out of range or already visited.
Tour construct_tour(const NodeSelector& selector, const Instance& instance, NodeId start = 0);

Tour construct_greedy_tour(const Instance& instance, NodeId start = 0);

/// Same tours as construct_tour with scored_select_next, but maintains the
/// per-node distance sums incrementally so a full tour costs O(n^2).
Tour construct_scored_tour(const Instance& instance, const ScoredParams& params, NodeId start = 0);

}  // namespace ael::tsp
