#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ael/tsp/instance.hpp"

namespace ael::tsp {

/// Runs first-improvement 2-opt on `order` in place until no improving
/// reversal exists. Returns the resulting closed-tour length.
double two_opt_local_search(const Instance& instance, std::vector<NodeId>& order);

struct TwoOptOptions {
    std::size_t restarts = 5;
    /// Seed for the random starting permutations; mixed with the instance seed.
    std::uint64_t seed = 0;
};

/// Best 2-opt local optimum over `restarts` starts: the greedy tour from
/// node 0 and restarts-1 random permutations. Never worse than greedy.
Tour two_opt_baseline_tour(const Instance& instance, const TwoOptOptions& options = {});
double two_opt_baseline(const Instance& instance, std::size_t restarts = 5);

class InstanceTooLarge : public Error {
public:
    using Error::Error;
};

inline constexpr std::size_t kHeldKarpMaxNodes = 13;

/// Exact optimal tour length by dynamic programming over subsets.
/// Throws InstanceTooLarge above kHeldKarpMaxNodes.
double held_karp(const Instance& instance);

}  // namespace ael::tsp
