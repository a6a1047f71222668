#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ael/errors.hpp"

namespace ael::tsp {

using NodeId = std::size_t;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Euclidean distance as sqrt(dx*dx + dy*dy). Guest harnesses must use the
/// same expression to reproduce native tours bit-for-bit.
double euclidean(const Point& a, const Point& b) noexcept;

/// Dense row-major symmetric distance matrix.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::span<const Point> coords);

    std::size_t size() const noexcept { return n_; }
    double operator()(NodeId i, NodeId j) const noexcept { return data_[i * n_ + j]; }
    std::span<const double> row(NodeId i) const noexcept { return {data_.data() + i * n_, n_}; }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// A Euclidean TSP instance. Immutable once built.
class Instance {
public:
    Instance() = default;
    Instance(std::vector<Point> coords, std::uint64_t seed);

    std::size_t size() const noexcept { return coords_.size(); }
    std::uint64_t seed() const noexcept { return seed_; }
    const std::vector<Point>& coords() const noexcept { return coords_; }
    const DistanceMatrix& dist() const noexcept { return dist_; }
    double dist(NodeId i, NodeId j) const noexcept { return dist_(i, j); }

private:
    std::vector<Point> coords_;
    DistanceMatrix dist_;
    std::uint64_t seed_ = 0;
};

/// A closed tour: visiting order plus its length.
struct Tour {
    std::vector<NodeId> order;
    double length = 0.0;
};

class InvalidInstance : public Error {
public:
    using Error::Error;
};

/// n points i.i.d. uniform on [0,1)^2. The sampler is fixed (mt19937_64 with
/// 53-bit mantissa extraction) so instances are identical across standard
/// library implementations.
Instance generate_instance(std::size_t n, std::uint64_t seed);

/// Seed of the k-th instance of a batch derived from a batch seed.
std::uint64_t batch_instance_seed(std::uint64_t batch_seed, std::size_t n, std::size_t k);

/// `count` instances of size n with seeds from batch_instance_seed.
std::vector<Instance> generate_batch(std::size_t n, std::size_t count, std::uint64_t batch_seed);

/// Closed-tour length of `order` (including the return edge).
double tour_length(const Instance& instance, std::span<const NodeId> order);

/// Relative excess of `length` over `baseline`: (length - baseline) / baseline.
double gap(double length, double baseline);

// Instance files: JSON object {"n", "seed", "coords": [[x, y], ...]} with
// round-trip decimal coordinates.
void save_instance(const Instance& instance, const std::filesystem::path& path);
Instance load_instance(const std::filesystem::path& path);
std::string instance_to_json(const Instance& instance);
Instance instance_from_json(const std::string& text);

}  // namespace ael::tsp
