#include "ael/tsp/instance.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace ael::tsp {

namespace {

double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

double euclidean(const Point& a, const Point& b) noexcept {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

DistanceMatrix::DistanceMatrix(std::span<const Point> coords)
    : n_(coords.size()), data_(coords.size() * coords.size(), 0.0) {
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
            const double d = euclidean(coords[i], coords[j]);
            data_[i * n_ + j] = d;
            data_[j * n_ + i] = d;
        }
    }
}

Instance::Instance(std::vector<Point> coords, std::uint64_t seed)
    : coords_(std::move(coords)), dist_(coords_), seed_(seed) {
    if (coords_.size() < 2) {
        throw InvalidInstance("instance needs at least 2 nodes, got " +
                              std::to_string(coords_.size()));
    }
    for (const auto& p : coords_) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw InvalidInstance("instance coordinates must be finite");
        }
    }
}

Instance generate_instance(std::size_t n, std::uint64_t seed) {
    if (n < 2) {
        throw InvalidInstance("instance needs at least 2 nodes, got " + std::to_string(n));
    }
    std::mt19937_64 rng(seed);
    std::vector<Point> coords(n);
    for (auto& p : coords) {
        p.x = unit_double(rng);
        p.y = unit_double(rng);
    }
    return Instance(std::move(coords), seed);
}

std::uint64_t batch_instance_seed(std::uint64_t batch_seed, std::size_t n, std::size_t k) {
    return splitmix64(splitmix64(splitmix64(batch_seed) ^ n) ^ k);
}

std::vector<Instance> generate_batch(std::size_t n, std::size_t count, std::uint64_t batch_seed) {
    std::vector<Instance> batch;
    batch.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        batch.push_back(generate_instance(n, batch_instance_seed(batch_seed, n, k)));
    }
    return batch;
}

double tour_length(const Instance& instance, std::span<const NodeId> order) {
    if (order.empty()) {
        return 0.0;
    }
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        total += instance.dist(order[k], order[k + 1]);
    }
    return total + instance.dist(order.back(), order.front());
}

double gap(double length, double baseline) {
    if (!(baseline > 0.0)) {
        throw Error("gap: baseline must be positive");
    }
    return (length - baseline) / baseline;
}

std::string instance_to_json(const Instance& instance) {
    nlohmann::json doc;
    doc["n"] = instance.size();
    doc["seed"] = instance.seed();
    auto& coords = doc["coords"] = nlohmann::json::array();
    for (const auto& p : instance.coords()) {
        coords.push_back({p.x, p.y});
    }
    return doc.dump();
}

Instance instance_from_json(const std::string& text) {
    try {
        const auto doc = nlohmann::json::parse(text);
        const auto n = doc.at("n").get<std::size_t>();
        std::vector<Point> coords;
        for (const auto& xy : doc.at("coords")) {
            coords.push_back({xy.at(0).get<double>(), xy.at(1).get<double>()});
        }
        if (coords.size() != n) {
            throw InvalidInstance("instance file declares n=" + std::to_string(n) + " but lists " +
                                  std::to_string(coords.size()) + " coordinates");
        }
        return Instance(std::move(coords), doc.value("seed", std::uint64_t{0}));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInstance(std::string("malformed instance file: ") + e.what());
    }
}

void save_instance(const Instance& instance, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << instance_to_json(instance) << '\n';
}

Instance load_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return instance_from_json(buffer.str());
}

}  // namespace ael::tsp
