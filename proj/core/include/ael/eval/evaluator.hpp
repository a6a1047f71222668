#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ael/program.hpp"
#include "ael/tsp/instance.hpp"

namespace ael::eval {

enum class InstanceStatus { Ok, InvalidTour, RuntimeError, Timeout, Skipped };

std::string_view to_string(InstanceStatus status);

struct InstanceResult {
    std::string instance_id;
    double length = 0.0;
    double gap = 0.0;
    InstanceStatus status = InstanceStatus::Ok;
    std::string message;
};

struct FitnessReport {
    std::vector<InstanceResult> per_instance;
    /// Arithmetic mean of the gaps of the Ok instances.
    double mean_gap = 0.0;
    /// False as soon as one instance is not Ok.
    bool ok = true;
    double wall_time_s = 0.0;

    /// mean_gap when ok, the sentinel fitness otherwise.
    double fitness() const;
    /// First non-Ok instance message, empty when ok.
    std::string failure() const;
};

struct TourVerdict {
    bool ok = true;
    std::string violation;
};

/// Checks that `order` is a permutation of {0..n-1}.
TourVerdict validate_tour(std::span<const tsp::NodeId> order, std::size_t n);

/// Instances paired with their baseline tour lengths.
struct EvaluationBatch {
    std::vector<std::string> ids;
    std::vector<tsp::Instance> instances;
    std::vector<double> baselines;

    std::size_t size() const noexcept { return instances.size(); }
};

/// Generates `count` instances of size n from `seed` and solves each with the
/// multistart 2-opt baseline. Instance ids are "tsp<n>-<k>".
EvaluationBatch make_batch(std::size_t n, std::size_t count, std::uint64_t seed,
                           std::size_t baseline_restarts = 5, unsigned threads = 1);

/// Baseline import file: one "id,length" line per instance ("#" comments
/// allowed). Replaces the baselines of the matching batch ids; throws
/// IoError when an id of the batch is missing from the file.
std::map<std::string, double> read_baseline_file(const std::filesystem::path& path);
void apply_baselines(EvaluationBatch& batch, const std::map<std::string, double>& lengths);

struct EvaluationLimits {
    /// Wall-clock budget for the whole batch in the guest process.
    double timeout_s = 60.0;
    /// argv of the guest runtime; the candidate source is sent over the protocol.
    std::vector<std::string> guest_command{"python3", "-m", "ael_guest"};
    bool inherit_guest_stderr = false;
    tsp::NodeId start = 0;
};

/// Tours every instance of the batch with `candidate` and aggregates gaps.
/// Never throws for candidate failures; they are encoded in the report.
FitnessReport evaluate(const CandidateProgram& candidate, const EvaluationBatch& batch,
                       const EvaluationLimits& limits = {});

/// Native tour for a native candidate. Throws for guest candidates.
tsp::Tour native_tour(const CandidateProgram& candidate, const tsp::Instance& instance,
                      tsp::NodeId start = 0);

/// The fitness function used by the evolution engine.
class FitnessEvaluator {
public:
    virtual ~FitnessEvaluator() = default;
    virtual FitnessReport evaluate(const CandidateProgram& candidate) const = 0;
};

class BatchEvaluator : public FitnessEvaluator {
public:
    BatchEvaluator(EvaluationBatch batch, EvaluationLimits limits = {})
        : batch_(std::move(batch)), limits_(std::move(limits)) {}

    FitnessReport evaluate(const CandidateProgram& candidate) const override {
        return eval::evaluate(candidate, batch_, limits_);
    }

    const EvaluationBatch& batch() const noexcept { return batch_; }
    const EvaluationLimits& limits() const noexcept { return limits_; }

private:
    EvaluationBatch batch_;
    EvaluationLimits limits_;
};

}  // namespace ael::eval
