#include "ael/eval/evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "ael/eval/sandbox.hpp"
#include "ael/individual.hpp"
#include "ael/tsp/heuristics.hpp"
#include "ael/tsp/solvers.hpp"

namespace ael::eval {

namespace {

using Clock = std::chrono::steady_clock;

constexpr auto kShutdownGrace = std::chrono::seconds(1);

std::string truncate(std::string s, std::size_t max = 500) {
    if (s.size() > max) {
        s.resize(max);
        s += "...";
    }
    return s;
}

void mark_rest(std::vector<InstanceResult>& results, std::size_t from, InstanceStatus status,
               const std::string& message) {
    for (std::size_t k = from; k < results.size(); ++k) {
        results[k].status = status;
        results[k].message = message;
    }
}

void score_tour(InstanceResult& result, std::span<const tsp::NodeId> order, const tsp::Instance& instance,
                double baseline) {
    const auto verdict = validate_tour(order, instance.size());
    if (!verdict.ok) {
        result.status = InstanceStatus::InvalidTour;
        result.message = verdict.violation;
        return;
    }
    result.length = tsp::tour_length(instance, order);
    result.gap = tsp::gap(result.length, baseline);
    result.status = InstanceStatus::Ok;
}

void evaluate_native(const CandidateProgram& candidate, const EvaluationBatch& batch, tsp::NodeId start,
                     std::vector<InstanceResult>& results) {
    for (std::size_t k = 0; k < batch.size(); ++k) {
        try {
            const auto tour = native_tour(candidate, batch.instances[k], start);
            score_tour(results[k], tour.order, batch.instances[k], batch.baselines[k]);
        } catch (const tsp::InvalidStep& e) {
            results[k].status = InstanceStatus::InvalidTour;
            results[k].message = e.what();
        }
    }
}

void evaluate_guest(const std::string& source, const EvaluationBatch& batch, const EvaluationLimits& limits,
                    std::vector<InstanceResult>& results) {
    const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                             std::chrono::duration<double>(limits.timeout_s));
    std::optional<GuestProcess> guest;
    try {
        guest.emplace(limits.guest_command, limits.inherit_guest_stderr);
    } catch (const SpawnError& e) {
        mark_rest(results, 0, InstanceStatus::RuntimeError, e.what());
        return;
    }

    auto fail_from = [&](std::size_t k, InstanceStatus status, const std::string& message) {
        if (k < results.size()) {
            results[k].status = status;
            results[k].message = message;
            mark_rest(results, k + 1, InstanceStatus::Skipped, "not run: instance " + results[k].instance_id + " failed");
        }
        guest->kill();
        guest->wait(Clock::now() + kShutdownGrace);
    };

    std::string line;
    if (!guest->send_line(encode_load(source), deadline)) {
        fail_from(0, InstanceStatus::RuntimeError, "guest did not accept the load request");
        return;
    }
    switch (guest->read_line(line, deadline)) {
        case GuestProcess::ReadStatus::Timeout:
            fail_from(0, InstanceStatus::Timeout, "guest timed out while loading the candidate");
            return;
        case GuestProcess::ReadStatus::Closed:
            fail_from(0, InstanceStatus::RuntimeError, "guest exited while loading the candidate");
            return;
        case GuestProcess::ReadStatus::Line:
            break;
    }
    try {
        const auto reply = decode_reply(line);
        if (reply.type == GuestReply::Type::LoadError) {
            mark_rest(results, 0, InstanceStatus::RuntimeError, "load_error: " + truncate(reply.msg));
            guest->send_line(encode_shutdown(), Clock::now() + kShutdownGrace);
            guest->wait(Clock::now() + kShutdownGrace);
            return;
        }
        if (reply.type != GuestReply::Type::Ready) {
            throw ProtocolError("expected ready or load_error");
        }
    } catch (const ProtocolError& e) {
        fail_from(0, InstanceStatus::RuntimeError, std::string("protocol error: ") + e.what());
        return;
    }

    for (std::size_t k = 0; k < batch.size(); ++k) {
        const auto& instance = batch.instances[k];
        if (!guest->send_line(encode_solve(results[k].instance_id, instance, limits.start), deadline)) {
            const bool timed_out = Clock::now() >= deadline;
            fail_from(k, timed_out ? InstanceStatus::Timeout : InstanceStatus::RuntimeError,
                      timed_out ? "deadline exceeded" : "guest closed its input");
            return;
        }
        switch (guest->read_line(line, deadline)) {
            case GuestProcess::ReadStatus::Timeout:
                fail_from(k, InstanceStatus::Timeout, "deadline exceeded");
                return;
            case GuestProcess::ReadStatus::Closed:
                fail_from(k, InstanceStatus::RuntimeError, "guest exited unexpectedly");
                return;
            case GuestProcess::ReadStatus::Line:
                break;
        }
        try {
            const auto reply = decode_reply(line);
            if (reply.type == GuestReply::Type::StepError) {
                results[k].status = InstanceStatus::RuntimeError;
                results[k].message = "step_error: " + truncate(reply.msg);
                continue;
            }
            if (reply.type != GuestReply::Type::Tour) {
                throw ProtocolError("expected tour or step_error");
            }
            if (reply.instance_id != results[k].instance_id) {
                throw ProtocolError("reply for instance '" + reply.instance_id + "' while solving '" +
                                    results[k].instance_id + "'");
            }
            score_tour(results[k], reply.order, instance, batch.baselines[k]);
        } catch (const ProtocolError& e) {
            fail_from(k, InstanceStatus::RuntimeError, std::string("protocol error: ") + e.what());
            return;
        }
    }
    guest->send_line(encode_shutdown(), Clock::now() + kShutdownGrace);
    guest->wait(Clock::now() + kShutdownGrace);
}

}  // namespace

std::string_view to_string(InstanceStatus status) {
    switch (status) {
        case InstanceStatus::Ok: return "ok";
        case InstanceStatus::InvalidTour: return "invalid_tour";
        case InstanceStatus::RuntimeError: return "runtime_error";
        case InstanceStatus::Timeout: return "timeout";
        case InstanceStatus::Skipped: return "skipped";
    }
    return "ok";
}

double FitnessReport::fitness() const { return ok ? mean_gap : kSentinelFitness; }

std::string FitnessReport::failure() const {
    for (const auto& r : per_instance) {
        if (r.status != InstanceStatus::Ok) {
            return r.instance_id + ": " + std::string(to_string(r.status)) +
                   (r.message.empty() ? "" : " (" + r.message + ")");
        }
    }
    return {};
}

TourVerdict validate_tour(std::span<const tsp::NodeId> order, std::size_t n) {
    std::vector<char> seen(n, 0);
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto node = order[k];
        if (node >= n) {
            return {false, "node " + std::to_string(node) + " at position " + std::to_string(k) +
                               " is out of range [0," + std::to_string(n) + ")"};
        }
        if (seen[node]) {
            return {false, "duplicate node " + std::to_string(node) + " at position " + std::to_string(k)};
        }
        seen[node] = 1;
    }
    if (order.size() != n) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!seen[j]) {
                return {false, "missing node " + std::to_string(j) + " (tour has " +
                                   std::to_string(order.size()) + " of " + std::to_string(n) + " nodes)"};
            }
        }
    }
    return {};
}

EvaluationBatch make_batch(std::size_t n, std::size_t count, std::uint64_t seed,
                           std::size_t baseline_restarts, unsigned threads) {
    EvaluationBatch batch;
    batch.instances = tsp::generate_batch(n, count, seed);
    batch.baselines.assign(count, 0.0);
    for (std::size_t k = 0; k < count; ++k) {
        batch.ids.push_back("tsp" + std::to_string(n) + "-" + std::to_string(k));
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < count; k = next++) {
            batch.baselines[k] = tsp::two_opt_baseline(batch.instances[k], baseline_restarts);
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < workers; ++t) {
            pool.emplace_back(worker);
        }
        worker();
    }
    return batch;
}

std::map<std::string, double> read_baseline_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read baseline file " + path.string());
    }
    std::map<std::string, double> lengths;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected id,length");
        }
        const auto id = line.substr(0, comma);
        if (id == "id") {
            continue;
        }
        try {
            std::size_t used = 0;
            const double length = std::stod(line.substr(comma + 1), &used);
            if (!(length > 0.0)) {
                throw std::invalid_argument("non-positive");
            }
            lengths[id] = length;
        } catch (const std::exception&) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": bad length");
        }
    }
    return lengths;
}

void apply_baselines(EvaluationBatch& batch, const std::map<std::string, double>& lengths) {
    for (std::size_t k = 0; k < batch.size(); ++k) {
        const auto it = lengths.find(batch.ids[k]);
        if (it == lengths.end()) {
            throw IoError("baseline file has no length for instance " + batch.ids[k]);
        }
        batch.baselines[k] = it->second;
    }
}

tsp::Tour native_tour(const CandidateProgram& candidate, const tsp::Instance& instance, tsp::NodeId start) {
    if (std::holds_alternative<NativeGreedy>(candidate.variant())) {
        return tsp::construct_greedy_tour(instance, start);
    }
    if (const auto* scored = std::get_if<NativeScored>(&candidate.variant())) {
        return tsp::construct_scored_tour(instance, scored->params, start);
    }
    throw Error("native_tour: candidate is guest source");
}

FitnessReport evaluate(const CandidateProgram& candidate, const EvaluationBatch& batch,
                       const EvaluationLimits& limits) {
    const auto started = Clock::now();
    FitnessReport report;
    report.per_instance.resize(batch.size());
    for (std::size_t k = 0; k < batch.size(); ++k) {
        report.per_instance[k].instance_id = batch.ids.size() > k ? batch.ids[k] : std::to_string(k);
    }

    if (candidate.is_native()) {
        evaluate_native(candidate, batch, limits.start, report.per_instance);
    } else {
        evaluate_guest(std::get<GuestSource>(candidate.variant()).source, batch, limits, report.per_instance);
    }

    double sum = 0.0;
    std::size_t ok_count = 0;
    for (const auto& r : report.per_instance) {
        if (r.status == InstanceStatus::Ok) {
            sum += r.gap;
            ++ok_count;
        } else {
            report.ok = false;
        }
    }
    report.mean_gap = ok_count > 0 ? sum / static_cast<double>(ok_count) : 0.0;
    if (batch.size() == 0) {
        report.ok = false;
    }
    report.wall_time_s = std::chrono::duration<double>(Clock::now() - started).count();
    return report;
}

}  // namespace ael::eval
