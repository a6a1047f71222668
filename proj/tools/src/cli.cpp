#include "cli.hpp"

#include <algorithm>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "ael/eval/evaluator.hpp"
#include "ael/evo/engine.hpp"
#include "ael/llm/http.hpp"
#include "ael/llm/mock.hpp"
#include "ael/llm/parse.hpp"
#include "ael/tsp/heuristics.hpp"

namespace ael::cli {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << text;
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

std::vector<std::string> split_words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> words;
    for (std::string w; in >> w;) {
        words.push_back(w);
    }
    return words;
}

std::unique_ptr<llm::LlmOperator> make_llm(const std::string& mode, const llm::LlmSettings& settings) {
    const auto colon = mode.find(':');
    const std::string kind = mode.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : mode.substr(colon + 1);
    if (kind == "live") {
        return std::make_unique<llm::HttpLlm>(settings);
    }
    if (kind == "mock" && !arg.empty()) {
        return std::make_unique<llm::ScriptedLlm>(llm::ScriptedLlm::from_file(arg));
    }
    if (kind == "replay" && !arg.empty()) {
        return std::make_unique<llm::ReplayLlm>(llm::ReplayLlm::from_file(arg));
    }
    if (kind == "synthetic") {
        return std::make_unique<llm::SyntheticLlm>(arg.empty() ? 0 : std::stoull(arg));
    }
    throw ConfigError("unknown --llm mode '" + mode + "' (live, mock:PATH, replay:PATH, synthetic[:SEED])");
}

// An algorithm file holds either a formatted response (description plus
// fenced program) or a bare program.
CandidateProgram load_algorithm(const std::string& choice) {
    if (choice == "greedy") {
        return CandidateProgram::greedy();
    }
    const auto text = read_file(choice);
    try {
        return llm::parse_individual(text, prompt::TaskSpec::tsp()).program;
    } catch (const llm::ParseError&) {
        auto first = text.find_first_not_of(" \t\r\n");
        auto last = text.find_last_not_of(" \t\r\n");
        if (first == std::string::npos) {
            throw ConfigError("algorithm file " + choice + " is empty");
        }
        try {
            return CandidateProgram::from_text(text.substr(first, last - first + 1));
        } catch (const MalformedProgram& e) {
            throw ConfigError(e.what());
        }
    }
}

std::string checkpoint_name(std::size_t generation) {
    std::ostringstream s;
    s << "gen_" << std::setw(2) << std::setfill('0') << generation << ".json";
    return s.str();
}

struct RunOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> generations;
    std::optional<unsigned> parallel;
    std::string llm = "live";
    std::string out = "ael_run";
    std::string resume;
    std::string guest_cmd;
    std::string templates;
};

int cmd_run(const RunOptions& opt, std::ostream& out) {
    auto config = evo::load_config(opt.config);
    if (opt.seed) config.rng_seed = *opt.seed;
    if (opt.generations) config.generations = *opt.generations;
    if (opt.parallel) config.parallel = *opt.parallel;
    config.validate();

    const fs::path dir = opt.out;
    fs::create_directories(dir / "checkpoints");
    const fs::path transcript = dir / "transcript.jsonl";

    std::optional<evo::Checkpoint> checkpoint;
    evo::EvolutionTrace previous;
    if (!opt.resume.empty()) {
        checkpoint = evo::checkpoint_from_json(read_file(opt.resume));
        if (fs::exists(dir / "trace.json")) {
            previous = evo::trace_from_json(read_file(dir / "trace.json"));
        }
    } else {
        fs::remove(transcript);
    }

    auto inner = make_llm(opt.llm, config.llm);
    llm::TranscriptWriter writer(transcript);
    llm::RecordingLlm recording(*inner, writer);

    eval::EvaluationLimits limits;
    limits.timeout_s = config.evaluation_timeout_s;
    if (!opt.guest_cmd.empty()) {
        limits.guest_command = split_words(opt.guest_cmd);
    }
    eval::BatchEvaluator evaluator(eval::make_batch(config.evaluation_instance_size, config.evaluation_instance_count,
                                                    config.rng_seed, config.baseline_restarts, config.parallel),
                                   limits);

    prompt::PromptForge forge(prompt::TaskSpec::tsp(), opt.templates.empty()
                                                           ? prompt::TemplateSet::defaults()
                                                           : prompt::TemplateSet::load(opt.templates));
    evo::Engine engine(config, recording, evaluator, forge);
    engine.on_generation([&](const evo::Checkpoint& cp, const evo::GenerationRecord& rec) {
        write_file(dir / "checkpoints" / checkpoint_name(cp.generation), evo::checkpoint_to_json(cp));
        out << "generation " << rec.generation << ": best " << format_number(rec.best_fitness) << ", mean "
            << format_number(rec.mean_fitness) << "\n";
    });

    RunManifest manifest;
    manifest.config = config;
    manifest.llm_mode = opt.llm;
    manifest.transcript = transcript.string();
    manifest.output_dir = dir.string();
    manifest.started_at = utc_now();
    write_file(dir / "manifest.json", manifest_to_json(manifest));

    auto result = checkpoint ? engine.resume(*checkpoint) : engine.run();
    if (checkpoint) {
        // Stitch the earlier generations back in front of the resumed ones.
        std::erase_if(previous.generations,
                      [&](const evo::GenerationRecord& g) { return g.generation > checkpoint->generation; });
        for (auto& g : result.trace.generations) {
            previous.generations.push_back(std::move(g));
        }
        previous.warnings.insert(previous.warnings.end(), result.trace.warnings.begin(),
                                 result.trace.warnings.end());
        result.trace = std::move(previous);
    }

    write_file(dir / "trace.json", evo::trace_to_json(result.trace));
    write_file(dir / "trace.csv", evo::trace_to_csv(result.trace));
    write_file(dir / "best_algorithm.txt", llm::format_individual(result.best.description, result.best.program));
    manifest.finished_at = utc_now();
    manifest.best = result.best;
    write_file(dir / "manifest.json", manifest_to_json(manifest));

    for (const auto& w : result.trace.warnings) {
        out << "warning: " << w << "\n";
    }
    out << "best fitness " << format_number(result.best.fitness.value_or(kSentinelFitness)) << "\n"
        << result.best.program.canonical_text() << "\n";
    return kOk;
}

struct EvaluateOptions {
    std::string algorithm = "greedy";
    std::vector<std::size_t> sizes{20, 50, 100, 200, 500, 1000};
    std::size_t instances = 64;
    std::uint64_t seed = 1;
    std::string baseline = "two-opt";
    std::size_t restarts = 5;
    unsigned parallel = 1;
    double timeout_s = 60.0;
    std::string guest_cmd;
    std::string csv;
    std::string instances_csv;
};

eval::EvaluationBatch batch_for(const EvaluateOptions& opt, std::size_t n) {
    if (opt.baseline == "two-opt") {
        return eval::make_batch(n, opt.instances, opt.seed, opt.restarts, opt.parallel);
    }
    if (opt.baseline.starts_with("import:")) {
        eval::EvaluationBatch batch;
        batch.instances = tsp::generate_batch(n, opt.instances, opt.seed);
        for (std::size_t k = 0; k < opt.instances; ++k) {
            batch.ids.push_back("tsp" + std::to_string(n) + "-" + std::to_string(k));
        }
        batch.baselines.assign(opt.instances, 0.0);
        eval::apply_baselines(batch, eval::read_baseline_file(opt.baseline.substr(7)));
        return batch;
    }
    throw ConfigError("unknown --baseline '" + opt.baseline + "' (two-opt, import:PATH)");
}

int cmd_evaluate(const EvaluateOptions& opt, std::ostream& out, std::ostream& err) {
    const auto candidate = load_algorithm(opt.algorithm);
    eval::EvaluationLimits limits;
    limits.timeout_s = opt.timeout_s;
    if (!opt.guest_cmd.empty()) {
        limits.guest_command = split_words(opt.guest_cmd);
    }

    std::ostringstream table, csv, per_instance;
    table << std::setw(8) << "size" << std::setw(11) << "instances" << std::setw(14) << "mean_length"
          << std::setw(16) << "mean_baseline" << std::setw(10) << "gap_%" << "\n";
    csv << "size,instances,mean_length,mean_baseline,mean_gap\n";
    per_instance << "size,instance_id,seed,length,baseline,gap\n";
    int status = kOk;
    for (const auto n : opt.sizes) {
        const auto batch = batch_for(opt, n);
        const auto report = eval::evaluate(candidate, batch, limits);
        if (!report.ok) {
            err << "candidate failed on size " << n << ": " << report.failure() << "\n";
            status = kCandidateFailed;
            break;
        }
        double length = 0.0, baseline = 0.0;
        for (std::size_t k = 0; k < batch.size(); ++k) {
            const auto& r = report.per_instance[k];
            length += r.length;
            baseline += batch.baselines[k];
            per_instance << n << ',' << r.instance_id << ',' << batch.instances[k].seed() << ','
                         << format_number(r.length) << ',' << format_number(batch.baselines[k]) << ','
                         << format_number(r.gap) << "\n";
        }
        length /= static_cast<double>(batch.size());
        baseline /= static_cast<double>(batch.size());
        table << std::setw(8) << n << std::setw(11) << batch.size() << std::fixed << std::setprecision(4)
              << std::setw(14) << length << std::setw(16) << baseline << std::setprecision(2) << std::setw(10)
              << 100.0 * report.mean_gap << std::defaultfloat << "\n";
        csv << n << ',' << batch.size() << ',' << format_number(length) << ',' << format_number(baseline) << ','
            << format_number(report.mean_gap) << "\n";
    }
    out << table.str();
    if (!opt.csv.empty()) {
        write_file(opt.csv, csv.str());
    }
    if (!opt.instances_csv.empty()) {
        write_file(opt.instances_csv, per_instance.str());
    }
    return status;
}

struct ReportOptions {
    std::string run;
    std::size_t routes = 0;
};

int cmd_report(const ReportOptions& opt, std::ostream& out, std::ostream& err) {
    const fs::path dir = opt.run;
    std::string manifest_text;
    try {
        manifest_text = read_file(dir / "manifest.json");
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    }
    const auto manifest = manifest_from_json(manifest_text);
    const auto trace = evo::trace_from_json(read_file(dir / "trace.json"));

    write_file(dir / "convergence.csv", evo::trace_to_csv(trace));
    out << "wrote " << (dir / "convergence.csv").string() << " (" << trace.generations.size() << " rows)\n";
    for (std::size_t g = 1; g < trace.generations.size(); ++g) {
        if (trace.generations[g].best_fitness > trace.generations[g - 1].best_fitness) {
            err << "warning: best gap increases at generation " << trace.generations[g].generation << "\n";
        }
    }

    if (opt.routes == 0) {
        return kOk;
    }
    if (!manifest.best) {
        err << "manifest has no best individual; cannot draw routes\n";
        return kFailure;
    }
    if (!manifest.best->program.is_native()) {
        err << "route plots are only drawn for native programs\n";
        return kFailure;
    }
    const auto& cfg = manifest.config;
    const auto count = std::min(opt.routes, cfg.evaluation_instance_count);
    const auto instances = tsp::generate_batch(cfg.evaluation_instance_size, count, cfg.rng_seed);
    fs::create_directories(dir / "routes");
    for (std::size_t k = 0; k < instances.size(); ++k) {
        const auto tour = eval::native_tour(manifest.best->program, instances[k]);
        const auto path = dir / "routes" / ("route_" + std::to_string(k) + "_seed_" +
                                             std::to_string(instances[k].seed()) + ".svg");
        write_file(path, route_svg(instances[k], tour.order));
        out << "wrote " << path.string() << "\n";
    }
    return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Evolve and evaluate constructive TSP heuristics with a language model"};
    app.require_subcommand(1);

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Run an evolution and write its artifacts");
    run_cmd->add_option("--config", run.config, "Config file (JSON)")->required();
    run_cmd->add_option("--seed", run.seed, "Override rng_seed");
    run_cmd->add_option("--generations", run.generations, "Override generations");
    run_cmd->add_option("--llm", run.llm, "live | mock:PATH | replay:PATH | synthetic[:SEED]");
    run_cmd->add_option("--out", run.out, "Output directory");
    run_cmd->add_option("--parallel", run.parallel, "Evaluation threads");
    run_cmd->add_option("--resume", run.resume, "Checkpoint file to resume from");
    run_cmd->add_option("--guest-cmd", run.guest_cmd, "Command line of the guest runtime");
    run_cmd->add_option("--templates", run.templates, "Directory with prompt template overrides");

    EvaluateOptions ev;
    auto* ev_cmd = app.add_subcommand("evaluate", "Evaluate an algorithm across problem sizes");
    ev_cmd->add_option("--algorithm", ev.algorithm, "Algorithm file, or 'greedy'");
    ev_cmd->add_option("--sizes", ev.sizes, "Problem sizes")->delimiter(',');
    ev_cmd->add_option("--instances", ev.instances, "Instances per size");
    ev_cmd->add_option("--seed", ev.seed, "Batch seed");
    ev_cmd->add_option("--baseline", ev.baseline, "two-opt | import:PATH");
    ev_cmd->add_option("--restarts", ev.restarts, "2-opt restarts per instance");
    ev_cmd->add_option("--parallel", ev.parallel, "Threads for baseline solves");
    ev_cmd->add_option("--timeout", ev.timeout_s, "Guest time limit per batch (s)");
    ev_cmd->add_option("--guest-cmd", ev.guest_cmd, "Command line of the guest runtime");
    ev_cmd->add_option("--csv", ev.csv, "Write the summary table as CSV");
    ev_cmd->add_option("--instances-csv", ev.instances_csv, "Write per-instance results as CSV");

    ReportOptions rep;
    auto* rep_cmd = app.add_subcommand("report", "Convergence CSV and route plots for a run directory");
    rep_cmd->add_option("--run", rep.run, "Run directory")->required();
    rep_cmd->add_option("--routes", rep.routes, "Number of route plots to draw");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*run_cmd) return cmd_run(run, out);
        if (*ev_cmd) return cmd_evaluate(ev, out, err);
        return cmd_report(rep, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const evo::InitializationExhausted& e) {
        err << "initialization failed: " << e.what() << "\n";
        return kLlmError;
    } catch (const llm::LlmUnavailable& e) {
        err << "llm unavailable: " << e.what() << "\n";
        return kLlmError;
    } catch (const llm::AuthError& e) {
        err << "llm authentication failed: " << e.what() << "\n";
        return kLlmError;
    } catch (const llm::ScriptExhausted& e) {
        err << "mock script exhausted: " << e.what() << "\n";
        return kLlmError;
    } catch (const llm::ReplayMismatch& e) {
        err << "replay mismatch: " << e.what() << "\n";
        return kLlmError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
}

}  // namespace ael::cli
