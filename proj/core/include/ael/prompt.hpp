#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ael/errors.hpp"
#include "ael/individual.hpp"

namespace ael::prompt {

struct NamedValue {
    std::string name;
    std::string meaning;
};

/// The problem-specific part of every prompt.
struct TaskSpec {
    std::string task_description;
    std::string function_name;
    std::vector<NamedValue> inputs;
    NamedValue output;
    std::string extra_hints;

    /// Next-node selection for the constructive TSP heuristic.
    static TaskSpec tsp();

    /// Throws ConfigError when a required name is empty.
    void validate() const;
};

enum class PromptKind { Init, Crossover, Mutation };

std::string_view to_string(PromptKind kind);

struct PromptBundle {
    PromptKind kind = PromptKind::Init;
    std::string text;
    std::vector<IndividualId> parent_ids;
};

class TemplateError : public Error {
public:
    using Error::Error;
};

class MissingParentProgram : public Error {
public:
    using Error::Error;
};

/// Substitutes `{name}` placeholders. `{{` and `}}` are literal braces. A line
/// holding nothing but one placeholder that expands to the empty string is
/// dropped entirely. Unknown placeholders throw TemplateError.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

/// The five template texts. Placeholder vocabulary:
///
///   init / crossover / mutation:
///     {task_description} {parents} {parent_count} {expected_output} {other_hints}
///   expected_output:
///     {function_name} {input_count} {inputs} {output_count} {output}
///   parent:
///     {index} {description} {code}
struct TemplateSet {
    std::string init;
    std::string crossover;
    std::string mutation;
    std::string expected_output;
    std::string parent;

    /// The templates shipped in core/templates, compiled in.
    static TemplateSet defaults();

    /// Reads <dir>/<name>.txt for each template; missing files keep the default.
    static TemplateSet load(const std::filesystem::path& dir);
};

class PromptForge {
public:
    explicit PromptForge(TaskSpec task, TemplateSet templates = TemplateSet::defaults());

    PromptBundle render_init() const;
    PromptBundle render_crossover(std::span<const Individual> parents) const;
    PromptBundle render_mutation(const Individual& parent) const;

    const TaskSpec& task() const noexcept { return task_; }

private:
    std::string render_parents(std::span<const Individual> parents) const;
    std::map<std::string, std::string> common_values() const;

    TaskSpec task_;
    TemplateSet templates_;
    std::string expected_output_;
};

}  // namespace ael::prompt
