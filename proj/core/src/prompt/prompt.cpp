#include "ael/prompt.hpp"

#include <fstream>
#include <sstream>

#include "ael/default_templates.hpp"

namespace ael::prompt {

namespace {

std::string join_names(const std::vector<NamedValue>& values) {
    std::string out;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k > 0) {
            out += (k + 1 == values.size()) ? (values.size() > 2 ? ", and " : " and ") : ", ";
        }
        out += "'" + values[k].name + "'";
        if (!values[k].meaning.empty()) {
            out += " (" + values[k].meaning + ")";
        }
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read template " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// Drops trailing blank lines and ends the text with exactly one newline.
std::string normalize_tail(std::string text) {
    while (!text.empty() && (text.back() == '\n' || text.back() == ' ' || text.back() == '\r')) {
        text.pop_back();
    }
    text.push_back('\n');
    return text;
}

}  // namespace

TaskSpec TaskSpec::tsp() {
    TaskSpec task;
    task.task_description =
        "Given a set of nodes with their coordinates, find a shortest route that visits every node "
        "exactly once and returns to the starting node. The route is built one step at a time: "
        "from the current node, choose which unvisited node to go to next. Your job is to design "
        "the rule that chooses the next node at each step.";
    task.function_name = "select_next_node";
    task.inputs = {
        {"current_node", "index of the node the route is at"},
        {"destination_node", "index of the starting node the route must return to"},
        {"unvisited_nodes", "list of indices of the nodes not yet visited, in ascending order"},
        {"distance_matrix", "2-D array where distance_matrix[i][j] is the distance between nodes i and j"},
    };
    task.output = {"next_node", "index of the chosen node, taken from unvisited_nodes"};
    task.extra_hints =
        "Do not give additional explanations and keep code comments to a minimum.";
    return task;
}

void TaskSpec::validate() const {
    if (function_name.empty()) {
        throw ConfigError("task: function_name must not be empty");
    }
    if (output.name.empty()) {
        throw ConfigError("task: output name must not be empty");
    }
    for (const auto& in : inputs) {
        if (in.name.empty()) {
            throw ConfigError("task: input names must not be empty");
        }
    }
}

std::string_view to_string(PromptKind kind) {
    switch (kind) {
        case PromptKind::Init: return "init";
        case PromptKind::Crossover: return "crossover";
        case PromptKind::Mutation: return "mutation";
    }
    return "init";
}

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(tmpl.size() * 2);
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        std::size_t eol = tmpl.find('\n', pos);
        const bool has_newline = eol != std::string_view::npos;
        if (!has_newline) {
            eol = tmpl.size();
        }
        const std::string_view line = tmpl.substr(pos, eol - pos);
        pos = has_newline ? eol + 1 : eol;

        std::string rendered;
        bool only_placeholder = false;
        std::size_t placeholders = 0;
        bool literal_text = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (c == '{' && i + 1 < line.size() && line[i + 1] == '{') {
                rendered.push_back('{');
                literal_text = true;
                ++i;
            } else if (c == '}' && i + 1 < line.size() && line[i + 1] == '}') {
                rendered.push_back('}');
                literal_text = true;
                ++i;
            } else if (c == '{') {
                const auto close = line.find('}', i);
                if (close == std::string_view::npos) {
                    throw TemplateError("unterminated placeholder in line: " + std::string(line));
                }
                const std::string name(line.substr(i + 1, close - i - 1));
                const auto it = values.find(name);
                if (it == values.end()) {
                    throw TemplateError("unknown placeholder {" + name + "}");
                }
                rendered += it->second;
                ++placeholders;
                i = close;
            } else if (c == '}') {
                throw TemplateError("stray '}' in line: " + std::string(line));
            } else {
                rendered.push_back(c);
                if (c != ' ' && c != '\t' && c != '\r') {
                    literal_text = true;
                }
            }
        }
        only_placeholder = placeholders == 1 && !literal_text;
        if (only_placeholder && rendered.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        out += rendered;
        if (has_newline) {
            out.push_back('\n');
        }
    }
    return out;
}

TemplateSet TemplateSet::defaults() {
    return {std::string(templates::kInit), std::string(templates::kCrossover),
            std::string(templates::kMutation), std::string(templates::kExpectedOutput),
            std::string(templates::kParent)};
}

TemplateSet TemplateSet::load(const std::filesystem::path& dir) {
    auto set = defaults();
    const std::pair<const char*, std::string*> files[] = {
        {"init.txt", &set.init},
        {"crossover.txt", &set.crossover},
        {"mutation.txt", &set.mutation},
        {"expected_output.txt", &set.expected_output},
        {"parent.txt", &set.parent},
    };
    for (const auto& [name, slot] : files) {
        const auto path = dir / name;
        if (std::filesystem::exists(path)) {
            *slot = read_file(path);
        }
    }
    return set;
}

PromptForge::PromptForge(TaskSpec task, TemplateSet templates)
    : task_(std::move(task)), templates_(std::move(templates)) {
    task_.validate();
    expected_output_ = render_template(
        templates_.expected_output,
        {
            {"function_name", task_.function_name},
            {"input_count", std::to_string(task_.inputs.size())},
            {"inputs", join_names(task_.inputs)},
            {"output_count", "1"},
            {"output", join_names({task_.output})},
        });
    while (!expected_output_.empty() && expected_output_.back() == '\n') {
        expected_output_.pop_back();
    }
}

std::map<std::string, std::string> PromptForge::common_values() const {
    return {
        {"task_description", task_.task_description},
        {"expected_output", expected_output_},
        {"other_hints", task_.extra_hints},
        {"parents", ""},
        {"parent_count", "0"},
    };
}

std::string PromptForge::render_parents(std::span<const Individual> parents) const {
    std::string out;
    for (std::size_t k = 0; k < parents.size(); ++k) {
        const auto& parent = parents[k];
        if (k > 0) {
            out.push_back('\n');
        }
        auto code = parent.program.canonical_text();
        if (code.empty()) {
            throw MissingParentProgram("parent " + std::to_string(parent.id) + " has no program text");
        }
        while (!code.empty() && code.back() == '\n') {
            code.pop_back();
        }
        out += render_template(templates_.parent, {
                                                      {"index", std::to_string(k + 1)},
                                                      {"description", parent.description},
                                                      {"code", code},
                                                  });
        if (!out.empty() && out.back() != '\n') {
            out.push_back('\n');
        }
    }
    return out;
}

PromptBundle PromptForge::render_init() const {
    return {PromptKind::Init, normalize_tail(render_template(templates_.init, common_values())), {}};
}

PromptBundle PromptForge::render_crossover(std::span<const Individual> parents) const {
    if (parents.empty()) {
        throw MissingParentProgram("crossover prompt needs at least one parent");
    }
    auto values = common_values();
    values["parents"] = render_parents(parents);
    values["parent_count"] = std::to_string(parents.size());
    PromptBundle bundle{PromptKind::Crossover,
                        normalize_tail(render_template(templates_.crossover, values)), {}};
    for (const auto& p : parents) {
        bundle.parent_ids.push_back(p.id);
    }
    return bundle;
}

PromptBundle PromptForge::render_mutation(const Individual& parent) const {
    auto values = common_values();
    values["parents"] = render_parents(std::span<const Individual>(&parent, 1));
    values["parent_count"] = "1";
    return {PromptKind::Mutation, normalize_tail(render_template(templates_.mutation, values)),
            {parent.id}};
}

}  // namespace ael::prompt
