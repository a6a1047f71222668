#include "ael/llm/parse.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <vector>

namespace ael::llm {

namespace {

constexpr std::string_view kFence = "```";

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Strips markdown emphasis, braces and quotes that models like to wrap
// descriptions in.
std::string strip_decoration(std::string_view s) {
    auto text = trim(s);
    const std::string_view junk = "*_{}\"'` \t";
    const auto first = text.find_first_not_of(junk);
    if (first == std::string::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(junk);
    text = text.substr(first, last - first + 1);
    // Closing punctuation may have been stripped together with the wrapper.
    return text;
}

// First paragraph (run of non-blank lines) of `text`, joined with spaces.
std::string first_paragraph(std::string_view text) {
    std::string para;
    std::size_t pos = 0;
    bool started = false;
    while (pos <= text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = text.size();
        }
        const auto line = trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        if (line.empty()) {
            if (started) {
                break;
            }
            continue;
        }
        if (started) {
            para.push_back(' ');
        }
        para += line;
        started = true;
        if (eol == text.size()) {
            break;
        }
    }
    return para;
}

struct FencedBlock {
    std::size_t begin = 0;  // offset of the opening fence
    std::size_t end = 0;    // offset just past the closing fence
    std::string content;
};

std::optional<FencedBlock> find_block(std::string_view text) {
    const auto open = text.find(kFence);
    if (open == std::string_view::npos) {
        return std::nullopt;
    }
    const auto after_open = open + kFence.size();
    auto eol = text.find('\n', after_open);
    if (eol == std::string_view::npos) {
        eol = text.size();
    }
    // Inline block: ```content``` on one line.
    const auto inline_close = text.substr(after_open, eol - after_open).find(kFence);
    if (inline_close != std::string_view::npos) {
        return FencedBlock{open, after_open + inline_close + kFence.size(),
                           trim(text.substr(after_open, inline_close))};
    }
    if (eol == text.size()) {
        return std::nullopt;
    }
    std::size_t pos = eol + 1;
    while (pos <= text.size()) {
        auto line_end = text.find('\n', pos);
        if (line_end == std::string_view::npos) {
            line_end = text.size();
        }
        const auto line = text.substr(pos, line_end - pos);
        const auto first = line.find_first_not_of(" \t");
        if (first != std::string_view::npos && line.substr(first, kFence.size()) == kFence) {
            std::string content(text.substr(eol + 1, pos - (eol + 1)));
            while (!content.empty() && (content.back() == '\n' || content.back() == '\r')) {
                content.pop_back();
            }
            return FencedBlock{open, line_end, std::move(content)};
        }
        if (line_end == text.size()) {
            break;
        }
        pos = line_end + 1;
    }
    return std::nullopt;
}

std::string extract_description(std::string_view before, std::string_view after) {
    const auto lowered = lower(before);
    const auto marker = lowered.find("algorithm:");
    if (marker != std::string::npos) {
        auto desc = strip_decoration(first_paragraph(before.substr(marker + 10)));
        if (!desc.empty()) {
            return desc;
        }
    }
    auto desc = strip_decoration(first_paragraph(before));
    if (!desc.empty()) {
        return desc;
    }
    const auto lowered_after = lower(after);
    const auto marker_after = lowered_after.find("algorithm:");
    if (marker_after != std::string::npos) {
        return strip_decoration(first_paragraph(after.substr(marker_after + 10)));
    }
    return strip_decoration(first_paragraph(after));
}

bool has_default(std::string_view param) {
    int depth = 0;
    for (char c : param) {
        if (c == '(' || c == '[' || c == '{') ++depth;
        if (c == ')' || c == ']' || c == '}') --depth;
        if (c == '=' && depth == 0) return true;
    }
    return false;
}

void check_signature(std::string_view source, const prompt::TaskSpec& task) {
    const auto params = python_parameters(source, task.function_name);
    if (!params) {
        throw WrongFunctionSignature("code block does not define a function named '" +
                                     task.function_name + "'");
    }
    const std::size_t wanted = task.inputs.size();
    std::size_t positional = 0;
    std::size_t required = 0;
    bool varargs = false;
    bool keyword_only = false;
    for (const auto& p : *params) {
        if (p == "/") {
            continue;
        }
        if (p.starts_with("**")) {
            break;
        }
        if (p.starts_with("*")) {
            varargs = p.size() > 1;
            keyword_only = true;
            continue;
        }
        if (keyword_only) {
            if (!has_default(p)) {
                throw WrongFunctionSignature("'" + task.function_name +
                                             "' has a required keyword-only parameter: " + p);
            }
            continue;
        }
        ++positional;
        if (!has_default(p)) {
            ++required;
        }
    }
    if (required > wanted || (positional < wanted && !varargs)) {
        throw WrongFunctionSignature("'" + task.function_name + "' must accept " +
                                     std::to_string(wanted) + " positional arguments, found " +
                                     std::to_string(required) + " required of " +
                                     std::to_string(positional));
    }
}

}  // namespace

std::string_view to_string(ParseErrorKind kind) {
    switch (kind) {
        case ParseErrorKind::NoCodeBlock: return "no_code_block";
        case ParseErrorKind::WrongFunctionSignature: return "wrong_function_signature";
        case ParseErrorKind::EmptyDescription: return "empty_description";
        case ParseErrorKind::MalformedProgram: return "malformed_program";
    }
    return "unknown";
}

std::optional<std::string> first_code_block(std::string_view text) {
    auto block = find_block(text);
    if (!block) {
        return std::nullopt;
    }
    return std::move(block->content);
}

std::string truncate_sentences(std::string_view text, std::size_t max_sentences) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c != '.' && c != '!' && c != '?') {
            continue;
        }
        const bool boundary = i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1]));
        if (boundary && ++count == max_sentences) {
            return trim(text.substr(0, i + 1));
        }
    }
    return trim(text);
}

std::optional<std::vector<std::string>> python_parameters(std::string_view source,
                                                          std::string_view name) {
    const std::string src(source);
    const std::regex def_re("(^|\\n)[ \\t]*(async[ \\t]+)?def[ \\t]+" + std::string(name) +
                            "[ \\t]*\\(");
    std::smatch match;
    if (!std::regex_search(src, match, def_re)) {
        return std::nullopt;
    }
    std::size_t pos = static_cast<std::size_t>(match.position(0) + match.length(0));
    std::vector<std::string> params;
    std::string current;
    int depth = 0;
    char quote = 0;
    for (; pos < src.size(); ++pos) {
        const char c = src[pos];
        if (quote) {
            current.push_back(c);
            if (c == quote) quote = 0;
            continue;
        }
        if (c == '"' || c == '\'') {
            quote = c;
            current.push_back(c);
        } else if (c == '(' || c == '[' || c == '{') {
            ++depth;
            current.push_back(c);
        } else if (c == ')' && depth == 0) {
            break;
        } else if (c == ')' || c == ']' || c == '}') {
            --depth;
            current.push_back(c);
        } else if (c == ',' && depth == 0) {
            params.push_back(trim(current));
            current.clear();
        } else if (c == '#') {
            while (pos < src.size() && src[pos] != '\n') ++pos;
        } else {
            current.push_back(c);
        }
    }
    if (pos >= src.size()) {
        return std::nullopt;
    }
    if (auto last = trim(current); !last.empty()) {
        params.push_back(std::move(last));
    }
    return params;
}

ParsedIndividual parse_individual(std::string_view raw_response, const prompt::TaskSpec& task) {
    const auto block = find_block(raw_response);
    if (!block) {
        throw NoCodeBlock("response contains no fenced code block");
    }
    if (trim(block->content).empty()) {
        throw NoCodeBlock("response contains an empty code block");
    }
    auto description = extract_description(raw_response.substr(0, block->begin),
                                            raw_response.substr(block->end));
    description = truncate_sentences(description, 2);
    if (description.empty()) {
        throw EmptyDescription("response contains no algorithm description");
    }

    std::optional<CandidateProgram> native;
    try {
        native = CandidateProgram::parse_native(block->content);
    } catch (const MalformedProgram& e) {
        throw MalformedNativeProgram(e.what());
    }
    if (native) {
        return {std::move(description), std::move(*native)};
    }
    check_signature(block->content, task);
    return {std::move(description), CandidateProgram::guest(block->content)};
}

std::string format_individual(std::string_view description, const CandidateProgram& program) {
    std::string out = "Algorithm: ";
    out += description;
    out += program.is_native() ? "\n```\n" : "\n```python\n";
    auto code = program.canonical_text();
    while (!code.empty() && code.back() == '\n') {
        code.pop_back();
    }
    out += code;
    out += "\n```\n";
    return out;
}

}  // namespace ael::llm
