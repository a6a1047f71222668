#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "ael/errors.hpp"
#include "ael/program.hpp"
#include "ael/prompt.hpp"

namespace ael::llm {

enum class ParseErrorKind { NoCodeBlock, WrongFunctionSignature, EmptyDescription, MalformedProgram };

std::string_view to_string(ParseErrorKind kind);

class ParseError : public Error {
public:
    ParseError(ParseErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
    ParseErrorKind kind() const noexcept { return kind_; }

private:
    ParseErrorKind kind_;
};

class NoCodeBlock : public ParseError {
public:
    explicit NoCodeBlock(const std::string& what) : ParseError(ParseErrorKind::NoCodeBlock, what) {}
};

class WrongFunctionSignature : public ParseError {
public:
    explicit WrongFunctionSignature(const std::string& what)
        : ParseError(ParseErrorKind::WrongFunctionSignature, what) {}
};

class EmptyDescription : public ParseError {
public:
    explicit EmptyDescription(const std::string& what)
        : ParseError(ParseErrorKind::EmptyDescription, what) {}
};

class MalformedNativeProgram : public ParseError {
public:
    explicit MalformedNativeProgram(const std::string& what)
        : ParseError(ParseErrorKind::MalformedProgram, what) {}
};

struct ParsedIndividual {
    std::string description;
    CandidateProgram program;
};

/// Contents of the first fenced block (``` ... ```), if any.
std::optional<std::string> first_code_block(std::string_view text);

/// Keeps at most `max_sentences` sentences of `text`.
std::string truncate_sentences(std::string_view text, std::size_t max_sentences);

/// Parameters of `def <name>(...)` in Python source, split at top-level
/// commas; nullopt when no such definition exists.
std::optional<std::vector<std::string>> python_parameters(std::string_view source,
                                                          std::string_view name);

/// Splits a model response into (description, program). The description is
/// the text after an "Algorithm:" marker, or the first paragraph before the
/// code block, truncated to two sentences. The first fenced block is the
/// program: a DSL line gives a native variant, anything else must define
/// task.function_name callable with exactly task.inputs.size() positional
/// arguments (extra parameters need defaults).
ParsedIndividual parse_individual(std::string_view raw_response, const prompt::TaskSpec& task);

/// Inverse of parse_individual for the default expected-output contract.
std::string format_individual(std::string_view description, const CandidateProgram& program);

}  // namespace ael::llm
