#include "ael/program.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace ael {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) {
            ++i;
        }
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') {
            ++i;
        }
        if (i > start) {
            out.push_back(s.substr(start, i - start));
        }
    }
    return out;
}

double parse_number(std::string_view token, std::string_view key) {
    if (token == "inf" || token == "+inf") {
        return std::numeric_limits<double>::infinity();
    }
    if (token == "-inf") {
        return -std::numeric_limits<double>::infinity();
    }
    double v = 0.0;
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, v);
    if (ec != std::errc{} || ptr != end || std::isnan(v)) {
        throw MalformedProgram("scored: bad value '" + std::string(token) + "' for " + std::string(key));
    }
    return v;
}

}  // namespace

std::string format_number(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

std::optional<CandidateProgram> CandidateProgram::parse_native(std::string_view text) {
    const auto line = trim(text);
    if (line.find('\n') != std::string_view::npos) {
        return std::nullopt;
    }
    const auto tokens = split_ws(line);
    if (tokens.empty()) {
        return std::nullopt;
    }
    if (tokens[0] == "greedy") {
        if (tokens.size() != 1) {
            throw MalformedProgram("greedy takes no arguments");
        }
        return CandidateProgram::greedy();
    }
    if (tokens[0] != "scored") {
        return std::nullopt;
    }
    static constexpr std::array<std::string_view, 5> keys{"c1", "c2", "c3", "c4", "tau"};
    std::array<std::optional<double>, 5> values;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
        const auto eq = tokens[t].find('=');
        if (eq == std::string_view::npos) {
            throw MalformedProgram("scored: expected key=value, got '" + std::string(tokens[t]) + "'");
        }
        const auto key = tokens[t].substr(0, eq);
        std::size_t slot = keys.size();
        for (std::size_t k = 0; k < keys.size(); ++k) {
            if (keys[k] == key) {
                slot = k;
            }
        }
        if (slot == keys.size()) {
            throw MalformedProgram("scored: unknown parameter '" + std::string(key) + "'");
        }
        if (values[slot]) {
            throw MalformedProgram("scored: duplicate parameter '" + std::string(key) + "'");
        }
        values[slot] = parse_number(tokens[t].substr(eq + 1), key);
    }
    for (std::size_t k = 0; k < keys.size(); ++k) {
        if (!values[k]) {
            throw MalformedProgram("scored: missing parameter '" + std::string(keys[k]) + "'");
        }
    }
    return CandidateProgram::scored({*values[0], *values[1], *values[2], *values[3], *values[4]});
}

CandidateProgram CandidateProgram::from_text(std::string_view text) {
    if (auto native = parse_native(text)) {
        return *native;
    }
    return CandidateProgram::guest(std::string(text));
}

std::string CandidateProgram::canonical_text() const {
    struct Visitor {
        std::string operator()(const GuestSource& g) const { return g.source; }
        std::string operator()(const NativeGreedy&) const { return "greedy"; }
        std::string operator()(const NativeScored& s) const {
            const auto& p = s.params;
            return "scored c1=" + format_number(p.c1) + " c2=" + format_number(p.c2) +
                   " c3=" + format_number(p.c3) + " c4=" + format_number(p.c4) +
                   " tau=" + format_number(p.tau);
        }
    };
    return std::visit(Visitor{}, variant_);
}

}  // namespace ael
