#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace agx {

// Half-open character interval [begin, end) into a document's raw text.
struct CharSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t length() const { return end - begin; }
    bool empty() const { return begin >= end; }
    bool overlaps(const CharSpan& o) const {
        return begin < o.end && o.begin < end;
    }
    bool contains(const CharSpan& o) const {
        return begin <= o.begin && o.end <= end;
    }
    auto operator<=>(const CharSpan&) const = default;
};

// Half-open token index interval [begin, end).
struct TokenSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t length() const { return end - begin; }
    bool empty() const { return begin >= end; }
    auto operator<=>(const TokenSpan&) const = default;
};

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input text (markup or grammar DSL). Carries a message that
// names the offending construct and its position.
struct parse_error : error {
    using error::error;
};

// Well-formed input carrying an out-of-contract value.
struct validation_error : error {
    using error::error;
};

// A configurable resource cap was exceeded (edge count, parse count).
struct resource_error : error {
    using error::error;
};

enum class Severity { warning, failure };

struct Diagnostic {
    Severity severity = Severity::warning;
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

inline bool has_failure(const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags)
        if (d.severity == Severity::failure) return true;
    return false;
}

}  // namespace agx
