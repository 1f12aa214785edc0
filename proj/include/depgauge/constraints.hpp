#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "depgauge/version.hpp"

namespace depgauge {

enum class CmpOp {
    Eq,          // ==
    Ne,          // !=
    Ge,          // >=
    Le,          // <=
    Gt,          // >
    Lt,          // <
    Compatible,  // ~=
    ArbitraryEq  // ===
};

std::string_view op_text(CmpOp op);

// One comparison clause of a specifier list. For wildcard clauses
// (==1.4.* / !=1.4.*) `wildcard` is set and `prefix`/`prefix_epoch` hold the
// release prefix; otherwise `version` holds the parsed literal. Arbitrary
// equality keeps only the raw text (its literal need not be PEP 440).
struct Clause {
    CmpOp op;
    std::string text;  // literal as written, trimmed
    bool wildcard = false;
    std::optional<Version> version;
    std::vector<long long> prefix;
    long long prefix_epoch = 0;

    std::string str() const { return std::string(op_text(op)) + text; }
};

// A conjunction of version-comparison clauses. An empty clause list means
// "any version". This type is purely syntactic; semantics live in the
// interval algebra (see intervals.hpp).
struct ConstraintSet {
    std::vector<Clause> clauses;

    // Parses a comma-separated specifier list, e.g. ">=2.0.0, <2.0.6".
    // Whitespace-insensitive; an empty or blank string yields "any version".
    // Throws ParseError on unknown operators or malformed version literals.
    static ConstraintSet parse(std::string_view text);

    bool any_version() const { return clauses.empty(); }

    std::string str() const;

    friend bool operator==(const ConstraintSet& a, const ConstraintSet& b);
};

// Expands a ~= clause into its (>= lower, < upper-of-prefix) pair.
std::pair<Clause, Clause> expand_compatible(const Clause& clause);

}  // namespace depgauge
