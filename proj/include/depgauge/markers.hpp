#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace depgauge {

// PEP 508 environment marker expression tree. Kept unevaluated at parse
// time; evaluation takes an environment map.
struct MarkerExpr {
    enum class Kind { And, Or, Not, Comparison };

    struct Value {
        bool is_variable = false;
        std::string text;
    };

    Kind kind;
    std::vector<MarkerExpr> children;  // And/Or/Not
    Value lhs, rhs;                    // Comparison
    std::string comparison_op;         // "==", ">=", "in", "not in", ...

    std::string str() const;

    friend bool operator==(const MarkerExpr& a, const MarkerExpr& b);
};

using MarkerEnv = std::map<std::string, std::string>;

// Marker variables of the analysis environment. The paper-era defaults pin
// CPython 3.10 on Linux; every key can be overridden.
MarkerEnv default_marker_env();

// Throws ParseError on grammar violations.
MarkerExpr parse_marker(std::string_view text);

// Evaluates under PEP 508 semantics: version-valued comparisons use PEP 440
// ordering when both operands parse as versions, strings otherwise. An
// unknown variable makes its comparison false with a warning. The `extra`
// variable matches any name in `active_extras` (or "" when none).
bool evaluate_marker(const MarkerExpr& marker, const MarkerEnv& env,
                     const std::vector<std::string>& active_extras = {});

}  // namespace depgauge
