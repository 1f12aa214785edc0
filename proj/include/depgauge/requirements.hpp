#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "depgauge/constraints.hpp"
#include "depgauge/markers.hpp"
#include "depgauge/names.hpp"

namespace depgauge {

// One parsed dependency declaration per PEP 508:
//   name [extra1,extra2] (>=1.0,<2.0) ; python_version >= "3.8"
// Direct-URL requirements (name @ url) are accepted; the URL is recorded and
// the constraint set is "any version".
struct Requirement {
    PackageName name;
    std::set<std::string> extras;
    ConstraintSet constraints;
    std::optional<MarkerExpr> marker;
    std::optional<std::string> url;

    static Requirement parse(std::string_view text);

    // Renders a form that reparses to an equal value.
    std::string str() const;

    friend bool operator==(const Requirement& a, const Requirement& b);
};

}  // namespace depgauge
