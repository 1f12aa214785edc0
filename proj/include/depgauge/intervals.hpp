#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "depgauge/constraints.hpp"
#include "depgauge/version.hpp"

namespace depgauge {

// A set of versions represented as a canonical union of disjoint intervals
// plus point exclusions arising from != clauses. The algebra works over a
// dense-order model: between any two distinct versions another version is
// assumed to exist (true under PEP 440 by suffixing post/dev segments), so
// removing a finite point set never closes a gap.
//
// Internally the set is a sorted list of half-open runs over "cuts":
// positions immediately below or above a version. Every operation is exact
// in that model and canonical forms are unique, which makes equality,
// idempotence, and emptiness checks trivial.
class IntervalSet {
public:
    struct Endpoint {
        std::optional<Version> version;  // nullopt = infinite
        bool inclusive = false;

        bool infinite() const { return !version.has_value(); }
    };

    struct Interval {
        Endpoint lower;  // infinite lower = -inf
        Endpoint upper;  // infinite upper = +inf
    };

    // Spec-facing canonical form: disjoint sorted intervals, merged across
    // single-point gaps, with those gap points listed as exclusions.
    struct SpecForm {
        std::vector<Interval> intervals;
        std::vector<Version> excluded_points;
    };

    IntervalSet() = default;  // empty set

    static IntervalSet empty_set() { return IntervalSet(); }
    static IntervalSet full();
    static IntervalSet point(const Version& v);
    // Builds [lower, upper] with the given openness; nullopt = unbounded.
    static IntervalSet bounded(std::optional<Version> lower, bool lower_closed,
                               std::optional<Version> upper, bool upper_closed);

    bool empty() const { return runs_.empty(); }
    bool is_full() const;
    bool contains(const Version& v) const;

    IntervalSet intersect(const IntervalSet& other) const;
    IntervalSet unite(const IntervalSet& other) const;
    IntervalSet complement() const;
    bool subset_of(const IntervalSet& other) const;

    // The subset of `releases` (sorted ascending) lying in this set.
    // With exclude_prereleases set, pre/dev versions are filtered out.
    std::vector<Version> restrict_to_releases(std::span<const Version> releases,
                                              bool exclude_prereleases = false) const;

    // Widens prerelease boundary versions to their release family edge and
    // drops prerelease exclusion points; used when the caller wants the
    // set compared over non-prerelease versions only.
    IntervalSet without_prerelease_boundaries() const;

    SpecForm spec_form() const;

    // Stable rendering, e.g. "(-inf, 1.26.17) | [2.0.0, 2.0.6)" or
    // "[1.0, 2.0) \ {1.2}". The empty set renders as "(empty)".
    std::string str() const;

    friend bool operator==(const IntervalSet& a, const IntervalSet& b);

private:
    struct Cut {
        // 0 = below all, 1 = just below v, 2 = just above v, 3 = above all
        int kind = 0;
        Version v;
    };
    using Run = std::pair<Cut, Cut>;  // half-open [lo, hi) over cuts

    static std::strong_ordering cmp(const Cut& a, const Cut& b);
    static std::vector<Run> canonicalize(std::vector<Run> runs);

    explicit IntervalSet(std::vector<Run> runs) : runs_(std::move(runs)) {}

    std::vector<Run> runs_;
};

// Semantics-preserving conversion: a version satisfies the ConstraintSet iff
// it lies in the returned IntervalSet. Local version labels are stripped
// before the algebra (logged); contradictory clauses yield the empty set.
IntervalSet to_interval_set(const ConstraintSet& constraints);

inline IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) { return a.intersect(b); }
inline bool is_empty(const IntervalSet& a) { return a.empty(); }
inline bool is_subset(const IntervalSet& a, const IntervalSet& b) { return a.subset_of(b); }
inline bool contains(const IntervalSet& a, const Version& v) { return a.contains(v); }

}  // namespace depgauge
