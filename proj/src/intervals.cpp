#include "depgauge/intervals.hpp"

#include <algorithm>

#include "depgauge/log.hpp"

namespace depgauge {

namespace {

Version strip_local_logged(const Version& v) {
    if (!v.has_local()) return v;
    log::warn("stripping local version label from \"" + v.original_text + "\" for interval algebra");
    return v.without_local();
}

// Smallest version of the release family `prefix` under epoch `epoch`:
// the .dev0 pre-release of the prefix.
Version family_floor(long long epoch, std::vector<long long> prefix) {
    Version v;
    v.epoch = epoch;
    v.release = std::move(prefix);
    v.dev = 0;
    v.original_text = v.canonical();
    return v;
}

}  // namespace

std::strong_ordering IntervalSet::cmp(const Cut& a, const Cut& b) {
    bool a_edge = a.kind == 0 || a.kind == 3;
    bool b_edge = b.kind == 0 || b.kind == 3;
    if (a_edge || b_edge) {
        if (auto c = a.kind <=> b.kind; a_edge && b_edge) return c;
        if (a.kind == 0) return std::strong_ordering::less;
        if (a.kind == 3) return std::strong_ordering::greater;
        if (b.kind == 0) return std::strong_ordering::greater;
        return std::strong_ordering::less;  // b.kind == 3
    }
    if (auto c = compare_versions(a.v, b.v); c != 0) return c;
    return a.kind <=> b.kind;
}

std::vector<IntervalSet::Run> IntervalSet::canonicalize(std::vector<Run> runs) {
    std::erase_if(runs, [](const Run& r) { return cmp(r.first, r.second) >= 0; });
    std::sort(runs.begin(), runs.end(),
              [](const Run& a, const Run& b) { return cmp(a.first, b.first) < 0; });
    std::vector<Run> merged;
    for (auto& run : runs) {
        if (!merged.empty() && cmp(run.first, merged.back().second) <= 0) {
            if (cmp(run.second, merged.back().second) > 0) merged.back().second = run.second;
        } else {
            merged.push_back(std::move(run));
        }
    }
    return merged;
}

IntervalSet IntervalSet::full() {
    return IntervalSet({{Cut{0, {}}, Cut{3, {}}}});
}

IntervalSet IntervalSet::point(const Version& v) {
    Version p = v.without_local();
    return IntervalSet({{Cut{1, p}, Cut{2, p}}});
}

IntervalSet IntervalSet::bounded(std::optional<Version> lower, bool lower_closed,
                                 std::optional<Version> upper, bool upper_closed) {
    Cut lo = lower ? Cut{lower_closed ? 1 : 2, lower->without_local()} : Cut{0, {}};
    Cut hi = upper ? Cut{upper_closed ? 2 : 1, upper->without_local()} : Cut{3, {}};
    if (cmp(lo, hi) >= 0) return empty_set();
    return IntervalSet({{std::move(lo), std::move(hi)}});
}

bool IntervalSet::is_full() const {
    return runs_.size() == 1 && runs_[0].first.kind == 0 && runs_[0].second.kind == 3;
}

bool IntervalSet::contains(const Version& v) const {
    Version p = v.without_local();
    Cut lo{1, p};
    Cut hi{2, p};
    for (const auto& run : runs_) {
        if (cmp(run.first, lo) <= 0 && cmp(hi, run.second) <= 0) return true;
        if (cmp(run.first, hi) >= 0) break;
    }
    return false;
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
    std::vector<Run> out;
    std::size_t i = 0, j = 0;
    while (i < runs_.size() && j < other.runs_.size()) {
        const Run& a = runs_[i];
        const Run& b = other.runs_[j];
        const Cut& lo = cmp(a.first, b.first) >= 0 ? a.first : b.first;
        const Cut& hi = cmp(a.second, b.second) <= 0 ? a.second : b.second;
        if (cmp(lo, hi) < 0) out.push_back({lo, hi});
        if (cmp(a.second, b.second) <= 0) ++i; else ++j;
    }
    return IntervalSet(std::move(out));
}

IntervalSet IntervalSet::unite(const IntervalSet& other) const {
    std::vector<Run> all = runs_;
    all.insert(all.end(), other.runs_.begin(), other.runs_.end());
    return IntervalSet(canonicalize(std::move(all)));
}

IntervalSet IntervalSet::complement() const {
    std::vector<Run> out;
    Cut cursor{0, {}};
    for (const auto& run : runs_) {
        if (cmp(cursor, run.first) < 0) out.push_back({cursor, run.first});
        cursor = run.second;
    }
    Cut top{3, {}};
    if (cmp(cursor, top) < 0) out.push_back({cursor, top});
    return IntervalSet(std::move(out));
}

bool IntervalSet::subset_of(const IntervalSet& other) const {
    // Canonical runs are separated by nonempty gaps, so every run of this
    // set must fit inside a single run of the other.
    std::size_t j = 0;
    for (const auto& a : runs_) {
        while (j < other.runs_.size() && cmp(other.runs_[j].second, a.first) <= 0) ++j;
        if (j == other.runs_.size()) return false;
        const Run& b = other.runs_[j];
        if (cmp(b.first, a.first) > 0 || cmp(a.second, b.second) > 0) return false;
    }
    return true;
}

std::vector<Version> IntervalSet::restrict_to_releases(std::span<const Version> releases,
                                                       bool exclude_prereleases) const {
    std::vector<Version> out;
    for (const Version& r : releases) {
        if (exclude_prereleases && r.is_prerelease()) continue;
        if (contains(r)) out.push_back(r);
    }
    return out;
}

IntervalSet IntervalSet::without_prerelease_boundaries() const {
    std::vector<Run> out;
    for (Run run : runs_) {
        if (run.first.kind == 1 || run.first.kind == 2) {
            if (run.first.v.is_prerelease()) {
                // Widen down to the floor of the version's release family.
                run.first = Cut{1, family_floor(run.first.v.epoch, run.first.v.release)};
            }
        }
        if (run.second.kind == 1 || run.second.kind == 2) {
            if (run.second.v.is_prerelease()) {
                run.second = Cut{1, family_floor(run.second.v.epoch, run.second.v.release)};
            }
        }
        out.push_back(std::move(run));
    }
    return IntervalSet(canonicalize(std::move(out)));
}

IntervalSet::SpecForm IntervalSet::spec_form() const {
    SpecForm form;
    std::size_t i = 0;
    while (i < runs_.size()) {
        Cut lo = runs_[i].first;
        Cut hi = runs_[i].second;
        // Absorb single-point gaps: ... , X) (X, ...  becomes an excluded point.
        while (i + 1 < runs_.size()) {
            const Cut& gap_lo = runs_[i].second;
            const Cut& gap_hi = runs_[i + 1].first;
            if (gap_lo.kind == 1 && gap_hi.kind == 2 && compare_versions(gap_lo.v, gap_hi.v) == 0) {
                form.excluded_points.push_back(gap_lo.v);
                hi = runs_[i + 1].second;
                ++i;
            } else {
                break;
            }
        }
        Interval interval;
        switch (lo.kind) {
            case 0: interval.lower = {std::nullopt, false}; break;
            case 1: interval.lower = {lo.v, true}; break;
            default: interval.lower = {lo.v, false}; break;
        }
        switch (hi.kind) {
            case 3: interval.upper = {std::nullopt, false}; break;
            case 1: interval.upper = {hi.v, false}; break;
            default: interval.upper = {hi.v, true}; break;
        }
        form.intervals.push_back(std::move(interval));
        ++i;
    }
    return form;
}

std::string IntervalSet::str() const {
    if (runs_.empty()) return "(empty)";
    SpecForm form = spec_form();
    std::string out;
    for (std::size_t i = 0; i < form.intervals.size(); ++i) {
        if (i) out += " | ";
        const Interval& iv = form.intervals[i];
        out += iv.lower.infinite() ? "(-inf" : (iv.lower.inclusive ? "[" : "(") +
                                                   iv.lower.version->canonical();
        out += ", ";
        out += iv.upper.infinite() ? "+inf)" : iv.upper.version->canonical() +
                                                   (iv.upper.inclusive ? "]" : ")");
    }
    if (!form.excluded_points.empty()) {
        out += " \\ {";
        for (std::size_t i = 0; i < form.excluded_points.size(); ++i) {
            if (i) out += ", ";
            out += form.excluded_points[i].canonical();
        }
        out += "}";
    }
    return out;
}

bool operator==(const IntervalSet& a, const IntervalSet& b) {
    if (a.runs_.size() != b.runs_.size()) return false;
    for (std::size_t i = 0; i < a.runs_.size(); ++i) {
        if (IntervalSet::cmp(a.runs_[i].first, b.runs_[i].first) != 0 ||
            IntervalSet::cmp(a.runs_[i].second, b.runs_[i].second) != 0)
            return false;
    }
    return true;
}

namespace {

IntervalSet wildcard_interval(long long epoch, const std::vector<long long>& prefix) {
    Version lower = family_floor(epoch, prefix);
    std::vector<long long> bumped = prefix;
    bumped.back() += 1;
    Version upper = family_floor(epoch, std::move(bumped));
    return IntervalSet::bounded(lower, true, upper, false);
}

IntervalSet clause_interval(const Clause& clause) {
    switch (clause.op) {
        case CmpOp::Eq:
            if (clause.wildcard) return wildcard_interval(clause.prefix_epoch, clause.prefix);
            return IntervalSet::point(strip_local_logged(*clause.version));
        case CmpOp::Ne:
            if (clause.wildcard)
                return wildcard_interval(clause.prefix_epoch, clause.prefix).complement();
            return IntervalSet::point(strip_local_logged(*clause.version)).complement();
        case CmpOp::Ge:
            return IntervalSet::bounded(*clause.version, true, std::nullopt, false);
        case CmpOp::Gt:
            return IntervalSet::bounded(*clause.version, false, std::nullopt, false);
        case CmpOp::Le:
            return IntervalSet::bounded(std::nullopt, false, *clause.version, true);
        case CmpOp::Lt:
            return IntervalSet::bounded(std::nullopt, false, *clause.version, false);
        case CmpOp::Compatible: {
            auto [lower, upper] = expand_compatible(clause);
            return clause_interval(lower).intersect(clause_interval(upper));
        }
        case CmpOp::ArbitraryEq: {
            // Arbitrary equality over a PEP 440 universe: a parseable literal
            // matches its normalized point; anything else matches nothing.
            if (auto v = Version::try_parse(clause.text))
                return IntervalSet::point(strip_local_logged(*v));
            return IntervalSet::empty_set();
        }
    }
    return IntervalSet::empty_set();
}

}  // namespace

IntervalSet to_interval_set(const ConstraintSet& constraints) {
    IntervalSet result = IntervalSet::full();
    for (const Clause& clause : constraints.clauses) {
        result = result.intersect(clause_interval(clause));
        if (result.empty()) break;
    }
    return result;
}

}  // namespace depgauge
