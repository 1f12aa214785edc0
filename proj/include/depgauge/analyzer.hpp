#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "depgauge/intervals.hpp"
#include "depgauge/resolver.hpp"
#include "depgauge/vulndb.hpp"

namespace depgauge {

enum class ExposureKind { None, Potential, Guaranteed };

std::string_view exposure_kind_text(ExposureKind k);

// Exposure classification per the allowed set S and vulnerable set V:
// guaranteed iff S is entirely vulnerable, potential iff the sets overlap
// without containment, none otherwise. S must be non-empty (empty S means an
// unsatisfiable edge, reported upstream as unresolvable, never classified).
ExposureKind classify(const IntervalSet& s, const IntervalSet& v);

enum class ConstraintMode { Direct, Effective };

std::string_view constraint_mode_text(ConstraintMode m);

struct ExposureFinding {
    std::string top_level;
    std::string dependency;
    std::string cve_id;
    ExposureKind kind = ExposureKind::None;
    ConstraintMode mode = ConstraintMode::Direct;
    std::vector<std::string> path;  // names, top-level .. dependency
    int depth = 0;                  // == path.size() - 1
    std::string s_rendered;
    std::string v_rendered;
};

struct AnalyzeDiagnostics {
    std::size_t visited_frames = 0;
    std::size_t skipped_nodes = 0;      // circular markers and unresolvable leaves
    std::size_t empty_edges = 0;        // unsatisfiable S excluded from classification
    std::vector<std::string> conflicts; // effective-mode empty intersections
};

struct AnalyzeOptions {
    ConstraintMode mode = ConstraintMode::Direct;
    bool exclude_prereleases = false;
};

// Iterative depth-first traversal of one resolved tree; every node whose
// name keys into the vulnerability map is classified against each of its
// CVE ranges. Trees whose root did not resolve yield no findings.
std::vector<ExposureFinding> analyze_tree(const DependencyTree& tree, const VulnDb& db,
                                          const AnalyzeOptions& options = {},
                                          AnalyzeDiagnostics* diagnostics = nullptr);

// Intersection of the constraints imposed on `dependency` by every
// occurrence in the tree. Returns nullopt when the dependency does not
// occur. An empty intersection is a conflict diagnostic, not a finding.
std::optional<IntervalSet> effective_constraints(const DependencyTree& tree,
                                                 const std::string& normalized_dependency);

struct StreamCounters {
    std::size_t trees = 0;
    std::size_t corrupt_records = 0;
    std::size_t findings_guaranteed = 0;
    std::size_t findings_potential = 0;
    // Unique top-level packages with at least one finding of the kind.
    // "any" counts a package under both kinds when both occur (overlapping
    // counting); "disjoint" gives guaranteed precedence.
    std::size_t packages_guaranteed_any = 0;
    std::size_t packages_potential_any = 0;
    std::size_t packages_guaranteed_disjoint = 0;
    std::size_t packages_potential_disjoint = 0;

    friend bool operator==(const StreamCounters&, const StreamCounters&) = default;
};

inline constexpr const char* kFindingsSchema = "depgauge-findings/1";
inline constexpr const char* kFindingsSummarySchema = "depgauge-findings-summary/1";

std::string finding_to_json(const ExposureFinding& finding);
ExposureFinding finding_from_json(const std::string& line);
std::string counters_to_json(const StreamCounters& counters);

// Streams a trees dataset record-by-record (peak memory bounded by the
// largest single tree plus the vulnerability map), appends one finding per
// line to `findings_out` after a schema header, and finishes with a summary
// object. Corrupt records are skipped and counted. `workers` > 1 analyzes
// records in parallel; output order stays the input order.
StreamCounters stream_analyze(const std::string& dataset_path, const VulnDb& db,
                              const std::string& findings_path,
                              const AnalyzeOptions& options = {}, int workers = 1);

// Applies one tree's findings to the running counters.
void accumulate(StreamCounters& counters, const std::vector<ExposureFinding>& findings);

}  // namespace depgauge
