#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "depgauge/constraints.hpp"
#include "depgauge/markers.hpp"
#include "depgauge/metadata.hpp"
#include "depgauge/names.hpp"

namespace depgauge {

enum class NodeStatus { Resolved, Unresolvable, Circular };

enum class FailReason {
    NotFound,
    NoSatisfyingVersion,
    MarkerExcludedPython,
    Network,
    Timeout,
    MalformedMetadata,
};

std::string_view node_status_text(NodeStatus s);
std::string_view fail_reason_text(FailReason r);
std::optional<FailReason> fail_reason_from_text(const std::string& text);

struct DepNode {
    PackageName name;
    std::optional<Version> selected;   // absent when unresolvable or circular
    ConstraintSet edge_constraints;    // imposed by the parent edge
    std::vector<DepNode> children;
    NodeStatus status = NodeStatus::Resolved;
    std::optional<FailReason> reason;
    int depth = 0;  // top-level = 0
};

struct CycleRecord {
    std::vector<std::string> path;  // names root..marker
    int detection_depth = 0;
};

struct TreeStats {
    std::size_t direct_count = 0;
    int max_depth = 0;
    std::size_t node_count = 0;  // every node, occurrences counted non-uniquely
};

struct DependencyTree {
    DepNode root;
    std::size_t node_count = 0;
    int max_depth = 0;
    std::size_t direct_count = 0;
    std::vector<CycleRecord> cycles;
    std::chrono::milliseconds wall_time{0};
    std::optional<std::string> truncated;         // "timeout" | "node-limit" | "depth-limit"
    std::vector<std::string> marker_skipped;      // requirements dropped by marker evaluation
};

struct ResolveLimits {
    int max_depth = 30;
    std::chrono::milliseconds timeout{300'000};
    std::size_t max_nodes = 1'000'000;
};

struct ResolveOptions {
    MarkerEnv env = default_marker_env();
    std::vector<std::string> root_extras;  // extras activated for the top-level package
    bool lenient = false;                  // malformed requirement lines widen to any-version
    bool exclude_prereleases = false;
};

// Greedy depth-first resolution: at every edge the highest non-yanked
// release satisfying the constraints is selected and its requirement lines
// (markers evaluated, extras filtered) become children. A name already on
// the current path becomes a circular-marker leaf; failures become
// unresolvable leaves rather than aborting the tree.
DependencyTree resolve_tree(const PackageName& name, MetadataSource& source,
                            const ResolveLimits& limits = {}, const ResolveOptions& options = {});

TreeStats tree_stats(const DependencyTree& tree);
TreeStats compute_stats(const DepNode& root);

// Wire format: one nested object per tree, deterministic key order.
std::string tree_to_json(const DependencyTree& tree);
DependencyTree tree_from_json(const std::string& line);

inline constexpr const char* kTreesSchema = "depgauge-trees/1";

}  // namespace depgauge
