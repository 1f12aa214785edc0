#include "depgauge/resolver.hpp"

#include <algorithm>
#include <cctype>

#include <nlohmann/json.hpp>

#include "depgauge/errors.hpp"
#include "depgauge/intervals.hpp"
#include "depgauge/log.hpp"
#include "depgauge/requirements.hpp"

namespace depgauge {

using json = nlohmann::json;

std::string_view node_status_text(NodeStatus s) {
    switch (s) {
        case NodeStatus::Resolved: return "resolved";
        case NodeStatus::Unresolvable: return "unresolvable";
        case NodeStatus::Circular: return "circular";
    }
    return "?";
}

std::string_view fail_reason_text(FailReason r) {
    switch (r) {
        case FailReason::NotFound: return "not-found";
        case FailReason::NoSatisfyingVersion: return "no-satisfying-version";
        case FailReason::MarkerExcludedPython: return "marker-excluded-python";
        case FailReason::Network: return "network";
        case FailReason::Timeout: return "timeout";
        case FailReason::MalformedMetadata: return "malformed-metadata";
    }
    return "?";
}

std::optional<FailReason> fail_reason_from_text(const std::string& text) {
    if (text == "not-found") return FailReason::NotFound;
    if (text == "no-satisfying-version") return FailReason::NoSatisfyingVersion;
    if (text == "marker-excluded-python") return FailReason::MarkerExcludedPython;
    if (text == "network") return FailReason::Network;
    if (text == "timeout") return FailReason::Timeout;
    if (text == "malformed-metadata") return FailReason::MalformedMetadata;
    return std::nullopt;
}

namespace {

struct ResolveContext {
    MetadataSource& source;
    const ResolveLimits& limits;
    const ResolveOptions& options;
    std::chrono::steady_clock::time_point deadline;
    std::size_t node_budget;
    DependencyTree* tree;
    std::vector<std::string> path;  // normalized names on the current chain
};

// Does the run's python satisfy a requires_python specifier?
bool python_satisfies(const std::string& spec_text, const MarkerEnv& env) {
    auto it = env.find("python_full_version");
    if (it == env.end()) it = env.find("python_version");
    if (it == env.end()) return true;
    auto python = Version::try_parse(it->second);
    if (!python) return true;
    try {
        ConstraintSet spec = ConstraintSet::parse(spec_text);
        return to_interval_set(spec).contains(*python);
    } catch (const ParseError&) {
        log::warn("unparseable requires_python \"" + spec_text + "\"; ignoring");
        return true;
    }
}

DepNode resolve_node(ResolveContext& ctx, const PackageName& name,
                     const ConstraintSet& edge_constraints,
                     const std::vector<std::string>& active_extras, int depth);

void expand_children(ResolveContext& ctx, DepNode& node, const ReleaseMetadata& release,
                     const std::vector<std::string>& active_extras) {
    for (const std::string& line : release.requires_dist) {
        Requirement req;
        try {
            req = Requirement::parse(line);
        } catch (const ParseError& e) {
            log::warn("malformed requirement of " + node.name.normalized + ": " + e.what());
            if (ctx.options.lenient) {
                // Best-effort name recovery; the edge constraint widens to any.
                std::size_t i = 0;
                while (i < line.size() &&
                       (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '.' ||
                        line[i] == '_' || line[i] == '-')) {
                    ++i;
                }
                if (i == 0) continue;  // nothing recoverable
                req = Requirement();
                req.name = PackageName(std::string_view(line).substr(0, i));
            } else {
                DepNode bad;
                bad.name = PackageName(line.substr(0, 60));
                bad.status = NodeStatus::Unresolvable;
                bad.reason = FailReason::MalformedMetadata;
                bad.depth = node.depth + 1;
                node.children.push_back(std::move(bad));
                continue;
            }
        }
        if (req.url) {
            log::warn("skipping direct-URL requirement of " + node.name.normalized + ": " + line);
            continue;
        }
        if (req.marker && !evaluate_marker(*req.marker, ctx.options.env, active_extras)) {
            ctx.tree->marker_skipped.push_back(req.name.normalized);
            continue;
        }
        std::vector<std::string> child_extras(req.extras.begin(), req.extras.end());
        node.children.push_back(
            resolve_node(ctx, req.name, req.constraints, child_extras, node.depth + 1));
    }
}

DepNode resolve_node(ResolveContext& ctx, const PackageName& name,
                     const ConstraintSet& edge_constraints,
                     const std::vector<std::string>& active_extras, int depth) {
    DepNode node;
    node.name = name;
    node.edge_constraints = edge_constraints;
    node.depth = depth;

    // Cycle cut: a name already on the current path becomes a marker leaf.
    if (std::find(ctx.path.begin(), ctx.path.end(), name.normalized) != ctx.path.end()) {
        node.status = NodeStatus::Circular;
        CycleRecord cycle;
        cycle.path = ctx.path;
        cycle.path.push_back(name.normalized);
        cycle.detection_depth = depth;
        ctx.tree->cycles.push_back(std::move(cycle));
        return node;
    }

    if (std::chrono::steady_clock::now() >= ctx.deadline) {
        node.status = NodeStatus::Unresolvable;
        node.reason = FailReason::Timeout;
        ctx.tree->truncated = "timeout";
        return node;
    }
    if (ctx.node_budget == 0) {
        node.status = NodeStatus::Unresolvable;
        node.reason = FailReason::Timeout;
        ctx.tree->truncated = "node-limit";
        return node;
    }
    --ctx.node_budget;

    PackageMetadata metadata;
    try {
        metadata = ctx.source.fetch(name);
    } catch (const NotFoundError&) {
        node.status = NodeStatus::Unresolvable;
        node.reason = FailReason::NotFound;
        return node;
    } catch (const NetworkError& e) {
        log::warn(std::string("network failure for ") + name.normalized + ": " + e.what());
        node.status = NodeStatus::Unresolvable;
        node.reason = FailReason::Network;
        return node;
    } catch (const ParseError&) {
        node.status = NodeStatus::Unresolvable;
        node.reason = FailReason::MalformedMetadata;
        return node;
    }

    IntervalSet allowed = to_interval_set(edge_constraints);
    if (allowed.empty()) {
        node.status = NodeStatus::Unresolvable;
        node.reason = FailReason::NoSatisfyingVersion;
        return node;
    }

    // Highest non-yanked satisfying release; track whether requires_python
    // was the only thing standing in the way.
    const ReleaseMetadata* chosen = nullptr;
    bool python_blocked = false;
    for (const ReleaseMetadata& release : metadata.releases) {
        if (release.yanked) continue;
        if (ctx.options.exclude_prereleases && release.version.is_prerelease()) continue;
        if (!allowed.contains(release.version)) continue;
        if (release.requires_python && !python_satisfies(*release.requires_python, ctx.options.env)) {
            python_blocked = true;
            continue;
        }
        if (!chosen || compare_versions(release.version, chosen->version) > 0) chosen = &release;
    }
    if (!chosen) {
        node.status = NodeStatus::Unresolvable;
        node.reason = python_blocked ? FailReason::MarkerExcludedPython
                                     : FailReason::NoSatisfyingVersion;
        return node;
    }

    node.selected = chosen->version;

    if (depth >= ctx.limits.max_depth) {
        if (!chosen->requires_dist.empty()) ctx.tree->truncated = "depth-limit";
        return node;
    }

    ctx.path.push_back(name.normalized);
    expand_children(ctx, node, *chosen, active_extras);
    ctx.path.pop_back();
    return node;
}

}  // namespace

DependencyTree resolve_tree(const PackageName& name, MetadataSource& source,
                            const ResolveLimits& limits, const ResolveOptions& options) {
    DependencyTree tree;
    auto start = std::chrono::steady_clock::now();
    ResolveContext ctx{source, limits, options, start + limits.timeout, limits.max_nodes, &tree, {}};

    tree.root = resolve_node(ctx, name, ConstraintSet{}, options.root_extras, 0);

    TreeStats stats = compute_stats(tree.root);
    tree.node_count = stats.node_count;
    tree.max_depth = stats.max_depth;
    tree.direct_count = stats.direct_count;
    tree.wall_time = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    return tree;
}

TreeStats compute_stats(const DepNode& root) {
    TreeStats stats;
    stats.direct_count = root.children.size();
    std::vector<const DepNode*> stack{&root};
    while (!stack.empty()) {
        const DepNode* node = stack.back();
        stack.pop_back();
        ++stats.node_count;
        stats.max_depth = std::max(stats.max_depth, node->depth);
        for (const DepNode& child : node->children) stack.push_back(&child);
    }
    return stats;
}

TreeStats tree_stats(const DependencyTree& tree) { return compute_stats(tree.root); }

namespace {

json node_to_json(const DepNode& node) {
    json obj;
    obj["name"] = node.name.normalized;
    obj["status"] = std::string(node_status_text(node.status));
    if (node.status == NodeStatus::Circular) return obj;  // marker carries name+status only
    if (node.selected)
        obj["version"] = node.selected->original_text.empty() ? node.selected->canonical()
                                                              : node.selected->original_text;
    obj["specifier"] = node.edge_constraints.str();
    if (node.reason) obj["reason"] = std::string(fail_reason_text(*node.reason));
    if (node.status == NodeStatus::Resolved) {
        json deps = json::array();
        for (const DepNode& child : node.children) deps.push_back(node_to_json(child));
        obj["deps"] = std::move(deps);
    }
    return obj;
}

DepNode node_from_json(const json& obj, int depth) {
    DepNode node;
    node.name = PackageName(obj.at("name").get<std::string>());
    node.depth = depth;
    std::string status = obj.value("status", "resolved");
    if (status == "circular") {
        node.status = NodeStatus::Circular;
        return node;
    }
    node.status = status == "unresolvable" ? NodeStatus::Unresolvable : NodeStatus::Resolved;
    if (obj.contains("specifier")) {
        node.edge_constraints = ConstraintSet::parse(obj.at("specifier").get<std::string>());
    }
    if (obj.contains("version")) {
        node.selected = Version::parse(obj.at("version").get<std::string>());
    }
    if (obj.contains("reason")) {
        node.reason = fail_reason_from_text(obj.at("reason").get<std::string>());
    }
    if (obj.contains("deps")) {
        for (const auto& child : obj.at("deps")) {
            node.children.push_back(node_from_json(child, depth + 1));
        }
    }
    return node;
}

}  // namespace

std::string tree_to_json(const DependencyTree& tree) {
    json obj = node_to_json(tree.root);
    if (tree.truncated) obj["truncated"] = *tree.truncated;
    return obj.dump();
}

DependencyTree tree_from_json(const std::string& line) {
    json obj = json::parse(line);
    DependencyTree tree;
    tree.root = node_from_json(obj, 0);
    if (obj.contains("truncated")) tree.truncated = obj.at("truncated").get<std::string>();

    TreeStats stats = compute_stats(tree.root);
    tree.node_count = stats.node_count;
    tree.max_depth = stats.max_depth;
    tree.direct_count = stats.direct_count;

    // Rebuild cycle records from marker leaves.
    std::vector<std::pair<const DepNode*, std::vector<std::string>>> stack;
    stack.push_back({&tree.root, {tree.root.name.normalized}});
    while (!stack.empty()) {
        auto [node, path] = std::move(stack.back());
        stack.pop_back();
        if (node->status == NodeStatus::Circular) {
            tree.cycles.push_back(CycleRecord{path, node->depth});
            continue;
        }
        for (const DepNode& child : node->children) {
            auto child_path = path;
            child_path.push_back(child.name.normalized);
            stack.push_back({&child, std::move(child_path)});
        }
    }
    return tree;
}

}  // namespace depgauge
