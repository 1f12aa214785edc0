#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "depgauge/resolver.hpp"

namespace depgauge {

struct ShardSpec {
    int index = 0;
    int count = 1;
};

// The contiguous slice of `total` items belonging to shard `spec.index`.
std::pair<std::size_t, std::size_t> shard_bounds(std::size_t total, const ShardSpec& spec);

struct EcosystemRunOptions {
    ResolveLimits limits;
    ResolveOptions resolve;
    ShardSpec shard;
    int workers = 4;
    // Test hook: artificial delay per package, to make interruption windows
    // reachable in crash tests.
    std::chrono::milliseconds sleep_per_package{0};
};

struct EcosystemRunResult {
    std::size_t resolved = 0;  // trees written in this run
    std::size_t skipped = 0;   // already present from an earlier run
};

// Resolves every name of the shard, writing one serialized tree per line to
// `out_path` (after a schema header) in input order, and appending each
// completed name to `progress_path`. Restart-safe: on startup the output is
// reconciled against the progress file (records without a progress entry and
// partial trailing lines are dropped), then resolution continues with the
// remaining names. Per-package failures never abort the stream.
EcosystemRunResult ecosystem_resolve(const std::vector<PackageName>& names,
                                     MetadataSource& source, const std::string& out_path,
                                     const std::string& progress_path,
                                     const EcosystemRunOptions& options);

// Aggregated structural statistics over a stream of trees.
struct EcosystemStats {
    std::size_t tree_count = 0;
    std::map<std::size_t, std::size_t> direct_histogram;   // direct deps -> trees
    std::map<int, std::size_t> depth_histogram;            // max depth -> trees
    std::map<int, std::size_t> circular_depth_histogram;   // detection depth -> cycles
    std::map<std::string, std::size_t> occurrences;        // name -> non-root node occurrences
    std::size_t total_nodes = 0;
    std::size_t total_cycles = 0;

    double mean_direct() const;
    double mean_depth() const;
    double mean_circular_depth() const;
    std::size_t unique_packages() const { return occurrences.size(); }

    // Top-N most depended-upon packages (count desc, name asc).
    std::vector<std::pair<std::string, std::size_t>> top_occurrences(std::size_t n) const;

    void add_tree(const DependencyTree& tree);
};

EcosystemStats ecosystem_stats(const std::vector<DependencyTree>& trees);

// Streams a trees dataset file through a callback; returns corrupt-line
// count. Throws on missing file or schema mismatch.
std::size_t for_each_tree(const std::string& dataset_path,
                          const std::function<void(DependencyTree&&)>& fn);

}  // namespace depgauge
