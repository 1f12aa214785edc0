#include "depgauge/ecosystem.hpp"

#include <algorithm>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <queue>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "depgauge/errors.hpp"
#include "depgauge/log.hpp"

namespace depgauge {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::pair<std::size_t, std::size_t> shard_bounds(std::size_t total, const ShardSpec& spec) {
    std::size_t n = static_cast<std::size_t>(std::max(spec.count, 1));
    std::size_t i = static_cast<std::size_t>(std::clamp(spec.index, 0, std::max(spec.count - 1, 0)));
    return {total * i / n, total * (i + 1) / n};
}

namespace {

std::set<std::string> read_progress(const std::string& path) {
    std::set<std::string> done;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) done.insert(line);
    }
    return done;
}

std::string root_name_of_line(const std::string& line) {
    try {
        json obj = json::parse(line);
        return obj.value("name", "");
    } catch (const json::exception&) {
        return "";
    }
}

// Drops output records that have no progress entry (a crash can leave the
// last record written but unlogged) and any partial trailing line, keeping
// the first occurrence per name. Returns the set of names actually present.
std::set<std::string> reconcile_output(const std::string& out_path,
                                       const std::set<std::string>& progressed) {
    std::set<std::string> kept;
    if (!fs::exists(out_path)) return kept;

    std::ifstream in(out_path, std::ios::binary);
    std::string tmp_path = out_path + ".reconcile";
    std::ofstream out(tmp_path, std::ios::trunc | std::ios::binary);
    if (!in || !out) throw IoError("cannot reconcile " + out_path);

    std::uintmax_t file_size = fs::file_size(out_path);
    std::uintmax_t consumed = 0;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        consumed += line.size() + 1;
        if (consumed > file_size) break;  // partial trailing line (no newline): drop
        if (line.empty()) continue;
        if (first) {
            first = false;
            out << line << "\n";  // schema header
            continue;
        }
        std::string name = root_name_of_line(line);
        if (name.empty() || !progressed.count(name) || kept.count(name)) continue;
        kept.insert(name);
        out << line << "\n";
    }
    out.flush();
    in.close();
    out.close();
    fs::rename(tmp_path, out_path);
    return kept;
}

}  // namespace

EcosystemRunResult ecosystem_resolve(const std::vector<PackageName>& names,
                                     MetadataSource& source, const std::string& out_path,
                                     const std::string& progress_path,
                                     const EcosystemRunOptions& options) {
    auto [begin, end] = shard_bounds(names.size(), options.shard);
    std::vector<PackageName> shard(names.begin() + begin, names.begin() + end);

    std::set<std::string> progressed = read_progress(progress_path);
    std::set<std::string> present;
    bool fresh = !fs::exists(out_path);
    if (!fresh) present = reconcile_output(out_path, progressed);

    std::ofstream out(out_path, fresh ? std::ios::trunc : std::ios::app);
    if (!out) throw IoError("cannot open dataset for writing: " + out_path);
    if (fresh) {
        out << json{{"schema", kTreesSchema}}.dump() << "\n";
        out.flush();
    }
    std::ofstream progress(progress_path, std::ios::app);
    if (!progress) throw IoError("cannot open progress file: " + progress_path);

    struct Task {
        std::size_t seq;
        PackageName name;
    };
    std::vector<Task> pending;
    EcosystemRunResult result;
    for (const PackageName& name : shard) {
        if (present.count(name.normalized)) {
            ++result.skipped;
            continue;
        }
        pending.push_back({pending.size(), name});
    }

    if (pending.empty()) return result;

    std::mutex mutex;
    std::condition_variable ready_cv;
    std::map<std::size_t, std::string> finished;  // seq -> serialized line
    std::map<std::size_t, std::string> finished_names;
    std::size_t next_task = 0;
    std::size_t next_write = 0;

    int worker_count = std::max(1, options.workers);
    worker_count = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(worker_count), pending.size()));

    auto worker = [&]() {
        while (true) {
            std::size_t idx;
            {
                std::lock_guard<std::mutex> lock(mutex);
                if (next_task >= pending.size()) return;
                idx = next_task++;
            }
            const Task& task = pending[idx];
            if (options.sleep_per_package.count() > 0)
                std::this_thread::sleep_for(options.sleep_per_package);
            std::string line;
            try {
                DependencyTree tree =
                    resolve_tree(task.name, source, options.limits, options.resolve);
                line = tree_to_json(tree);
            } catch (const std::exception& e) {
                // Per-package errors never abort the stream.
                log::warn("resolution failed for " + task.name.normalized + ": " + e.what());
                DependencyTree failed;
                failed.root.name = task.name;
                failed.root.status = NodeStatus::Unresolvable;
                failed.root.reason = FailReason::Network;
                line = tree_to_json(failed);
            }
            {
                std::lock_guard<std::mutex> lock(mutex);
                finished[task.seq] = std::move(line);
                finished_names[task.seq] = task.name.normalized;
            }
            ready_cv.notify_one();
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(worker_count));
    for (int i = 0; i < worker_count; ++i) threads.emplace_back(worker);

    // Single ordered writer: emit in input order, flush the record before
    // logging its name so a crash never logs an unwritten record.
    {
        std::unique_lock<std::mutex> lock(mutex);
        while (next_write < pending.size()) {
            ready_cv.wait(lock, [&] { return finished.count(next_write) > 0; });
            std::string line = std::move(finished[next_write]);
            std::string name = std::move(finished_names[next_write]);
            finished.erase(next_write);
            finished_names.erase(next_write);
            lock.unlock();
            out << line << "\n";
            out.flush();
            progress << name << "\n";
            progress.flush();
            ++result.resolved;
            lock.lock();
            ++next_write;
        }
    }

    for (auto& t : threads) t.join();
    return result;
}

void EcosystemStats::add_tree(const DependencyTree& tree) {
    ++tree_count;
    ++direct_histogram[tree.direct_count];
    ++depth_histogram[tree.max_depth];
    total_nodes += tree.node_count;
    for (const CycleRecord& cycle : tree.cycles) {
        ++circular_depth_histogram[cycle.detection_depth];
        ++total_cycles;
    }
    // Occurrences count every non-root node except circular markers, which
    // are tallied separately above.
    std::vector<const DepNode*> stack{&tree.root};
    while (!stack.empty()) {
        const DepNode* node = stack.back();
        stack.pop_back();
        if (node->depth > 0 && node->status != NodeStatus::Circular) {
            ++occurrences[node->name.normalized];
        }
        for (const DepNode& child : node->children) stack.push_back(&child);
    }
}

double EcosystemStats::mean_direct() const {
    if (tree_count == 0) return 0.0;
    double sum = 0;
    for (const auto& [k, v] : direct_histogram) sum += static_cast<double>(k) * static_cast<double>(v);
    return sum / static_cast<double>(tree_count);
}

double EcosystemStats::mean_depth() const {
    if (tree_count == 0) return 0.0;
    double sum = 0;
    for (const auto& [k, v] : depth_histogram) sum += static_cast<double>(k) * static_cast<double>(v);
    return sum / static_cast<double>(tree_count);
}

double EcosystemStats::mean_circular_depth() const {
    if (total_cycles == 0) return 0.0;
    double sum = 0;
    for (const auto& [k, v] : circular_depth_histogram)
        sum += static_cast<double>(k) * static_cast<double>(v);
    return sum / static_cast<double>(total_cycles);
}

std::vector<std::pair<std::string, std::size_t>> EcosystemStats::top_occurrences(
    std::size_t n) const {
    std::vector<std::pair<std::string, std::size_t>> ranked(occurrences.begin(), occurrences.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > n) ranked.resize(n);
    return ranked;
}

EcosystemStats ecosystem_stats(const std::vector<DependencyTree>& trees) {
    EcosystemStats stats;
    for (const DependencyTree& tree : trees) stats.add_tree(tree);
    return stats;
}

std::size_t for_each_tree(const std::string& dataset_path,
                          const std::function<void(DependencyTree&&)>& fn) {
    std::ifstream in(dataset_path);
    if (!in) throw MissingInputError(dataset_path);
    std::string line;
    if (!std::getline(in, line)) throw SchemaMismatchError(kTreesSchema, "empty file");
    std::string schema;
    try {
        schema = json::parse(line).value("schema", "");
    } catch (const json::exception&) {
        schema = "unparseable header";
    }
    if (schema != kTreesSchema) throw SchemaMismatchError(kTreesSchema, schema);

    std::size_t corrupt = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            fn(tree_from_json(line));
        } catch (const std::exception& e) {
            ++corrupt;
            log::warn("skipping corrupt tree record at " + dataset_path + ":" +
                      std::to_string(line_no) + " (" + e.what() + ")");
        }
    }
    return corrupt;
}

}  // namespace depgauge
