#include "depgauge/analyzer.hpp"

#include <algorithm>
#include <condition_variable>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "depgauge/errors.hpp"
#include "depgauge/log.hpp"

namespace depgauge {

using json = nlohmann::json;

std::string_view exposure_kind_text(ExposureKind k) {
    switch (k) {
        case ExposureKind::None: return "none";
        case ExposureKind::Potential: return "potential";
        case ExposureKind::Guaranteed: return "guaranteed";
    }
    return "?";
}

std::string_view constraint_mode_text(ConstraintMode m) {
    return m == ConstraintMode::Direct ? "direct" : "effective";
}

ExposureKind classify(const IntervalSet& s, const IntervalSet& v) {
    if (s.subset_of(v)) return ExposureKind::Guaranteed;
    if (!s.intersect(v).empty()) return ExposureKind::Potential;
    return ExposureKind::None;
}

namespace {

// The traversal frame mirrors the stack-item layout of the matching
// algorithm: the node, the path from the top-level package, and the direct
// constraints imposed by the parent on this node.
struct Frame {
    const DepNode* node;
    std::vector<std::string> path;
};

IntervalSet edge_interval(const DepNode& node, const AnalyzeOptions& options) {
    IntervalSet s = to_interval_set(node.edge_constraints);
    if (options.exclude_prereleases) s = s.without_prerelease_boundaries();
    return s;
}

void classify_node(const DepNode& node, const std::vector<std::string>& path,
                   const std::string& top_level, const VulnDb& db, const AnalyzeOptions& options,
                   AnalyzeDiagnostics* diagnostics, std::vector<ExposureFinding>& out) {
    const std::vector<VulnRecord>* records = db.find(node.name.normalized);
    if (!records) return;
    const std::vector<IntervalSet>* intervals = db.find_intervals(node.name.normalized);

    IntervalSet s = edge_interval(node, options);
    if (s.empty()) {
        if (diagnostics) ++diagnostics->empty_edges;
        return;
    }
    std::string s_rendered = s.str();
    for (std::size_t i = 0; i < records->size(); ++i) {
        IntervalSet v = (*intervals)[i];
        if (options.exclude_prereleases) v = v.without_prerelease_boundaries();
        ExposureKind kind = classify(s, v);
        if (kind == ExposureKind::None) continue;
        ExposureFinding finding;
        finding.top_level = top_level;
        finding.dependency = node.name.normalized;
        finding.cve_id = (*records)[i].cve_id;
        finding.kind = kind;
        finding.mode = options.mode;
        finding.path = path;
        finding.depth = static_cast<int>(path.size()) - 1;
        finding.s_rendered = s_rendered;
        finding.v_rendered = v.str();
        out.push_back(std::move(finding));
    }
}

}  // namespace

std::vector<ExposureFinding> analyze_tree(const DependencyTree& tree, const VulnDb& db,
                                          const AnalyzeOptions& options,
                                          AnalyzeDiagnostics* diagnostics) {
    std::vector<ExposureFinding> findings;
    if (tree.root.status != NodeStatus::Resolved) return findings;
    const std::string& top_level = tree.root.name.normalized;

    if (options.mode == ConstraintMode::Direct) {
        // Explicit-stack DFS; children pushed in reverse so declaration
        // order is preserved in the finding stream.
        std::vector<Frame> stack;
        stack.push_back({&tree.root, {top_level}});
        while (!stack.empty()) {
            Frame frame = std::move(stack.back());
            stack.pop_back();
            if (diagnostics) ++diagnostics->visited_frames;
            const DepNode& node = *frame.node;
            if (node.status != NodeStatus::Resolved) {
                if (diagnostics) ++diagnostics->skipped_nodes;
                continue;
            }
            if (node.depth > 0) {
                classify_node(node, frame.path, top_level, db, options, diagnostics, findings);
            }
            for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) {
                Frame child;
                child.node = &*it;
                child.path = frame.path;
                child.path.push_back(it->name.normalized);
                stack.push_back(std::move(child));
            }
        }
        return findings;
    }

    // Effective mode: one finding per (dependency, CVE) with the
    // constraints intersected over every occurrence; the minimum-depth path
    // is kept as the representative.
    struct Occurrences {
        IntervalSet effective = IntervalSet::full();
        std::vector<std::string> best_path;
        int best_depth = -1;
        bool any = false;
    };
    std::map<std::string, Occurrences> by_name;
    std::vector<Frame> stack;
    stack.push_back({&tree.root, {top_level}});
    while (!stack.empty()) {
        Frame frame = std::move(stack.back());
        stack.pop_back();
        if (diagnostics) ++diagnostics->visited_frames;
        const DepNode& node = *frame.node;
        if (node.depth > 0) {
            Occurrences& occ = by_name[node.name.normalized];
            occ.effective = occ.effective.intersect(to_interval_set(node.edge_constraints));
            occ.any = true;
            bool resolved = node.status == NodeStatus::Resolved;
            bool better = occ.best_depth < 0 || node.depth < occ.best_depth;
            if ((resolved || occ.best_depth < 0) && better) {
                occ.best_depth = node.depth;
                occ.best_path = frame.path;
            }
        }
        if (node.status != NodeStatus::Resolved && diagnostics) ++diagnostics->skipped_nodes;
        for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) {
            Frame child;
            child.node = &*it;
            child.path = frame.path;
            child.path.push_back(it->name.normalized);
            stack.push_back(std::move(child));
        }
    }

    for (const auto& [name, occ] : by_name) {
        const std::vector<VulnRecord>* records = db.find(name);
        if (!records) continue;
        const std::vector<IntervalSet>* intervals = db.find_intervals(name);
        IntervalSet s = occ.effective;
        if (options.exclude_prereleases) s = s.without_prerelease_boundaries();
        if (s.empty()) {
            if (diagnostics) {
                ++diagnostics->empty_edges;
                diagnostics->conflicts.push_back(top_level + " -> " + name +
                                                 ": effective constraints are contradictory");
            }
            continue;
        }
        std::string s_rendered = s.str();
        for (std::size_t i = 0; i < records->size(); ++i) {
            IntervalSet v = (*intervals)[i];
            if (options.exclude_prereleases) v = v.without_prerelease_boundaries();
            ExposureKind kind = classify(s, v);
            if (kind == ExposureKind::None) continue;
            ExposureFinding finding;
            finding.top_level = top_level;
            finding.dependency = name;
            finding.cve_id = (*records)[i].cve_id;
            finding.kind = kind;
            finding.mode = options.mode;
            finding.path = occ.best_path;
            finding.depth = occ.best_depth;
            finding.s_rendered = s_rendered;
            finding.v_rendered = v.str();
            findings.push_back(std::move(finding));
        }
    }
    return findings;
}

std::optional<IntervalSet> effective_constraints(const DependencyTree& tree,
                                                 const std::string& normalized_dependency) {
    bool found = false;
    IntervalSet effective = IntervalSet::full();
    std::vector<const DepNode*> stack{&tree.root};
    while (!stack.empty()) {
        const DepNode* node = stack.back();
        stack.pop_back();
        if (node->depth > 0 && node->name.normalized == normalized_dependency) {
            found = true;
            effective = effective.intersect(to_interval_set(node->edge_constraints));
        }
        for (const DepNode& child : node->children) stack.push_back(&child);
    }
    if (!found) return std::nullopt;
    return effective;
}

std::string finding_to_json(const ExposureFinding& finding) {
    json obj{{"top_level", finding.top_level},
             {"dependency", finding.dependency},
             {"cve", finding.cve_id},
             {"kind", std::string(exposure_kind_text(finding.kind))},
             {"mode", std::string(constraint_mode_text(finding.mode))},
             {"depth", finding.depth},
             {"path", finding.path},
             {"S", finding.s_rendered},
             {"V", finding.v_rendered}};
    return obj.dump();
}

ExposureFinding finding_from_json(const std::string& line) {
    json obj = json::parse(line);
    ExposureFinding finding;
    finding.top_level = obj.at("top_level").get<std::string>();
    finding.dependency = obj.at("dependency").get<std::string>();
    finding.cve_id = obj.at("cve").get<std::string>();
    std::string kind = obj.at("kind").get<std::string>();
    finding.kind = kind == "guaranteed" ? ExposureKind::Guaranteed
                 : kind == "potential"  ? ExposureKind::Potential
                                        : ExposureKind::None;
    finding.mode = obj.value("mode", "direct") == "effective" ? ConstraintMode::Effective
                                                              : ConstraintMode::Direct;
    finding.depth = obj.value("depth", 0);
    if (obj.contains("path")) finding.path = obj.at("path").get<std::vector<std::string>>();
    finding.s_rendered = obj.value("S", "");
    finding.v_rendered = obj.value("V", "");
    return finding;
}

std::string counters_to_json(const StreamCounters& c) {
    json obj{{"schema", kFindingsSummarySchema},
             {"trees", c.trees},
             {"corrupt_records", c.corrupt_records},
             {"findings", json{{"guaranteed", c.findings_guaranteed},
                               {"potential", c.findings_potential}}},
             {"packages",
              json{{"guaranteed_any", c.packages_guaranteed_any},
                   {"potential_any", c.packages_potential_any},
                   {"guaranteed_disjoint", c.packages_guaranteed_disjoint},
                   {"potential_disjoint", c.packages_potential_disjoint}}}};
    return obj.dump();
}

void accumulate(StreamCounters& counters, const std::vector<ExposureFinding>& findings) {
    ++counters.trees;
    bool any_guaranteed = false;
    bool any_potential = false;
    for (const ExposureFinding& f : findings) {
        if (f.kind == ExposureKind::Guaranteed) {
            ++counters.findings_guaranteed;
            any_guaranteed = true;
        } else if (f.kind == ExposureKind::Potential) {
            ++counters.findings_potential;
            any_potential = true;
        }
    }
    if (any_guaranteed) ++counters.packages_guaranteed_any;
    if (any_potential) ++counters.packages_potential_any;
    if (any_guaranteed) {
        ++counters.packages_guaranteed_disjoint;
    } else if (any_potential) {
        ++counters.packages_potential_disjoint;
    }
}

StreamCounters stream_analyze(const std::string& dataset_path, const VulnDb& db,
                              const std::string& findings_path, const AnalyzeOptions& options,
                              int workers) {
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

    std::ofstream out(findings_path, std::ios::trunc);
    if (!out) throw IoError("cannot open findings file: " + findings_path);
    out << json{{"schema", kFindingsSchema},
                {"mode", std::string(constraint_mode_text(options.mode))}}
               .dump()
        << "\n";

    StreamCounters counters;

    auto emit = [&](const std::vector<ExposureFinding>& findings) {
        for (const ExposureFinding& f : findings) out << finding_to_json(f) << "\n";
        accumulate(counters, findings);
    };

    workers = std::max(1, workers);
    if (workers == 1) {
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            try {
                DependencyTree tree = tree_from_json(line);
                emit(analyze_tree(tree, db, options));
            } catch (const std::exception& e) {
                ++counters.corrupt_records;
                log::warn(std::string("skipping corrupt tree record: ") + e.what());
            }
        }
        out.flush();
        return counters;
    }

    // Parallel analysis with an input-ordered writer. The window keeps at
    // most `workers` lines plus their findings in flight, so memory stays
    // bounded by a fixed multiple of the largest record.
    std::mutex mutex;
    std::condition_variable can_read;
    std::condition_variable can_write;
    std::map<std::size_t, std::pair<bool, std::vector<ExposureFinding>>> done;  // seq -> (corrupt, findings)
    std::size_t next_seq = 0;
    std::size_t next_write = 0;
    bool input_exhausted = false;
    std::size_t window = static_cast<std::size_t>(workers) * 4;

    auto worker_fn = [&]() {
        while (true) {
            std::string work_line;
            std::size_t seq;
            {
                std::unique_lock<std::mutex> lock(mutex);
                can_read.wait(lock, [&] {
                    return input_exhausted || next_seq - next_write < window;
                });
                if (input_exhausted) return;
                // Skip blank lines without assigning them a sequence slot.
                bool got = false;
                while (std::getline(in, work_line)) {
                    if (!work_line.empty()) {
                        got = true;
                        break;
                    }
                }
                if (!got) {
                    input_exhausted = true;
                    can_read.notify_all();
                    can_write.notify_all();
                    return;
                }
                seq = next_seq++;
            }
            bool corrupt = false;
            std::vector<ExposureFinding> findings;
            if (!work_line.empty()) {
                try {
                    DependencyTree tree = tree_from_json(work_line);
                    findings = analyze_tree(tree, db, options);
                } catch (const std::exception& e) {
                    corrupt = true;
                    log::warn(std::string("skipping corrupt tree record: ") + e.what());
                }
            }
            {
                std::lock_guard<std::mutex> lock(mutex);
                done[seq] = {corrupt, std::move(findings)};
            }
            can_write.notify_one();
        }
    };

    std::vector<std::thread> threads;
    for (int i = 0; i < workers; ++i) threads.emplace_back(worker_fn);

    {
        std::unique_lock<std::mutex> lock(mutex);
        while (true) {
            can_write.wait(lock, [&] {
                return done.count(next_write) > 0 || (input_exhausted && next_write >= next_seq);
            });
            if (done.count(next_write) == 0) break;
            auto [corrupt, findings] = std::move(done[next_write]);
            done.erase(next_write);
            ++next_write;
            lock.unlock();
            if (corrupt) {
                ++counters.corrupt_records;
            } else {
                emit(findings);
            }
            lock.lock();
            can_read.notify_all();
        }
    }
    for (auto& t : threads) t.join();
    out.flush();
    return counters;
}

}  // namespace depgauge
