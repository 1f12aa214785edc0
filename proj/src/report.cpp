#include "depgauge/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "depgauge/errors.hpp"
#include "depgauge/log.hpp"

namespace depgauge {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string format_double(double value, int decimals = 2) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(decimals);
    out << value;
    return out.str();
}

struct CveAccumulator {
    std::set<std::string> potential_pkgs;
    std::set<std::string> required_pkgs;
    double depth_sum = 0.0;
    std::size_t finding_count = 0;
};

}  // namespace

FindingsReport FindingsReport::from_file(const std::string& findings_path, const VulnDb& db) {
    std::ifstream in(findings_path);
    if (!in) throw MissingInputError(findings_path);
    std::string line;
    if (!std::getline(in, line)) throw SchemaMismatchError(kFindingsSchema, "empty file");
    FindingsReport report;
    try {
        json header = json::parse(line);
        std::string schema = header.value("schema", "");
        if (schema != kFindingsSchema) throw SchemaMismatchError(kFindingsSchema, schema);
        report.mode = header.value("mode", "direct");
    } catch (const json::exception&) {
        throw SchemaMismatchError(kFindingsSchema, "unparseable header");
    }

    std::map<std::string, CveAccumulator> by_cve;
    bool have_summary = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception&) {
            log::warn("skipping unparseable findings line");
            continue;
        }
        if (obj.value("schema", "") == kFindingsSummarySchema) {
            report.counters.trees = obj.value("trees", 0u);
            report.counters.corrupt_records = obj.value("corrupt_records", 0u);
            const json& f = obj.value("findings", json::object());
            report.counters.findings_guaranteed = f.value("guaranteed", 0u);
            report.counters.findings_potential = f.value("potential", 0u);
            const json& p = obj.value("packages", json::object());
            report.counters.packages_guaranteed_any = p.value("guaranteed_any", 0u);
            report.counters.packages_potential_any = p.value("potential_any", 0u);
            report.counters.packages_guaranteed_disjoint = p.value("guaranteed_disjoint", 0u);
            report.counters.packages_potential_disjoint = p.value("potential_disjoint", 0u);
            have_summary = true;
            continue;
        }
        ExposureFinding finding = finding_from_json(line);
        CveAccumulator& acc = by_cve[finding.cve_id];
        acc.depth_sum += finding.depth;
        ++acc.finding_count;
        if (finding.kind == ExposureKind::Guaranteed) {
            acc.required_pkgs.insert(finding.top_level);
        } else if (finding.kind == ExposureKind::Potential) {
            acc.potential_pkgs.insert(finding.top_level);
        }
        DepthBucket& bucket = report.exposure_by_depth[finding.depth];
        if (finding.kind == ExposureKind::Guaranteed) ++bucket.guaranteed;
        if (finding.kind == ExposureKind::Potential) ++bucket.potential;
    }
    if (!have_summary) log::warn("findings file has no summary record: " + findings_path);

    // Severity lookup across the whole database (a CVE id appears once per
    // package in this artifact's model).
    std::map<std::string, Severity> severity_by_cve;
    for (const std::string& package : db.package_names()) {
        for (const VulnRecord& record : *db.find(package)) {
            severity_by_cve[record.cve_id] = record.severity;
        }
    }

    for (const auto& [cve_id, acc] : by_cve) {
        CveSummaryRow row;
        row.cve_id = cve_id;
        row.avg_depth = acc.finding_count == 0 ? 0.0 : acc.depth_sum / acc.finding_count;
        row.potential_pkgs = acc.potential_pkgs.size();
        row.required_pkgs = acc.required_pkgs.size();
        auto it = severity_by_cve.find(cve_id);
        row.severity = it == severity_by_cve.end() ? Severity::Unknown : it->second;
        report.cve_summary.push_back(std::move(row));
    }
    // Rows for database CVEs with zero findings keep the table complete.
    for (const auto& [cve_id, severity] : severity_by_cve) {
        if (!by_cve.count(cve_id)) {
            CveSummaryRow row;
            row.cve_id = cve_id;
            row.severity = severity;
            report.cve_summary.push_back(std::move(row));
        }
    }
    std::sort(report.cve_summary.begin(), report.cve_summary.end(),
              [](const CveSummaryRow& a, const CveSummaryRow& b) { return a.cve_id < b.cve_id; });
    return report;
}

std::string render_cve_summary_tsv(const std::vector<CveSummaryRow>& rows) {
    std::string out = "# schema: depgauge-report-cve-summary/1\n";
    out += "cve\tavg_depth\tpotential_pkgs\trequired_pkgs\tseverity\n";
    for (const CveSummaryRow& row : rows) {
        out += row.cve_id + "\t" + format_double(row.avg_depth, 1) + "\t" +
               std::to_string(row.potential_pkgs) + "\t" + std::to_string(row.required_pkgs) +
               "\t" + std::string(severity_text(row.severity)) + "\n";
    }
    return out;
}

std::string render_cve_summary_text(const std::vector<CveSummaryRow>& rows) {
    static constexpr const char* kHeaders[5] = {"CVE", "Avg Depth", "Potential Pkgs",
                                                "Required Pkgs", "Severity"};
    std::vector<std::array<std::string, 5>> cells;
    for (const CveSummaryRow& row : rows) {
        cells.push_back({row.cve_id, format_double(row.avg_depth, 1),
                         std::to_string(row.potential_pkgs), std::to_string(row.required_pkgs),
                         std::string(severity_text(row.severity))});
    }
    std::array<std::size_t, 5> width{};
    for (std::size_t c = 0; c < 5; ++c) width[c] = std::string(kHeaders[c]).size();
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < 5; ++c) width[c] = std::max(width[c], row[c].size());
    }
    auto pad = [](const std::string& s, std::size_t w) {
        return s + std::string(w - s.size(), ' ');
    };
    std::string out;
    for (std::size_t c = 0; c < 5; ++c) {
        out += pad(kHeaders[c], width[c]);
        out += c + 1 < 5 ? "  " : "\n";
    }
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < 5; ++c) {
            out += pad(row[c], width[c]);
            out += c + 1 < 5 ? "  " : "\n";
        }
    }
    return out;
}

std::vector<DensityPoint> version_density(const std::string& dataset_path,
                                          const PackageMetadata& package) {
    std::vector<Version> releases = package.release_versions();
    if (releases.empty()) throw PackageAbsentError(package.name.normalized);
    const std::string& wanted = package.name.normalized;

    std::map<long long, double> weight_by_millirank;  // discretized position -> weight
    bool seen = false;
    for_each_tree(dataset_path, [&](DependencyTree&& tree) {
        std::vector<const DepNode*> stack{&tree.root};
        while (!stack.empty()) {
            const DepNode* node = stack.back();
            stack.pop_back();
            for (const DepNode& child : node->children) stack.push_back(&child);
            if (node->depth == 0 || node->name.normalized != wanted) continue;
            if (node->status == NodeStatus::Circular) continue;
            IntervalSet s = to_interval_set(node->edge_constraints);
            std::vector<Version> satisfying = s.restrict_to_releases(releases);
            if (satisfying.empty()) continue;
            seen = true;
            // Midpoint rank of the satisfying range (1-based ranks).
            auto rank_of = [&](const Version& v) {
                auto it = std::lower_bound(releases.begin(), releases.end(), v,
                                           [](const Version& a, const Version& b) {
                                               return compare_versions(a, b) < 0;
                                           });
                return static_cast<double>(it - releases.begin()) + 1.0;
            };
            double mid_rank = (rank_of(satisfying.front()) + rank_of(satisfying.back())) / 2.0;
            double position = releases.size() == 1
                                  ? 1.0
                                  : (mid_rank - 1.0) / (static_cast<double>(releases.size()) - 1.0);
            weight_by_millirank[std::llround(position * 1e6)] += 1.0;
        }
    });
    if (!seen) throw PackageAbsentError(wanted);

    std::vector<DensityPoint> points;
    points.reserve(weight_by_millirank.size());
    for (const auto& [millirank, weight] : weight_by_millirank) {
        points.push_back({static_cast<double>(millirank) / 1e6, weight});
    }
    return points;
}

namespace {

void write_file(const std::string& path, const std::string& content,
                std::vector<std::string>& written) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write report file: " + path);
    out << content;
    written.push_back(path);
}

std::string render_histogram_tsv(const std::string& schema, const std::string& key_name,
                                 const std::map<int, std::size_t>& hist) {
    std::string out = "# schema: " + schema + "\n" + key_name + "\tcount\n";
    for (const auto& [k, v] : hist) out += std::to_string(k) + "\t" + std::to_string(v) + "\n";
    return out;
}

}  // namespace

std::vector<std::string> write_report_bundle(const ReportOptions& options) {
    std::vector<std::string> written;
    fs::create_directories(options.out_dir);
    auto out_path = [&](const std::string& name) {
        return (fs::path(options.out_dir) / name).string();
    };

    VulnDb db = VulnDb::load(options.vulndb_path);
    FindingsReport findings = FindingsReport::from_file(options.findings_path, db);

    write_file(out_path("cve_summary.tsv"), render_cve_summary_tsv(findings.cve_summary), written);
    write_file(out_path("cve_summary.txt"), render_cve_summary_text(findings.cve_summary), written);

    {
        std::string out = "# schema: depgauge-report-exposure-by-depth/1\n";
        out += "depth\tguaranteed\tpotential\n";
        for (const auto& [depth, bucket] : findings.exposure_by_depth) {
            out += std::to_string(depth) + "\t" + std::to_string(bucket.guaranteed) + "\t" +
                   std::to_string(bucket.potential) + "\n";
        }
        write_file(out_path("exposure_by_depth.tsv"), out, written);
    }

    std::optional<EcosystemStats> stats;
    if (!options.dataset_path.empty()) {
        stats.emplace();
        for_each_tree(options.dataset_path,
                      [&](DependencyTree&& tree) { stats->add_tree(tree); });

        {
            std::map<int, std::size_t> direct;
            for (const auto& [k, v] : stats->direct_histogram) direct[static_cast<int>(k)] = v;
            write_file(out_path("direct_deps_hist.tsv"),
                       render_histogram_tsv("depgauge-report-direct-deps/1", "direct_deps", direct),
                       written);
        }
        write_file(out_path("depth_hist.tsv"),
                   render_histogram_tsv("depgauge-report-depth/1", "depth", stats->depth_histogram),
                   written);
        write_file(
            out_path("circular_depth_hist.tsv"),
            render_histogram_tsv("depgauge-report-circular-depth/1", "detection_depth",
                                 stats->circular_depth_histogram),
            written);
        {
            std::string out = "# schema: depgauge-report-occurrences/1\nrank\tpackage\tcount\n";
            std::size_t rank = 1;
            for (const auto& [name, count] : stats->top_occurrences(options.top_n)) {
                out += std::to_string(rank++) + "\t" + name + "\t" + std::to_string(count) + "\n";
            }
            write_file(out_path("occurrences_top.tsv"), out, written);
        }
    }

    if (!options.snapshot_path.empty() && !options.density_packages.empty()) {
        SnapshotIndex snapshot = SnapshotIndex::load(options.snapshot_path);
        for (const std::string& package_name : options.density_packages) {
            PackageName name(package_name);
            PackageMetadata package = snapshot.fetch(name);
            std::vector<DensityPoint> density = version_density(options.dataset_path, package);
            std::string out = "# schema: depgauge-report-version-density/1\nposition\tweight\n";
            for (const DensityPoint& p : density) {
                out += format_double(p.position, 6) + "\t" + format_double(p.weight, 1) + "\n";
            }
            write_file(out_path("density_" + name.normalized + ".tsv"), out, written);
        }
    }

    // Aligned-text overview.
    {
        std::string out = "depgauge report (mode: " + findings.mode + ")\n\n";
        out += "findings: " + std::to_string(findings.counters.findings_guaranteed) +
               " guaranteed, " + std::to_string(findings.counters.findings_potential) +
               " potential (over " + std::to_string(findings.counters.trees) + " trees)\n";
        out += "packages with >=1 guaranteed finding: " +
               std::to_string(findings.counters.packages_guaranteed_any) + " (disjoint: " +
               std::to_string(findings.counters.packages_guaranteed_disjoint) + ")\n";
        out += "packages with >=1 potential finding:  " +
               std::to_string(findings.counters.packages_potential_any) + " (disjoint: " +
               std::to_string(findings.counters.packages_potential_disjoint) + ")\n";
        if (stats) {
            out += "\ntrees: " + std::to_string(stats->tree_count) +
                   ", nodes: " + std::to_string(stats->total_nodes) +
                   ", unique packages: " + std::to_string(stats->unique_packages()) + "\n";
            out += "mean direct dependencies: " + format_double(stats->mean_direct()) + "\n";
            out += "mean depth: " + format_double(stats->mean_depth()) + "\n";
            out += "cycles: " + std::to_string(stats->total_cycles) +
                   " (mean detection depth: " + format_double(stats->mean_circular_depth()) + ")\n";
        }
        out += "\n" + render_cve_summary_text(findings.cve_summary);
        write_file(out_path("summary.txt"), out, written);
    }

    return written;
}

}  // namespace depgauge
