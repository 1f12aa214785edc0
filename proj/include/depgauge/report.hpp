#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "depgauge/analyzer.hpp"
#include "depgauge/ecosystem.hpp"
#include "depgauge/metadata.hpp"
#include "depgauge/vulndb.hpp"

namespace depgauge {

// One row of the per-CVE summary table: {CVE, Avg Depth, Potential Pkgs,
// Required Pkgs, Severity}. Package counts are unique top-level packages;
// avg_depth averages over findings.
struct CveSummaryRow {
    std::string cve_id;
    double avg_depth = 0.0;
    std::size_t potential_pkgs = 0;
    std::size_t required_pkgs = 0;
    Severity severity = Severity::Unknown;
};

struct DepthBucket {
    std::size_t guaranteed = 0;
    std::size_t potential = 0;
};

// Aggregates of one findings file.
struct FindingsReport {
    std::vector<CveSummaryRow> cve_summary;            // sorted by CVE id
    std::map<int, DepthBucket> exposure_by_depth;      // finding depth -> counts
    StreamCounters counters;                           // from the summary record when present
    std::string mode;

    static FindingsReport from_file(const std::string& findings_path, const VulnDb& db);
};

std::string render_cve_summary_tsv(const std::vector<CveSummaryRow>& rows);
std::string render_cve_summary_text(const std::vector<CveSummaryRow>& rows);

// Weighted positions of requested versions of one package, rank-normalized
// over its published releases: (rank-1)/(max_rank-1), a single release
// mapping to 1.0. A request contributes the midpoint rank of its satisfying
// release range; pins contribute their exact rank.
struct DensityPoint {
    double position = 0.0;
    double weight = 0.0;
};

std::vector<DensityPoint> version_density(const std::string& dataset_path,
                                          const PackageMetadata& package);

struct ReportOptions {
    std::string findings_path;
    std::string dataset_path;                 // trees; optional, enables structure stats
    std::string snapshot_path;                // optional, enables version density
    std::string vulndb_path;
    std::string out_dir;
    std::vector<std::string> density_packages;
    std::size_t top_n = 100;
};

// Emits the report bundle (machine-readable TSV/JSON plus aligned text).
// Returns the list of files written.
std::vector<std::string> write_report_bundle(const ReportOptions& options);

}  // namespace depgauge
