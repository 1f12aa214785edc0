#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "depgauge/names.hpp"
#include "depgauge/version.hpp"

namespace depgauge {

// Declared metadata of one published release. Requirement lines are kept as
// written; parsing happens at resolution time so malformed lines can be
// handled per the run's leniency policy.
struct ReleaseMetadata {
    Version version;
    bool yanked = false;
    std::vector<std::string> requires_dist;
    std::optional<std::string> requires_python;
};

struct PackageMetadata {
    PackageName name;
    std::vector<ReleaseMetadata> releases;  // sorted ascending by version

    void sort_releases();
    std::vector<Version> release_versions() const;
    const ReleaseMetadata* find_release(const Version& v) const;
};

// Anything that can produce package metadata by name: a live index client
// or a loaded snapshot. Throws NotFoundError / NetworkError.
class MetadataSource {
public:
    virtual ~MetadataSource() = default;
    virtual PackageMetadata fetch(const PackageName& name) = 0;
};

inline constexpr const char* kSnapshotSchema = "depgauge-snapshot/1";

// Snapshot files are newline-delimited: a header object carrying the schema
// tag, source identifier and creation time, then one package record per
// line: {"name": ..., "releases": [{"version", "yanked", "requires",
// "requires_python"?}]}.
class SnapshotWriter {
public:
    SnapshotWriter(const std::string& path, const std::string& source_id);
    void write(const PackageMetadata& package);
    void flush();
    std::size_t written() const { return written_; }

private:
    std::ofstream out_;
    std::size_t written_ = 0;
};

// Incremental reader: one record at a time, bounded memory. Corrupt lines
// are skipped with a warning and counted.
class SnapshotReader {
public:
    explicit SnapshotReader(const std::string& path);

    std::optional<PackageMetadata> next();
    std::size_t corrupt_records() const { return corrupt_; }
    const std::string& source_id() const { return source_id_; }

private:
    std::ifstream in_;
    std::string path_;
    std::string source_id_;
    std::size_t corrupt_ = 0;
    std::size_t line_no_ = 0;
};

// Serialization helpers shared by the snapshot reader/writer and tests.
std::string package_record_to_json(const PackageMetadata& package);
PackageMetadata package_record_from_json(const std::string& line);

// A whole snapshot held in memory, keyed by normalized name; the resolver's
// usual MetadataSource.
class SnapshotIndex : public MetadataSource {
public:
    static SnapshotIndex load(const std::string& path);

    PackageMetadata fetch(const PackageName& name) override;
    void insert(PackageMetadata package);
    std::vector<PackageName> package_names() const;  // sorted
    std::size_t size() const { return packages_.size(); }
    std::size_t corrupt_records() const { return corrupt_; }

private:
    std::map<std::string, PackageMetadata> packages_;
    std::size_t corrupt_ = 0;
};

}  // namespace depgauge
