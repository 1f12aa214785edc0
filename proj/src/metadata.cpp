#include "depgauge/metadata.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "depgauge/errors.hpp"
#include "depgauge/log.hpp"

namespace depgauge {

using json = nlohmann::json;

void PackageMetadata::sort_releases() {
    std::sort(releases.begin(), releases.end(),
              [](const ReleaseMetadata& a, const ReleaseMetadata& b) {
                  return compare_versions(a.version, b.version) < 0;
              });
}

std::vector<Version> PackageMetadata::release_versions() const {
    std::vector<Version> out;
    out.reserve(releases.size());
    for (const auto& r : releases) out.push_back(r.version);
    return out;
}

const ReleaseMetadata* PackageMetadata::find_release(const Version& v) const {
    for (const auto& r : releases) {
        if (compare_versions(r.version, v) == 0) return &r;
    }
    return nullptr;
}

std::string package_record_to_json(const PackageMetadata& package) {
    json releases = json::array();
    for (const auto& r : package.releases) {
        json rec{{"version", r.version.original_text.empty() ? r.version.canonical()
                                                             : r.version.original_text},
                 {"yanked", r.yanked},
                 {"requires", r.requires_dist}};
        if (r.requires_python) rec["requires_python"] = *r.requires_python;
        releases.push_back(std::move(rec));
    }
    json record{{"name", package.name.normalized}, {"releases", std::move(releases)}};
    return record.dump();
}

PackageMetadata package_record_from_json(const std::string& line) {
    json record = json::parse(line);
    PackageMetadata package;
    package.name = PackageName(record.at("name").get<std::string>());
    for (const auto& rec : record.at("releases")) {
        ReleaseMetadata release;
        release.version = Version::parse(rec.at("version").get<std::string>());
        release.yanked = rec.value("yanked", false);
        if (rec.contains("requires")) {
            release.requires_dist = rec.at("requires").get<std::vector<std::string>>();
        }
        if (rec.contains("requires_python") && rec.at("requires_python").is_string()) {
            release.requires_python = rec.at("requires_python").get<std::string>();
        }
        package.releases.push_back(std::move(release));
    }
    package.sort_releases();
    return package;
}

SnapshotWriter::SnapshotWriter(const std::string& path, const std::string& source_id)
    : out_(path, std::ios::trunc) {
    if (!out_) throw IoError("cannot open snapshot for writing: " + path);
    json header{{"schema", kSnapshotSchema},
                {"source", source_id},
                {"created_at", static_cast<long long>(::time(nullptr))}};
    out_ << header.dump() << "\n";
}

void SnapshotWriter::write(const PackageMetadata& package) {
    out_ << package_record_to_json(package) << "\n";
    out_.flush();
    ++written_;
}

void SnapshotWriter::flush() { out_.flush(); }

SnapshotReader::SnapshotReader(const std::string& path) : in_(path), path_(path) {
    if (!in_) throw IoError("cannot open snapshot: " + path);
    std::string header_line;
    if (!std::getline(in_, header_line)) throw IoError("snapshot is empty: " + path);
    ++line_no_;
    try {
        json header = json::parse(header_line);
        std::string schema = header.value("schema", "");
        if (schema != kSnapshotSchema) throw SchemaMismatchError(kSnapshotSchema, schema);
        source_id_ = header.value("source", "");
    } catch (const json::exception&) {
        throw SchemaMismatchError(kSnapshotSchema, "unparseable header");
    }
}

std::optional<PackageMetadata> SnapshotReader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_no_;
        if (line.empty()) continue;
        try {
            return package_record_from_json(line);
        } catch (const std::exception& e) {
            ++corrupt_;
            log::warn("skipping corrupt snapshot record at " + path_ + ":" +
                      std::to_string(line_no_) + " (" + e.what() + ")");
        }
    }
    return std::nullopt;
}

SnapshotIndex SnapshotIndex::load(const std::string& path) {
    SnapshotIndex index;
    SnapshotReader reader(path);
    while (auto package = reader.next()) {
        index.insert(std::move(*package));
    }
    index.corrupt_ = reader.corrupt_records();
    return index;
}

PackageMetadata SnapshotIndex::fetch(const PackageName& name) {
    auto it = packages_.find(name.normalized);
    if (it == packages_.end()) throw NotFoundError(name.normalized);
    return it->second;
}

void SnapshotIndex::insert(PackageMetadata package) {
    packages_[package.name.normalized] = std::move(package);
}

std::vector<PackageName> SnapshotIndex::package_names() const {
    std::vector<PackageName> names;
    names.reserve(packages_.size());
    for (const auto& [key, value] : packages_) names.push_back(value.name);
    return names;
}

}  // namespace depgauge
