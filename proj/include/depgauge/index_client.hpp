#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "depgauge/metadata.hpp"
#include "depgauge/names.hpp"

namespace depgauge {

// Global request pacing shared by all fetch workers. max_per_second <= 0
// disables the cap.
class RateLimiter {
public:
    explicit RateLimiter(double max_per_second);
    void acquire();

private:
    std::chrono::nanoseconds min_interval_{0};
    std::chrono::steady_clock::time_point next_slot_;
    std::mutex mutex_;
};

struct IndexClientOptions {
    int retries = 3;
    std::chrono::milliseconds initial_backoff{1000};
    double max_requests_per_second = 0.0;  // unlimited
};

// Client for a PEP 503 simple index plus the per-version JSON metadata
// endpoint (PyPI layout):
//   GET {base}/simple/                  -> anchor list of project names
//   GET {base}/pypi/{name}/json         -> release list with yanked flags
//   GET {base}/pypi/{name}/{ver}/json   -> requires_dist / requires_python
class IndexClient : public MetadataSource {
public:
    explicit IndexClient(const std::string& base_url, IndexClientOptions options = {});
    ~IndexClient() override;

    // All anchor names from the simple index, normalized and deduplicated.
    // Throws NetworkError (after retries) or IndexFormatError.
    std::vector<PackageName> fetch_package_list();

    // Throws NotFoundError for absent/tombstoned packages.
    PackageMetadata fetch(const PackageName& name) override;

private:
    std::string get_body(const std::string& path);

    struct Impl;
    std::unique_ptr<Impl> impl_;
    IndexClientOptions options_;
    RateLimiter limiter_;
};

// Extracts anchor texts from a simple-index HTML page. Exposed for tests.
std::vector<std::string> extract_index_anchors(const std::string& html);

}  // namespace depgauge
