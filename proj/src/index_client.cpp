#include "depgauge/index_client.hpp"

#include <cctype>
#include <set>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "depgauge/errors.hpp"
#include "depgauge/log.hpp"

namespace depgauge {

using json = nlohmann::json;

RateLimiter::RateLimiter(double max_per_second) {
    if (max_per_second > 0) {
        min_interval_ = std::chrono::nanoseconds(
            static_cast<long long>(1e9 / max_per_second));
    }
    next_slot_ = std::chrono::steady_clock::now();
}

void RateLimiter::acquire() {
    if (min_interval_.count() == 0) return;
    std::chrono::steady_clock::time_point wait_until;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto now = std::chrono::steady_clock::now();
        if (next_slot_ < now) next_slot_ = now;
        wait_until = next_slot_;
        next_slot_ += min_interval_;
    }
    std::this_thread::sleep_until(wait_until);
}

struct IndexClient::Impl {
    httplib::Client client;
    explicit Impl(const std::string& base_url) : client(base_url) {
        client.set_connection_timeout(10);
        client.set_read_timeout(60);
        client.set_follow_location(true);
    }
};

IndexClient::IndexClient(const std::string& base_url, IndexClientOptions options)
    : impl_(std::make_unique<Impl>(base_url)),
      options_(options),
      limiter_(options.max_requests_per_second) {}

IndexClient::~IndexClient() = default;

std::string IndexClient::get_body(const std::string& path) {
    std::string last_error;
    for (int attempt = 0; attempt <= options_.retries; ++attempt) {
        if (attempt > 0) {
            auto backoff = options_.initial_backoff * (1 << (attempt - 1));
            log::warn("retrying " + path + " in " + std::to_string(backoff.count()) + "ms (" +
                      last_error + ")");
            std::this_thread::sleep_for(backoff);
        }
        limiter_.acquire();
        auto res = impl_->client.Get(path);
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status == 404) throw NotFoundError(path);
        if (res->status >= 200 && res->status < 300) return res->body;
        last_error = "HTTP " + std::to_string(res->status);
        if (res->status >= 400 && res->status < 500) break;  // not retryable
    }
    throw NetworkError(path + ": " + last_error);
}

std::vector<std::string> extract_index_anchors(const std::string& html) {
    std::vector<std::string> anchors;
    std::size_t pos = 0;
    while (true) {
        std::size_t open = html.find("<a", pos);
        if (open == std::string::npos) break;
        char next = open + 2 < html.size() ? html[open + 2] : '\0';
        if (next != ' ' && next != '>' && next != '\t' && next != '\n') {
            pos = open + 2;
            continue;
        }
        std::size_t tag_end = html.find('>', open);
        if (tag_end == std::string::npos) break;
        std::size_t close = html.find("</a>", tag_end);
        if (close == std::string::npos) break;
        std::string body = html.substr(tag_end + 1, close - tag_end - 1);
        // Trim whitespace inside the anchor body.
        std::size_t b = 0, e = body.size();
        while (b < e && std::isspace(static_cast<unsigned char>(body[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(body[e - 1]))) --e;
        if (e > b) anchors.push_back(body.substr(b, e - b));
        pos = close + 4;
    }
    return anchors;
}

std::vector<PackageName> IndexClient::fetch_package_list() {
    std::string body = get_body("/simple/");
    if (body.find('<') == std::string::npos)
        throw IndexFormatError("response does not look like a simple index page");
    std::set<std::string> seen;
    std::vector<PackageName> names;
    for (const std::string& anchor : extract_index_anchors(body)) {
        PackageName name(anchor);
        if (name.normalized.empty()) continue;
        if (seen.insert(name.normalized).second) names.push_back(std::move(name));
    }
    std::sort(names.begin(), names.end());
    log::info("simple index lists " + std::to_string(names.size()) + " package names");
    return names;
}

PackageMetadata IndexClient::fetch(const PackageName& name) {
    std::string body;
    try {
        body = get_body("/pypi/" + name.normalized + "/json");
    } catch (const NotFoundError&) {
        throw NotFoundError(name.normalized);
    }

    PackageMetadata package;
    package.name = name;
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::exception& e) {
        throw NetworkError("unparseable metadata for " + name.normalized + ": " + e.what());
    }

    if (!doc.contains("releases") || !doc["releases"].is_object())
        throw NetworkError("metadata for " + name.normalized + " lacks a releases map");

    for (const auto& [version_text, files] : doc["releases"].items()) {
        auto version = Version::try_parse(version_text);
        if (!version) {
            log::warn("skipping non-PEP-440 release \"" + version_text + "\" of " + name.normalized);
            continue;
        }
        ReleaseMetadata release;
        release.version = *version;

        std::string detail_body;
        try {
            detail_body = get_body("/pypi/" + name.normalized + "/" + version_text + "/json");
        } catch (const NotFoundError&) {
            // Release listed but without a metadata document; keep it with
            // no requirements rather than dropping it.
            (void)files;
            package.releases.push_back(std::move(release));
            continue;
        }
        try {
            json detail = json::parse(detail_body);
            const json& info = detail.value("info", json::object());
            release.yanked = info.value("yanked", false);
            if (info.contains("requires_dist") && info["requires_dist"].is_array()) {
                for (const auto& line : info["requires_dist"]) {
                    if (line.is_string()) release.requires_dist.push_back(line.get<std::string>());
                }
            }
            if (info.contains("requires_python") && info["requires_python"].is_string()) {
                release.requires_python = info["requires_python"].get<std::string>();
            }
        } catch (const json::exception& e) {
            log::warn("malformed per-version metadata for " + name.normalized + "==" +
                      version_text + ": " + e.what());
        }
        package.releases.push_back(std::move(release));
    }
    package.sort_releases();
    return package;
}

}  // namespace depgauge
