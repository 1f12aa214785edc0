#include "depgauge/vulndb.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "depgauge/errors.hpp"
#include "depgauge/log.hpp"

namespace depgauge {

using json = nlohmann::json;

std::string_view severity_text(Severity s) {
    switch (s) {
        case Severity::Low: return "Low";
        case Severity::Medium: return "Medium";
        case Severity::High: return "High";
        case Severity::Critical: return "Critical";
        case Severity::Unknown: return "Unknown";
    }
    return "Unknown";
}

Severity severity_from_text(const std::string& text) {
    std::string lower;
    for (char c : text) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "low") return Severity::Low;
    if (lower == "medium" || lower == "moderate") return Severity::Medium;
    if (lower == "high") return Severity::High;
    if (lower == "critical") return Severity::Critical;
    return Severity::Unknown;
}

IntervalSet VulnRecord::vulnerable_interval_set() const {
    IntervalSet v = IntervalSet::empty_set();
    for (const ConstraintSet& range : ranges) {
        v = v.unite(to_interval_set(range));
    }
    return v;
}

namespace {

bool valid_cve_id(const std::string& id) {
    if (id.size() < 11 || id.compare(0, 4, "CVE-") != 0) return false;
    // CVE-YYYY-N+ with at least four digits after the second dash.
    if (!std::isdigit(static_cast<unsigned char>(id[4]))) return false;
    std::size_t dash = id.find('-', 4);
    if (dash == std::string::npos || dash != 8) return false;
    if (dash + 1 >= id.size()) return false;
    for (std::size_t i = 4; i < 8; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(id[i]))) return false;
    }
    for (std::size_t i = dash + 1; i < id.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(id[i]))) return false;
    }
    return true;
}

}  // namespace

VulnDb VulnDb::from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("vulnerability file is not valid JSON: ") + e.what(), 0);
    }
    if (!doc.is_array()) throw SchemaError("vulnerability file must be a JSON array", 0);

    VulnDb db;
    std::set<std::pair<std::string, std::string>> seen;
    std::size_t index = 0;
    for (const auto& entry : doc) {
        if (!entry.is_object()) throw SchemaError("record is not an object", index);
        if (!entry.contains("cve") || !entry["cve"].is_string())
            throw SchemaError("missing string field \"cve\"", index);
        if (!entry.contains("package") || !entry["package"].is_string())
            throw SchemaError("missing string field \"package\"", index);
        if (!entry.contains("ranges") || !entry["ranges"].is_array() || entry["ranges"].empty())
            throw SchemaError("missing non-empty array field \"ranges\"", index);

        VulnRecord record;
        record.cve_id = entry["cve"].get<std::string>();
        if (!valid_cve_id(record.cve_id))
            throw SchemaError("malformed CVE id \"" + record.cve_id + "\"", index);
        record.package = PackageName(entry["package"].get<std::string>());
        if (record.package.normalized.empty())
            throw SchemaError("empty package name", index);

        std::string severity_str = entry.value("severity", "");
        record.severity = severity_from_text(severity_str);
        if (record.severity == Severity::Unknown && !severity_str.empty() &&
            severity_str != "Unknown" && severity_str != "unknown") {
            db.warnings_.push_back(record.cve_id + ": unrecognized severity \"" + severity_str +
                                   "\" mapped to Unknown");
        }
        record.note = entry.value("note", "");

        for (const auto& range : entry["ranges"]) {
            if (!range.is_string()) throw SchemaError("range element is not a string", index);
            record.ranges.push_back(ConstraintSet::parse(range.get<std::string>()));
        }

        IntervalSet v = record.vulnerable_interval_set();
        if (v.empty())
            throw SchemaError(record.cve_id + ": vulnerable range union is empty", index);

        if (!seen.insert({record.cve_id, record.package.normalized}).second)
            throw SchemaError("duplicate record for " + record.cve_id + " / " +
                                  record.package.normalized,
                              index);

        db.intervals_[record.package.normalized].push_back(std::move(v));
        db.by_package_[record.package.normalized].push_back(std::move(record));
        ++index;
    }
    return db;
}

VulnDb VulnDb::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingInputError(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_json_text(buffer.str());
}

std::string VulnDb::to_json_text() const {
    json doc = json::array();
    for (const auto& [name, records] : by_package_) {
        for (const VulnRecord& record : records) {
            json ranges = json::array();
            for (const ConstraintSet& range : record.ranges) ranges.push_back(range.str());
            doc.push_back(json{{"cve", record.cve_id},
                               {"package", name},
                               {"severity", std::string(severity_text(record.severity))},
                               {"ranges", std::move(ranges)},
                               {"note", record.note}});
        }
    }
    return doc.dump(2) + "\n";
}

void VulnDb::save(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write vulnerability file: " + path);
    out << to_json_text();
}

const std::vector<VulnRecord>* VulnDb::find(const std::string& normalized_name) const {
    auto it = by_package_.find(normalized_name);
    return it == by_package_.end() ? nullptr : &it->second;
}

const std::vector<IntervalSet>* VulnDb::find_intervals(const std::string& normalized_name) const {
    auto it = intervals_.find(normalized_name);
    return it == intervals_.end() ? nullptr : &it->second;
}

std::size_t VulnDb::record_count() const {
    std::size_t n = 0;
    for (const auto& [name, records] : by_package_) n += records.size();
    return n;
}

std::vector<std::string> VulnDb::package_names() const {
    std::vector<std::string> names;
    names.reserve(by_package_.size());
    for (const auto& [name, records] : by_package_) names.push_back(name);
    return names;
}

bool operator==(const VulnDb& a, const VulnDb& b) {
    if (a.by_package_.size() != b.by_package_.size()) return false;
    auto ia = a.by_package_.begin();
    auto ib = b.by_package_.begin();
    for (; ia != a.by_package_.end(); ++ia, ++ib) {
        if (ia->first != ib->first || ia->second.size() != ib->second.size()) return false;
        for (std::size_t i = 0; i < ia->second.size(); ++i) {
            const VulnRecord& ra = ia->second[i];
            const VulnRecord& rb = ib->second[i];
            if (ra.cve_id != rb.cve_id || ra.severity != rb.severity || ra.note != rb.note)
                return false;
            if (ra.ranges.size() != rb.ranges.size()) return false;
            for (std::size_t k = 0; k < ra.ranges.size(); ++k) {
                if (!(ra.ranges[k] == rb.ranges[k])) return false;
            }
        }
    }
    return true;
}

}  // namespace depgauge
