#pragma once

#include <map>
#include <string>
#include <vector>

#include "depgauge/constraints.hpp"
#include "depgauge/intervals.hpp"
#include "depgauge/names.hpp"

namespace depgauge {

enum class Severity { Low, Medium, High, Critical, Unknown };

std::string_view severity_text(Severity s);
Severity severity_from_text(const std::string& text);

// One curated CVE entry: the affected package and its vulnerable version
// ranges as a disjunction of constraint conjunctions.
struct VulnRecord {
    std::string cve_id;
    PackageName package;
    Severity severity = Severity::Unknown;
    std::vector<ConstraintSet> ranges;  // disjuncts
    std::string note;

    // V: the union of the ranges' interval forms.
    IntervalSet vulnerable_interval_set() const;
};

// The loaded vulnerability list, keyed by normalized package name.
class VulnDb {
public:
    // Loads and validates a vulnerability file (JSON array of records with
    // fields {cve, package, severity, ranges:[string], note}). Throws
    // SchemaError / ParseError; duplicate (cve, package) pairs are rejected.
    static VulnDb load(const std::string& path);
    static VulnDb from_json_text(const std::string& text);

    void save(const std::string& path) const;
    std::string to_json_text() const;

    const std::vector<VulnRecord>* find(const std::string& normalized_name) const;
    // Precomputed interval forms, aligned with find()'s record order.
    const std::vector<IntervalSet>* find_intervals(const std::string& normalized_name) const;

    std::size_t record_count() const;
    std::size_t package_count() const { return by_package_.size(); }
    std::vector<std::string> package_names() const;
    const std::vector<std::string>& validation_warnings() const { return warnings_; }

    friend bool operator==(const VulnDb& a, const VulnDb& b);

private:
    std::map<std::string, std::vector<VulnRecord>> by_package_;
    std::map<std::string, std::vector<IntervalSet>> intervals_;
    std::vector<std::string> warnings_;
};

}  // namespace depgauge
