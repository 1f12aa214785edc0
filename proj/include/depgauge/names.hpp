#pragma once

#include <string>
#include <string_view>

namespace depgauge {

// A package name with its index-normalized form: lowercase, every run of
// ".", "_", "-" collapsed to a single "-". Normalization is idempotent.
struct PackageName {
    std::string normalized;
    std::string original;

    PackageName() = default;
    explicit PackageName(std::string_view name);

    friend bool operator==(const PackageName& a, const PackageName& b) {
        return a.normalized == b.normalized;
    }
    friend auto operator<=>(const PackageName& a, const PackageName& b) {
        return a.normalized <=> b.normalized;
    }
};

std::string normalize_package_name(std::string_view name);

// PEP 508 name shape: alphanumeric with interior [._-] runs.
bool is_valid_package_name(std::string_view name);

}  // namespace depgauge
