#include "depgauge/names.hpp"

#include <cctype>

namespace depgauge {

std::string normalize_package_name(std::string_view name) {
    std::string out;
    out.reserve(name.size());
    bool pending_sep = false;
    for (char c : name) {
        if (c == '.' || c == '_' || c == '-') {
            pending_sep = !out.empty();
            continue;
        }
        if (pending_sep) {
            out += '-';
            pending_sep = false;
        }
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

bool is_valid_package_name(std::string_view name) {
    if (name.empty()) return false;
    auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
    if (!alnum(name.front()) || !alnum(name.back())) return false;
    for (char c : name) {
        if (!alnum(c) && c != '.' && c != '_' && c != '-') return false;
    }
    return true;
}

PackageName::PackageName(std::string_view name)
    : normalized(normalize_package_name(name)), original(name) {}

}  // namespace depgauge
