#include "depgauge/requirements.hpp"

#include <cctype>

#include "depgauge/errors.hpp"

namespace depgauge {

namespace {

std::size_t skip_ws(std::string_view s, std::size_t pos) {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    return pos;
}

std::string_view rtrim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

Requirement Requirement::parse(std::string_view text) {
    Requirement req;
    std::size_t pos = skip_ws(text, 0);
    if (pos >= text.size()) throw ParseError(std::string(text), "empty requirement", pos);

    // Name.
    std::size_t name_start = pos;
    while (pos < text.size()) {
        char c = text[pos];
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-') {
            ++pos;
        } else {
            break;
        }
    }
    std::string_view raw_name = text.substr(name_start, pos - name_start);
    if (!is_valid_package_name(raw_name))
        throw ParseError(std::string(text), "invalid package name", name_start);
    req.name = PackageName(raw_name);

    pos = skip_ws(text, pos);

    // Extras.
    if (pos < text.size() && text[pos] == '[') {
        ++pos;
        while (true) {
            pos = skip_ws(text, pos);
            std::size_t start = pos;
            while (pos < text.size()) {
                char c = text[pos];
                if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-') {
                    ++pos;
                } else {
                    break;
                }
            }
            if (pos > start) req.extras.insert(normalize_package_name(text.substr(start, pos - start)));
            pos = skip_ws(text, pos);
            if (pos < text.size() && text[pos] == ',') {
                ++pos;
                continue;
            }
            break;
        }
        if (pos >= text.size() || text[pos] != ']')
            throw ParseError(std::string(text), "unterminated extras list", pos);
        ++pos;
        pos = skip_ws(text, pos);
    }

    // Split the remainder at the marker separator ';' (not inside quotes —
    // the specifier part never contains quotes, so a plain find is enough
    // once the URL case is handled).
    std::string_view rest = text.substr(pos);

    if (!rest.empty() && rest.front() == '@') {
        // Direct URL reference: everything up to " ;" is the URL.
        rest.remove_prefix(1);
        std::size_t marker_sep = rest.find(';');
        std::string_view url_part = marker_sep == std::string_view::npos ? rest : rest.substr(0, marker_sep);
        url_part = rtrim(url_part.substr(skip_ws(url_part, 0)));
        if (url_part.empty()) throw ParseError(std::string(text), "empty URL reference", pos);
        req.url = std::string(url_part);
        if (marker_sep != std::string_view::npos) {
            std::string_view marker_text = rest.substr(marker_sep + 1);
            req.marker = parse_marker(marker_text);
        }
        return req;
    }

    std::size_t marker_sep = rest.find(';');
    std::string_view spec_part = marker_sep == std::string_view::npos ? rest : rest.substr(0, marker_sep);
    spec_part = rtrim(spec_part.substr(skip_ws(spec_part, 0)));

    if (!spec_part.empty()) {
        // Specifier list, optionally parenthesized.
        if (spec_part.front() == '(') {
            if (spec_part.back() != ')')
                throw ParseError(std::string(text), "unbalanced parentheses in specifier", pos);
            spec_part = rtrim(spec_part.substr(1, spec_part.size() - 2));
        }
        if (!spec_part.empty()) req.constraints = ConstraintSet::parse(spec_part);
    }

    if (marker_sep != std::string_view::npos) {
        std::string_view marker_text = rest.substr(marker_sep + 1);
        req.marker = parse_marker(marker_text);
    }
    return req;
}

std::string Requirement::str() const {
    std::string out = name.original;
    if (!extras.empty()) {
        out += '[';
        bool first = true;
        for (const auto& e : extras) {
            if (!first) out += ',';
            first = false;
            out += e;
        }
        out += ']';
    }
    if (url) {
        out += " @ ";
        out += *url;
    } else if (!constraints.any_version()) {
        out += constraints.str();
    }
    if (marker) {
        out += "; ";
        out += marker->str();
    }
    return out;
}

bool operator==(const Requirement& a, const Requirement& b) {
    if (!(a.name == b.name) || a.extras != b.extras || !(a.constraints == b.constraints) ||
        a.url != b.url)
        return false;
    if (a.marker.has_value() != b.marker.has_value()) return false;
    if (a.marker && !(*a.marker == *b.marker)) return false;
    return true;
}

}  // namespace depgauge
