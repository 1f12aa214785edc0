#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace depgauge {

// One segment of a local version label: numeric segments compare as numbers
// and rank above alphanumeric segments.
using LocalSegment = std::variant<std::string, long long>;

enum class PrePhase : int { Alpha = 0, Beta = 1, ReleaseCandidate = 2 };

struct PreRelease {
    PrePhase phase;
    long long number;
};

// A parsed PEP 440 version. Ordering is a total order; versions whose
// canonical forms coincide compare equal regardless of the text they were
// parsed from (1.0 and 1.0.0 are the same point).
class Version {
public:
    long long epoch = 0;
    std::vector<long long> release;
    std::optional<PreRelease> pre;
    std::optional<long long> post;
    std::optional<long long> dev;
    std::vector<LocalSegment> local;
    std::string original_text;

    // Throws ParseError when no PEP 440 interpretation exists. Tolerates
    // surrounding whitespace, a leading "v", and case differences; alternate
    // tag spellings (alpha, beta, c, pre, preview, rev, r) map to canonical
    // phases.
    static Version parse(std::string_view text);

    static std::optional<Version> try_parse(std::string_view text);

    // Canonical PEP 440 rendering, e.g. "1.0a1.post2.dev3+local.7".
    // Release segments are kept as parsed ("1.0" stays "1.0").
    std::string canonical() const;

    // Like canonical() but with insignificant trailing release zeros removed,
    // so order-equal versions render identically ("1.0" and "1.0.0" -> "1").
    std::string normalized_key() const;

    bool is_prerelease() const { return dev.has_value() || pre.has_value(); }
    bool is_postrelease() const { return post.has_value(); }
    bool has_local() const { return !local.empty(); }

    // Copy with the local label removed.
    Version without_local() const;

    friend std::strong_ordering operator<=>(const Version& a, const Version& b);
    friend bool operator==(const Version& a, const Version& b) { return (a <=> b) == 0; }
};

// Three-way comparison per PEP 440: epoch, zero-padded release, then
// dev < pre < final < post at the same release; local labels break final ties.
std::strong_ordering compare_versions(const Version& a, const Version& b);

}  // namespace depgauge
