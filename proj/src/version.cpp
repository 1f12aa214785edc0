#include "depgauge/version.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "depgauge/errors.hpp"

namespace depgauge {

namespace {

bool is_sep(char c) { return c == '.' || c == '-' || c == '_'; }

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

// Cursor over a lowercased, trimmed version string.
struct Scanner {
    std::string text;
    std::size_t pos = 0;

    bool done() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }

    bool eat(char c) {
        if (!done() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    bool eat_word(std::string_view w) {
        if (text.compare(pos, w.size(), w) == 0) {
            pos += w.size();
            return true;
        }
        return false;
    }

    // Parses a decimal number; rejects absurd lengths instead of overflowing.
    std::optional<long long> eat_number() {
        std::size_t start = pos;
        while (!done() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) return std::nullopt;
        if (pos - start > 18) throw ParseError(text, "numeric component too large", start);
        long long value = 0;
        for (std::size_t i = start; i < pos; ++i) value = value * 10 + (text[i] - '0');
        return value;
    }
};

struct TagSpec {
    std::string_view spelling;
    int kind;  // 0 = pre, 1 = post, 2 = dev
    PrePhase phase;
};

// Longest spellings first so "rc" wins over "r" and "preview" over "pre".
constexpr std::array<TagSpec, 12> kTags{{
    {"preview", 0, PrePhase::ReleaseCandidate},
    {"alpha", 0, PrePhase::Alpha},
    {"beta", 0, PrePhase::Beta},
    {"post", 1, PrePhase::Alpha},
    {"pre", 0, PrePhase::ReleaseCandidate},
    {"rev", 1, PrePhase::Alpha},
    {"dev", 2, PrePhase::Alpha},
    {"rc", 0, PrePhase::ReleaseCandidate},
    {"a", 0, PrePhase::Alpha},
    {"b", 0, PrePhase::Beta},
    {"c", 0, PrePhase::ReleaseCandidate},
    {"r", 1, PrePhase::Alpha},
}};

}  // namespace

Version Version::parse(std::string_view input) {
    std::size_t begin = 0;
    std::size_t end = input.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(input[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(input[end - 1]))) --end;
    if (begin == end) throw ParseError(std::string(input), "empty version string");

    Scanner s;
    s.text.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) s.text.push_back(lower(input[i]));

    Version v;
    v.original_text.assign(input.begin() + begin, input.begin() + end);

    if (s.peek() == 'v') ++s.pos;
    if (s.done()) throw ParseError(v.original_text, "no release segment");

    // Epoch: N!
    {
        std::size_t mark = s.pos;
        auto n = s.eat_number();
        if (n && s.eat('!')) {
            v.epoch = *n;
        } else {
            s.pos = mark;
        }
    }

    // Release: N(.N)*
    {
        auto n = s.eat_number();
        if (!n) throw ParseError(v.original_text, "release segment must start with a number", s.pos);
        v.release.push_back(*n);
        while (!s.done() && s.peek() == '.') {
            std::size_t mark = s.pos;
            ++s.pos;
            auto more = s.eat_number();
            if (!more) {
                s.pos = mark;  // "." belongs to a tag separator, e.g. "1.0.post1"
                break;
            }
            v.release.push_back(*more);
        }
    }

    // Pre / post / dev tags in order, each optionally separated by [.-_].
    auto try_tag = [&](int wanted) -> std::optional<long long> {
        std::size_t mark = s.pos;
        if (!s.done() && is_sep(s.peek())) ++s.pos;
        for (const auto& tag : kTags) {
            if (tag.kind != wanted) continue;
            if (!s.eat_word(tag.spelling)) continue;
            if (!s.done() && is_sep(s.peek())) ++s.pos;
            auto n = s.eat_number();
            if (wanted == 0) v.pre = PreRelease{tag.phase, n.value_or(0)};
            return n.value_or(0);
        }
        s.pos = mark;
        return std::nullopt;
    };

    (void)try_tag(0);  // sets v.pre on success

    // Post: tag form or the implicit "-N" form.
    {
        std::size_t mark = s.pos;
        if (auto n = try_tag(1); n) {
            v.post = *n;
        } else if (s.eat('-')) {
            auto n2 = s.eat_number();
            if (n2) {
                v.post = *n2;
            } else {
                s.pos = mark;
            }
        }
    }

    if (auto n = try_tag(2); n) v.dev = *n;

    // Local label: +segments, separators normalized to ".".
    if (!s.done() && s.peek() == '+') {
        ++s.pos;
        std::string segment;
        auto push_segment = [&]() {
            if (segment.empty())
                throw ParseError(v.original_text, "empty local version segment", s.pos);
            bool numeric = std::all_of(segment.begin(), segment.end(), [](char c) {
                return std::isdigit(static_cast<unsigned char>(c));
            });
            if (numeric && segment.size() <= 18) {
                long long value = 0;
                for (char c : segment) value = value * 10 + (c - '0');
                v.local.emplace_back(value);
            } else {
                v.local.emplace_back(segment);
            }
            segment.clear();
        };
        while (!s.done()) {
            char c = s.peek();
            if (std::isalnum(static_cast<unsigned char>(c))) {
                segment.push_back(c);
                ++s.pos;
            } else if (is_sep(c)) {
                push_segment();
                ++s.pos;
            } else {
                break;
            }
        }
        push_segment();
    }

    if (!s.done()) throw ParseError(v.original_text, "trailing characters", s.pos);
    return v;
}

std::optional<Version> Version::try_parse(std::string_view text) {
    try {
        return parse(text);
    } catch (const ParseError&) {
        return std::nullopt;
    }
}

namespace {

void render_suffix(const Version& v, std::string& out) {
    if (v.pre) {
        switch (v.pre->phase) {
            case PrePhase::Alpha: out += 'a'; break;
            case PrePhase::Beta: out += 'b'; break;
            case PrePhase::ReleaseCandidate: out += "rc"; break;
        }
        out += std::to_string(v.pre->number);
    }
    if (v.post) {
        out += ".post";
        out += std::to_string(*v.post);
    }
    if (v.dev) {
        out += ".dev";
        out += std::to_string(*v.dev);
    }
    if (!v.local.empty()) {
        out += '+';
        bool first = true;
        for (const auto& seg : v.local) {
            if (!first) out += '.';
            first = false;
            if (std::holds_alternative<long long>(seg)) {
                out += std::to_string(std::get<long long>(seg));
            } else {
                out += std::get<std::string>(seg);
            }
        }
    }
}

}  // namespace

std::string Version::canonical() const {
    std::string out;
    if (epoch != 0) {
        out += std::to_string(epoch);
        out += '!';
    }
    for (std::size_t i = 0; i < release.size(); ++i) {
        if (i) out += '.';
        out += std::to_string(release[i]);
    }
    render_suffix(*this, out);
    return out;
}

std::string Version::normalized_key() const {
    std::string out;
    if (epoch != 0) {
        out += std::to_string(epoch);
        out += '!';
    }
    std::size_t len = release.size();
    while (len > 1 && release[len - 1] == 0) --len;
    for (std::size_t i = 0; i < len; ++i) {
        if (i) out += '.';
        out += std::to_string(release[i]);
    }
    render_suffix(*this, out);
    return out;
}

Version Version::without_local() const {
    Version v = *this;
    v.local.clear();
    return v;
}

std::strong_ordering compare_versions(const Version& a, const Version& b) {
    if (auto c = a.epoch <=> b.epoch; c != 0) return c;

    // Release segments compare element-wise with implicit zero padding, which
    // also makes trailing zeros insignificant.
    std::size_t n = std::max(a.release.size(), b.release.size());
    for (std::size_t i = 0; i < n; ++i) {
        long long av = i < a.release.size() ? a.release[i] : 0;
        long long bv = i < b.release.size() ? b.release[i] : 0;
        if (auto c = av <=> bv; c != 0) return c;
    }

    // Pre key: dev-only releases sort below any pre-release, which sorts
    // below the final release.
    auto pre_rank = [](const Version& v) -> int {
        if (v.pre) return 1;
        if (!v.post && v.dev) return 0;
        return 2;
    };
    if (auto c = pre_rank(a) <=> pre_rank(b); c != 0) return c;
    if (a.pre && b.pre) {
        if (auto c = static_cast<int>(a.pre->phase) <=> static_cast<int>(b.pre->phase); c != 0) return c;
        if (auto c = a.pre->number <=> b.pre->number; c != 0) return c;
    }

    // Post key: absent sorts first.
    if (auto c = a.post.has_value() <=> b.post.has_value(); c != 0) return c;
    if (a.post && b.post) {
        if (auto c = *a.post <=> *b.post; c != 0) return c;
    }

    // Dev key: absent sorts last.
    if (auto c = b.dev.has_value() <=> a.dev.has_value(); c != 0) return c;
    if (a.dev && b.dev) {
        if (auto c = *a.dev <=> *b.dev; c != 0) return c;
    }

    // Local label: absent sorts first; numeric segments beat alphanumeric.
    std::size_t ln = std::min(a.local.size(), b.local.size());
    for (std::size_t i = 0; i < ln; ++i) {
        const auto& as = a.local[i];
        const auto& bs = b.local[i];
        bool a_num = std::holds_alternative<long long>(as);
        bool b_num = std::holds_alternative<long long>(bs);
        if (a_num != b_num) return a_num ? std::strong_ordering::greater : std::strong_ordering::less;
        if (a_num) {
            if (auto c = std::get<long long>(as) <=> std::get<long long>(bs); c != 0) return c;
        } else {
            if (auto c = std::get<std::string>(as).compare(std::get<std::string>(bs)) <=> 0; c != 0) return c;
        }
    }
    return a.local.size() <=> b.local.size();
}

std::strong_ordering operator<=>(const Version& a, const Version& b) {
    return compare_versions(a, b);
}

}  // namespace depgauge
