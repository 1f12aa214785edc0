#include "depgauge/constraints.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "depgauge/errors.hpp"

namespace depgauge {

std::string_view op_text(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "==";
        case CmpOp::Ne: return "!=";
        case CmpOp::Ge: return ">=";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Lt: return "<";
        case CmpOp::Compatible: return "~=";
        case CmpOp::ArbitraryEq: return "===";
    }
    return "?";
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Parses a wildcard literal "N(.N)*.*" (optionally with "N!" epoch) into a
// release prefix. Returns false when the literal is not wildcard-shaped.
bool parse_wildcard(std::string_view lit, std::vector<long long>& prefix, long long& epoch) {
    if (lit.size() < 2 || lit.substr(lit.size() - 2) != ".*") return false;
    std::string_view body = lit.substr(0, lit.size() - 2);
    if (auto bang = body.find('!'); bang != std::string_view::npos) {
        long long e = 0;
        std::string_view es = body.substr(0, bang);
        if (es.empty() || es.size() > 18) return false;
        for (char c : es) {
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
            e = e * 10 + (c - '0');
        }
        epoch = e;
        body = body.substr(bang + 1);
    }
    if (body.empty()) return false;
    std::size_t i = 0;
    while (i < body.size()) {
        std::size_t start = i;
        while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) ++i;
        if (i == start || i - start > 18) return false;
        long long value = 0;
        for (std::size_t k = start; k < i; ++k) value = value * 10 + (body[k] - '0');
        prefix.push_back(value);
        if (i < body.size()) {
            if (body[i] != '.') return false;
            ++i;
            if (i == body.size()) return false;
        }
    }
    return !prefix.empty();
}

Clause parse_clause(std::string_view item, std::string_view whole) {
    struct OpSpec {
        std::string_view text;
        CmpOp op;
    };
    // Longest operators first.
    static constexpr std::array<OpSpec, 8> kOps{{
        {"===", CmpOp::ArbitraryEq},
        {"==", CmpOp::Eq},
        {"!=", CmpOp::Ne},
        {">=", CmpOp::Ge},
        {"<=", CmpOp::Le},
        {"~=", CmpOp::Compatible},
        {">", CmpOp::Gt},
        {"<", CmpOp::Lt},
    }};

    const OpSpec* match = nullptr;
    for (const auto& spec : kOps) {
        if (item.substr(0, spec.text.size()) == spec.text) {
            match = &spec;
            break;
        }
    }
    if (!match) throw ParseError(std::string(whole), "missing or unknown operator in \"" + std::string(item) + "\"");

    Clause clause;
    clause.op = match->op;
    std::string_view lit = trim(item.substr(match->text.size()));
    if (lit.empty()) throw ParseError(std::string(whole), "empty version literal");
    // Literals may not contain embedded whitespace.
    if (std::any_of(lit.begin(), lit.end(),
                    [](char c) { return std::isspace(static_cast<unsigned char>(c)); }))
        throw ParseError(std::string(whole), "whitespace inside version literal \"" + std::string(lit) + "\"");
    clause.text = std::string(lit);

    if (clause.op == CmpOp::ArbitraryEq) return clause;  // literal kept verbatim

    if (parse_wildcard(lit, clause.prefix, clause.prefix_epoch)) {
        if (clause.op != CmpOp::Eq && clause.op != CmpOp::Ne)
            throw ParseError(std::string(whole),
                             "wildcard literal only valid with == or !=: \"" + std::string(item) + "\"");
        clause.wildcard = true;
        return clause;
    }
    if (lit.find('*') != std::string_view::npos)
        throw ParseError(std::string(whole), "malformed wildcard literal \"" + std::string(lit) + "\"");

    Version v = Version::parse(lit);
    switch (clause.op) {
        case CmpOp::Ge:
        case CmpOp::Le:
        case CmpOp::Gt:
        case CmpOp::Lt:
        case CmpOp::Compatible:
            if (v.has_local())
                throw ParseError(std::string(whole),
                                 "local version label not allowed with " + std::string(op_text(clause.op)));
            break;
        default:
            break;
    }
    if (clause.op == CmpOp::Compatible && v.release.size() < 2)
        throw ParseError(std::string(whole), "~= requires at least two release segments");
    clause.version = std::move(v);
    return clause;
}

}  // namespace

ConstraintSet ConstraintSet::parse(std::string_view text) {
    ConstraintSet set;
    std::string_view whole = trim(text);
    if (whole.empty()) return set;

    std::size_t pos = 0;
    while (pos <= whole.size()) {
        std::size_t comma = whole.find(',', pos);
        std::string_view item = comma == std::string_view::npos ? whole.substr(pos)
                                                                : whole.substr(pos, comma - pos);
        item = trim(item);
        if (item.empty()) throw ParseError(std::string(text), "empty specifier in list");
        set.clauses.push_back(parse_clause(item, text));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return set;
}

std::string ConstraintSet::str() const {
    std::string out;
    for (std::size_t i = 0; i < clauses.size(); ++i) {
        if (i) out += ",";
        out += clauses[i].str();
    }
    return out;
}

bool operator==(const ConstraintSet& a, const ConstraintSet& b) {
    if (a.clauses.size() != b.clauses.size()) return false;
    for (std::size_t i = 0; i < a.clauses.size(); ++i) {
        if (a.clauses[i].op != b.clauses[i].op || a.clauses[i].text != b.clauses[i].text) return false;
    }
    return true;
}

std::pair<Clause, Clause> expand_compatible(const Clause& clause) {
    const Version& v = *clause.version;

    Clause lower;
    lower.op = CmpOp::Ge;
    lower.text = clause.text;
    lower.version = v;

    // Upper bound: drop the last release segment, bump the new last.
    Version upper;
    upper.epoch = v.epoch;
    upper.release.assign(v.release.begin(), v.release.end() - 1);
    upper.release.back() += 1;
    Clause upper_clause;
    upper_clause.op = CmpOp::Lt;
    upper_clause.text = upper.canonical();
    upper_clause.version = std::move(upper);
    upper_clause.version->original_text = upper_clause.text;
    return {std::move(lower), std::move(upper_clause)};
}

}  // namespace depgauge
