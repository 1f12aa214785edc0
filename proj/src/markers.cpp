#include "depgauge/markers.hpp"

#include <cctype>

#include "depgauge/constraints.hpp"
#include "depgauge/errors.hpp"
#include "depgauge/intervals.hpp"
#include "depgauge/log.hpp"
#include "depgauge/names.hpp"
#include "depgauge/version.hpp"

namespace depgauge {

MarkerEnv default_marker_env() {
    return {
        {"python_version", "3.10"},
        {"python_full_version", "3.10.12"},
        {"os_name", "posix"},
        {"sys_platform", "linux"},
        {"platform_system", "Linux"},
        {"platform_machine", "x86_64"},
        {"platform_release", ""},
        {"platform_version", ""},
        {"platform_python_implementation", "CPython"},
        {"implementation_name", "cpython"},
        {"implementation_version", "3.10.12"},
    };
}

namespace {

struct MarkerParser {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool done() {
        skip_ws();
        return pos >= text.size();
    }

    [[noreturn]] void fail(const std::string& reason) {
        throw ParseError(std::string(text), reason, pos);
    }

    bool eat_word(std::string_view w) {
        skip_ws();
        if (text.compare(pos, w.size(), w) != 0) return false;
        std::size_t end = pos + w.size();
        if (end < text.size()) {
            char c = text[end];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') return false;
        }
        pos = end;
        return true;
    }

    MarkerExpr parse_or() {
        MarkerExpr node{MarkerExpr::Kind::Or, {}, {}, {}, {}};
        node.children.push_back(parse_and());
        while (eat_word("or")) node.children.push_back(parse_and());
        if (node.children.size() == 1) return std::move(node.children.front());
        return node;
    }

    MarkerExpr parse_and() {
        MarkerExpr node{MarkerExpr::Kind::And, {}, {}, {}, {}};
        node.children.push_back(parse_not());
        while (eat_word("and")) node.children.push_back(parse_not());
        if (node.children.size() == 1) return std::move(node.children.front());
        return node;
    }

    MarkerExpr parse_not() {
        if (eat_word("not")) {
            MarkerExpr node{MarkerExpr::Kind::Not, {}, {}, {}, {}};
            node.children.push_back(parse_not());
            return node;
        }
        return parse_atom();
    }

    MarkerExpr parse_atom() {
        skip_ws();
        if (pos < text.size() && text[pos] == '(') {
            ++pos;
            MarkerExpr inner = parse_or();
            skip_ws();
            if (pos >= text.size() || text[pos] != ')') fail("expected ')'");
            ++pos;
            return inner;
        }
        MarkerExpr node{MarkerExpr::Kind::Comparison, {}, {}, {}, {}};
        node.lhs = parse_value();
        node.comparison_op = parse_op();
        node.rhs = parse_value();
        return node;
    }

    MarkerExpr::Value parse_value() {
        skip_ws();
        if (pos >= text.size()) fail("expected marker value");
        char c = text[pos];
        if (c == '"' || c == '\'') {
            char quote = c;
            std::size_t start = ++pos;
            while (pos < text.size() && text[pos] != quote) ++pos;
            if (pos >= text.size()) fail("unterminated string literal");
            MarkerExpr::Value v{false, std::string(text.substr(start, pos - start))};
            ++pos;
            return v;
        }
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_' ||
                text[pos] == '.')) {
            ++pos;
        }
        if (pos == start) fail("expected marker variable or string");
        return MarkerExpr::Value{true, std::string(text.substr(start, pos - start))};
    }

    std::string parse_op() {
        skip_ws();
        static constexpr std::string_view kOps[] = {"===", "==", "!=", "<=", ">=", "~=", "<", ">"};
        for (std::string_view op : kOps) {
            if (text.compare(pos, op.size(), op) == 0) {
                pos += op.size();
                return std::string(op);
            }
        }
        if (eat_word("not")) {
            if (!eat_word("in")) fail("expected 'in' after 'not'");
            return "not in";
        }
        if (eat_word("in")) return "in";
        fail("expected comparison operator");
    }
};

bool looks_like_version_variable(const std::string& name) {
    return name == "python_version" || name == "python_full_version" ||
           name == "implementation_version";
}

bool compare_as_versions(const std::string& op, const Version& a, const Version& b) {
    auto c = compare_versions(a, b);
    if (op == "==") return c == 0;
    if (op == "!=") return c != 0;
    if (op == "<") return c < 0;
    if (op == "<=") return c <= 0;
    if (op == ">") return c > 0;
    if (op == ">=") return c >= 0;
    if (op == "===") return a.normalized_key() == b.normalized_key();
    if (op == "~=") {
        if (b.release.size() < 2) return false;
        Version upper;
        upper.epoch = b.epoch;
        upper.release.assign(b.release.begin(), b.release.end() - 1);
        upper.release.back() += 1;
        return compare_versions(a, b) >= 0 && compare_versions(a, upper) < 0;
    }
    return false;
}

bool compare_as_strings(const std::string& op, const std::string& a, const std::string& b) {
    if (op == "==") return a == b;
    if (op == "!=") return a != b;
    if (op == "<") return a < b;
    if (op == "<=") return a <= b;
    if (op == ">") return a > b;
    if (op == ">=") return a >= b;
    if (op == "===") return a == b;
    if (op == "in") return b.find(a) != std::string::npos;
    if (op == "not in") return b.find(a) == std::string::npos;
    return false;
}

bool eval_comparison(const MarkerExpr& node, const MarkerEnv& env,
                     const std::vector<std::string>& active_extras) {
    auto resolve = [&](const MarkerExpr::Value& v, bool& ok) -> std::string {
        if (!v.is_variable) {
            ok = true;
            return v.text;
        }
        auto it = env.find(v.text);
        if (it == env.end() && v.text != "extra") {
            log::warn("unknown marker variable \"" + v.text + "\"; treating comparison as false");
            ok = false;
            return {};
        }
        ok = true;
        return it != env.end() ? it->second : std::string{};
    };

    // `extra` matches any of the active extras (normalized), "" when none.
    auto is_extra = [](const MarkerExpr::Value& v) { return v.is_variable && v.text == "extra"; };
    if (is_extra(node.lhs) || is_extra(node.rhs)) {
        const MarkerExpr::Value& other = is_extra(node.lhs) ? node.rhs : node.lhs;
        bool ok = true;
        std::string literal = normalize_package_name(is_extra(node.lhs) && is_extra(node.rhs)
                                                         ? std::string{}
                                                         : resolve(other, ok));
        if (!ok) return false;
        std::vector<std::string> extras = active_extras;
        if (extras.empty()) extras.emplace_back();
        for (const std::string& e : extras) {
            std::string extra_value = normalize_package_name(e);
            std::string a = is_extra(node.lhs) ? extra_value : literal;
            std::string b = is_extra(node.lhs) ? literal : extra_value;
            if (is_extra(node.lhs) && is_extra(node.rhs)) b = a;
            if (compare_as_strings(node.comparison_op, a, b)) return true;
        }
        return false;
    }

    bool lok = true, rok = true;
    std::string lhs = resolve(node.lhs, lok);
    std::string rhs = resolve(node.rhs, rok);
    if (!lok || !rok) return false;

    bool version_context = (node.lhs.is_variable && looks_like_version_variable(node.lhs.text)) ||
                           (node.rhs.is_variable && looks_like_version_variable(node.rhs.text));
    if (version_context && node.comparison_op != "in" && node.comparison_op != "not in") {
        auto va = Version::try_parse(lhs);
        auto vb = Version::try_parse(rhs);
        if (va && vb) return compare_as_versions(node.comparison_op, *va, *vb);
    }
    return compare_as_strings(node.comparison_op, lhs, rhs);
}

void render(const MarkerExpr& node, std::string& out, bool parent_is_and) {
    switch (node.kind) {
        case MarkerExpr::Kind::Comparison: {
            auto render_value = [&](const MarkerExpr::Value& v) {
                if (v.is_variable) {
                    out += v.text;
                } else {
                    out += '"';
                    out += v.text;
                    out += '"';
                }
            };
            render_value(node.lhs);
            out += ' ';
            out += node.comparison_op;
            out += ' ';
            render_value(node.rhs);
            break;
        }
        case MarkerExpr::Kind::Not:
            out += "not ";
            if (node.children.front().kind == MarkerExpr::Kind::Comparison) {
                render(node.children.front(), out, false);
            } else {
                out += '(';
                render(node.children.front(), out, false);
                out += ')';
            }
            break;
        case MarkerExpr::Kind::And:
            for (std::size_t i = 0; i < node.children.size(); ++i) {
                if (i) out += " and ";
                const MarkerExpr& child = node.children[i];
                if (child.kind == MarkerExpr::Kind::Or) {
                    out += '(';
                    render(child, out, true);
                    out += ')';
                } else {
                    render(child, out, true);
                }
            }
            break;
        case MarkerExpr::Kind::Or:
            if (parent_is_and) out += '(';
            for (std::size_t i = 0; i < node.children.size(); ++i) {
                if (i) out += " or ";
                render(node.children[i], out, false);
            }
            if (parent_is_and) out += ')';
            break;
    }
}

}  // namespace

std::string MarkerExpr::str() const {
    std::string out;
    render(*this, out, false);
    return out;
}

bool operator==(const MarkerExpr& a, const MarkerExpr& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == MarkerExpr::Kind::Comparison) {
        return a.comparison_op == b.comparison_op && a.lhs.is_variable == b.lhs.is_variable &&
               a.lhs.text == b.lhs.text && a.rhs.is_variable == b.rhs.is_variable &&
               a.rhs.text == b.rhs.text;
    }
    return a.children == b.children;
}

MarkerExpr parse_marker(std::string_view text) {
    MarkerParser parser{text};
    if (parser.done()) throw ParseError(std::string(text), "empty marker expression");
    MarkerExpr expr = parser.parse_or();
    if (!parser.done()) parser.fail("trailing characters after marker");
    return expr;
}

bool evaluate_marker(const MarkerExpr& marker, const MarkerEnv& env,
                     const std::vector<std::string>& active_extras) {
    switch (marker.kind) {
        case MarkerExpr::Kind::Comparison:
            return eval_comparison(marker, env, active_extras);
        case MarkerExpr::Kind::Not:
            return !evaluate_marker(marker.children.front(), env, active_extras);
        case MarkerExpr::Kind::And:
            for (const auto& child : marker.children) {
                if (!evaluate_marker(child, env, active_extras)) return false;
            }
            return true;
        case MarkerExpr::Kind::Or:
            for (const auto& child : marker.children) {
                if (evaluate_marker(child, env, active_extras)) return true;
            }
            return false;
    }
    return false;
}

}  // namespace depgauge
