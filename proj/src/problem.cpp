#include "ftscert/problem.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ftscert/util.hpp"

namespace ftscert {

namespace {

struct TomlValue {
    enum class Kind { String, Number, Array } kind;
    std::string str;
    Rational num;
    std::vector<TomlValue> items;
    int line = 0;
};

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// strips a # comment that is not inside a quoted string
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

struct ValueParser {
    std::string s;  // owned: callers pass substr temporaries
    size_t pos = 0;
    int line;

    ValueParser(std::string text, int line_) : s(std::move(text)), line(line_) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, line, static_cast<int>(pos) + 1);
    }

    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }

    TomlValue parse_value() {
        skip_ws();
        if (pos >= s.size()) fail("missing value");
        TomlValue v;
        v.line = line;
        char c = s[pos];
        if (c == '"') {
            ++pos;
            size_t end = s.find('"', pos);
            if (end == std::string::npos) fail("unterminated string");
            v.kind = TomlValue::Kind::String;
            v.str = s.substr(pos, end - pos);
            pos = end + 1;
            return v;
        }
        if (c == '[') {
            ++pos;
            v.kind = TomlValue::Kind::Array;
            skip_ws();
            if (pos < s.size() && s[pos] == ']') {
                ++pos;
                return v;
            }
            for (;;) {
                v.items.push_back(parse_value());
                skip_ws();
                if (pos < s.size() && s[pos] == ',') {
                    ++pos;
                    continue;
                }
                if (pos < s.size() && s[pos] == ']') {
                    ++pos;
                    return v;
                }
                fail("expected ',' or ']' in array");
            }
        }
        size_t start = pos;
        while (pos < s.size() && s[pos] != ',' && s[pos] != ']' && s[pos] != ' ' && s[pos] != '\t')
            ++pos;
        std::string tok = s.substr(start, pos - start);
        if (tok.empty()) fail("missing value");
        v.kind = TomlValue::Kind::Number;
        try {
            v.num = rat_from_string(tok);
        } catch (const std::invalid_argument&) {
            fail("invalid number '" + tok + "'");
        }
        return v;
    }

    TomlValue parse_full() {
        TomlValue v = parse_value();
        skip_ws();
        if (pos < s.size()) fail("trailing characters after value");
        return v;
    }
};

int value_as_int(const TomlValue& v, const std::string& key) {
    if (v.kind != TomlValue::Kind::Number || !rat_is_integer(v.num))
        throw ParseError(key + " must be an integer", v.line, 1);
    return static_cast<int>(rat_to_long(v.num));
}

std::vector<int> value_as_int_list(const TomlValue& v, const std::string& key) {
    std::vector<int> out;
    if (v.kind == TomlValue::Kind::Number) {
        out.push_back(value_as_int(v, key));
        return out;
    }
    if (v.kind != TomlValue::Kind::Array)
        throw ParseError(key + " must be an integer or integer array", v.line, 1);
    for (const auto& item : v.items) out.push_back(value_as_int(item, key));
    return out;
}

std::vector<std::string> value_as_string_list(const TomlValue& v, const std::string& key) {
    if (v.kind != TomlValue::Kind::Array)
        throw ParseError(key + " must be an array of strings", v.line, 1);
    std::vector<std::string> out;
    for (const auto& item : v.items) {
        if (item.kind != TomlValue::Kind::String)
            throw ParseError(key + " entries must be strings", item.line, 1);
        out.push_back(item.str);
    }
    return out;
}

Rational value_as_number(const TomlValue& v, const std::string& key) {
    if (v.kind != TomlValue::Kind::Number)
        throw ParseError(key + " must be a number", v.line, 1);
    return v.num;
}

}  // namespace

ProblemSpec parse_problem_text(const std::string& text, const std::string& origin) {
    std::map<std::string, TomlValue> kv;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    static const std::set<std::string> known_sections = {"system", "domain", "params"};
    while (std::getline(in, raw)) {
        ++lineno;
        std::string s = trim(strip_comment(raw));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ParseError("malformed section header", lineno, 1);
            section = trim(s.substr(1, s.size() - 2));
            if (!known_sections.count(section))
                throw ParseError("unknown section [" + section + "]", lineno, 1);
            continue;
        }
        size_t eq = s.find('=');
        if (eq == std::string::npos) throw ParseError("expected key = value", lineno, 1);
        std::string key = trim(s.substr(0, eq));
        if (key.empty()) throw ParseError("empty key", lineno, 1);
        if (section.empty()) throw ParseError("key outside of a section", lineno, 1);
        std::string full = section + "." + key;
        if (kv.count(full)) throw ParseError("duplicate key " + full, lineno, 1);
        ValueParser vp(s.substr(eq + 1), lineno);
        kv.emplace(full, vp.parse_full());
    }

    static const std::set<std::string> known_keys = {
        "system.states", "system.f",    "domain.g",       "params.q",
        "params.lambda", "params.p",    "params.d",       "params.tau",
        "params.k",      "params.epsilon", "params.deg_v", "params.deg_mult",
        "params.mu_bracket"};
    for (const auto& [key, v] : kv)
        if (!known_keys.count(key)) throw ParseError("unknown key " + key, v.line, 1);

    auto require = [&](const std::string& key) -> const TomlValue& {
        auto it = kv.find(key);
        if (it == kv.end()) throw ParseError("missing required key " + key, 1, 1);
        return it->second;
    };
    auto lookup = [&](const std::string& key) -> const TomlValue* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    ProblemSpec spec;
    spec.origin = origin;
    spec.states = value_as_string_list(require("system.states"), "system.states");
    if (spec.states.empty()) throw ParseError("system.states must not be empty", 1, 1);
    {
        std::set<std::string> seen;
        for (const auto& name : spec.states) {
            if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_'))
                throw ParseError("invalid state name '" + name + "'", 1, 1);
            if (name == "sign" || name == "abs")
                throw ParseError("state name '" + name + "' is reserved", 1, 1);
            if (!seen.insert(name).second)
                throw ParseError("duplicate state name '" + name + "'", 1, 1);
        }
    }

    spec.f_text = value_as_string_list(require("system.f"), "system.f");
    if (spec.f_text.size() != spec.states.size())
        throw ParseError("system.f must have one component per state", 1, 1);
    for (const auto& comp : spec.f_text) spec.f.push_back(parse_expression(comp, spec.states));

    spec.g_text = value_as_string_list(require("domain.g"), "domain.g");
    for (const auto& gi : spec.g_text) spec.g.push_back(parse_polynomial(gi, spec.states));

    spec.p = value_as_int(require("params.p"), "params.p");
    spec.d = value_as_int(require("params.d"), "params.d");
    if (spec.p < 1) throw ParseError("params.p must be >= 1", 1, 1);
    if (spec.d < 1) throw ParseError("params.d must be >= 1", 1, 1);

    if (const TomlValue* v = lookup("params.q")) {
        auto qs = value_as_int_list(*v, "params.q");
        if (qs.size() != spec.states.size())
            throw ParseError("params.q must have one entry per state", v->line, 1);
        for (int qi : qs)
            if (qi < 1) throw ParseError("params.q entries must be >= 1", v->line, 1);
        spec.q = qs;
    }
    if (const TomlValue* v = lookup("params.lambda")) {
        auto ls = value_as_int_list(*v, "params.lambda");
        if (ls.size() != spec.states.size())
            throw ParseError("params.lambda must have one entry per state", v->line, 1);
        for (int li : ls)
            if (li < 0) throw ParseError("params.lambda entries must be >= 0", v->line, 1);
        spec.lambda = ls;
    }
    if (const TomlValue* v = lookup("params.tau")) {
        spec.tau = value_as_int(*v, "params.tau");
        if (*spec.tau < 1) throw ParseError("params.tau must be >= 1", v->line, 1);
    }
    if (const TomlValue* v = lookup("params.deg_v")) {
        spec.deg_v = value_as_int(*v, "params.deg_v");
        if (*spec.deg_v < 2 || *spec.deg_v % 2 != 0)
            throw ParseError("params.deg_v must be a positive even integer", v->line, 1);
    }
    if (const TomlValue* v = lookup("params.deg_mult")) {
        spec.deg_mult = value_as_int(*v, "params.deg_mult");
        if (*spec.deg_mult < 0 || *spec.deg_mult % 2 != 0)
            throw ParseError("params.deg_mult must be a nonnegative even integer", v->line, 1);
    }
    if (const TomlValue* v = lookup("params.k")) {
        spec.k = value_as_number(*v, "params.k");
        if (spec.k <= 0) throw ParseError("params.k must be positive", v->line, 1);
    }
    if (const TomlValue* v = lookup("params.epsilon")) {
        spec.epsilon = value_as_number(*v, "params.epsilon");
        if (spec.epsilon <= 0) throw ParseError("params.epsilon must be positive", v->line, 1);
    }
    if (const TomlValue* v = lookup("params.mu_bracket")) {
        if (v->kind != TomlValue::Kind::Array || v->items.size() != 2)
            throw ParseError("params.mu_bracket must be [lo, hi]", v->line, 1);
        spec.mu_lo = rat_to_double(value_as_number(v->items[0], "params.mu_bracket"));
        spec.mu_hi = rat_to_double(value_as_number(v->items[1], "params.mu_bracket"));
        if (spec.mu_lo < 0 || spec.mu_hi <= spec.mu_lo)
            throw ParseError("params.mu_bracket requires 0 <= lo < hi", v->line, 1);
    }
    return spec;
}

ProblemSpec load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open problem file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem_text(buf.str(), path);
}

}  // namespace ftscert
