#include "ttk/io.hpp"

#include <fstream>
#include <regex>
#include <sstream>

namespace ttk {

namespace {

struct Line {
    std::string keyword;
    std::string rest;
    int number;
};

std::string trim_ws(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<Line> split_lines(const std::string& text) {
    std::vector<Line> out;
    std::istringstream in(text);
    std::string raw;
    int n = 0;
    while (std::getline(in, raw)) {
        ++n;
        const std::string s = trim_ws(raw);
        if (s.empty() || s.rfind("//", 0) == 0) continue;
        const auto sp = s.find_first_of(" \t");
        if (sp == std::string::npos) {
            out.push_back({s, "", n});
        } else {
            out.push_back({s.substr(0, sp), trim_ws(s.substr(sp + 1)), n});
        }
    }
    return out;
}

/// Splits on whitespace outside brackets.
std::vector<std::string> tokens(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : s) {
        if (c == '(' || c == '{' || c == '[') ++depth;
        if (c == ')' || c == '}' || c == ']') --depth;
        if (depth == 0 && (c == ' ' || c == '\t')) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

/// Splits on `sep` outside brackets.
std::vector<std::string> split_top_level(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : s) {
        if (c == '(' || c == '{' || c == '[') ++depth;
        if (c == ')' || c == '}' || c == ']') --depth;
        if (depth == 0 && c == sep) {
            out.push_back(trim_ws(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim_ws(cur).empty() || !out.empty()) out.push_back(trim_ws(cur));
    return out;
}

[[noreturn]] void fail(const Line& l, const std::string& msg) {
    throw ParseError("line " + std::to_string(l.number) + ": " + msg, 0);
}

RankedAlphabet parse_alphabet(const Line& l) {
    RankedAlphabet a;
    for (const auto& tok : tokens(l.rest)) {
        const auto slash = tok.rfind('/');
        if (slash == std::string::npos || slash == 0 || slash + 1 == tok.size())
            fail(l, "expected symbol/rank, got '" + tok + "'");
        int rank = 0;
        try {
            rank = std::stoi(tok.substr(slash + 1));
        } catch (const std::exception&) {
            fail(l, "bad rank in '" + tok + "'");
        }
        a.add(tok.substr(0, slash), rank);
    }
    return a;
}

std::string alphabet_line(const std::string& kw, const RankedAlphabet& a) {
    std::string s = kw;
    for (const auto& [name, rank] : a.symbols()) s += " " + name + "/" + std::to_string(rank);
    return s + "\n";
}

std::optional<int> numbered(const std::string& name, char prefix) {
    if (name.size() < 2 || name[0] != prefix) return std::nullopt;
    for (std::size_t i = 1; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) return std::nullopt;
    return std::stoi(name.substr(1));
}

int variable_index(const RawTerm& r, int k) {
    if (!r.children.empty() || r.angle) throw ParseError("expected an input variable", r.pos);
    if (r.name == "x" && k == 1) return 1;
    auto i = numbered(r.name, 'x');
    if (!i || *i < 1 || *i > k) throw ParseError("invalid input variable '" + r.name + "'", r.pos);
    return *i;
}

Tree resolve_top_rhs(const Top& m, const RawTerm& r, int k) {
    if (r.angle) throw ParseError("angle-bracket call in a TOP rule", r.pos);
    if (m.has_state(r.name) && r.children.size() == 1) {
        const RawTerm& arg = r.children[0];
        if (arg.children.empty() && (arg.name == "x" || numbered(arg.name, 'x')))
            return Tree::call(r.name, {Tree::var(variable_index(arg, k))});
    }
    if (!m.output.contains(r.name)) throw ParseError("unknown output symbol or state '" + r.name + "'", r.pos);
    std::vector<Tree> kids;
    for (const auto& c : r.children) kids.push_back(resolve_top_rhs(m, c, k));
    return Tree::symbol(r.name, std::move(kids));
}

Tree resolve_mtt_rhs(const Mtt& m, const RawTerm& r, int k, int params) {
    if (r.angle) {
        std::vector<Tree> kids{Tree::var(variable_index(r.children[0], k))};
        for (std::size_t i = 1; i < r.children.size(); ++i)
            kids.push_back(resolve_mtt_rhs(m, r.children[i], k, params));
        if (!m.has_state(r.name)) throw ParseError("unknown state '" + r.name + "'", r.pos);
        return Tree::call(r.name, std::move(kids));
    }
    if (r.children.empty() && !m.output.contains(r.name)) {
        if (auto j = numbered(r.name, 'y')) return Tree::param(*j);
        if (r.name == "y" && params == 1) return Tree::param(1);
    }
    if (!m.output.contains(r.name)) throw ParseError("unknown output symbol '" + r.name + "'", r.pos);
    std::vector<Tree> kids;
    for (const auto& c : r.children) kids.push_back(resolve_mtt_rhs(m, c, k, params));
    return Tree::symbol(r.name, std::move(kids));
}

std::pair<std::string, std::string> split_arrow(const Line& l) {
    // The arrow is the first "->" outside brackets.
    int depth = 0;
    for (std::size_t i = 0; i + 1 < l.rest.size(); ++i) {
        const char c = l.rest[i];
        if (c == '(' || c == '{' || c == '[' || c == '<') ++depth;
        if (c == ')' || c == '}' || c == ']' || (c == '>' && depth > 0 && l.rest[i - 1] != '-')) --depth;
        if (depth == 0 && c == '-' && l.rest[i + 1] == '>')
            return {trim_ws(l.rest.substr(0, i)), trim_ws(l.rest.substr(i + 2))};
    }
    fail(l, "expected '->'");
}

}  // namespace

FileKind detect_kind(const std::string& text) {
    for (const Line& l : split_lines(text)) {
        if (l.keyword == "top") return FileKind::Top;
        if (l.keyword == "mtt") return FileKind::Mtt;
        if (l.keyword == "nta") return FileKind::Nta;
        fail(l, "expected 'top', 'mtt' or 'nta' header");
    }
    throw ParseError("empty input", 0);
}

Tree parse_top_rhs(const Top& m, const std::string& text, int k) {
    return resolve_top_rhs(m, parse_raw_term(text), k);
}

Tree parse_mtt_rhs(const Mtt& m, const std::string& text, int k, int params) {
    return resolve_mtt_rhs(m, parse_raw_term(text), k, params);
}

// ---------------------------------------------------------------------------
// Automata

namespace {

const std::regex& transition_re() {
    static const std::regex re(R"(^(.+?)\s+-(\S+)->\s*(.*)$)");
    return re;
}

void add_transition_line(TreeAutomaton& a, const Line& l, const std::string& text) {
    std::smatch mm;
    if (!std::regex_match(text, mm, transition_re())) fail(l, "malformed transition");
    std::vector<std::string> to;
    std::string targets = trim_ws(mm[3].str());
    if (!targets.empty()) {
        if (targets.front() != '(' || targets.back() != ')') fail(l, "targets must be parenthesized");
        to = split_top_level(targets.substr(1, targets.size() - 2), ',');
    }
    try {
        a.add_transition(trim_ws(mm[1].str()), mm[2].str(), std::move(to));
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        fail(l, e.what());
    }
}

std::string transition_line(const Transition& t) {
    std::string s = t.from + " -" + t.symbol + "-> (";
    for (std::size_t i = 0; i < t.to.size(); ++i) s += (i ? "," : "") + t.to[i];
    return s + ")";
}

}  // namespace

TreeAutomaton parse_nta(const std::string& text) {
    const auto lines = split_lines(text);
    if (lines.empty() || lines[0].keyword != "nta") throw ParseError("expected 'nta NAME' header", 0);
    std::string name = lines[0].rest.empty() ? "A" : lines[0].rest;
    std::optional<TreeAutomaton> a;
    std::vector<std::string> initial;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const Line& l = lines[i];
        if (l.keyword == "alphabet") {
            a.emplace(parse_alphabet(l), name);
        } else if (!a) {
            fail(l, "'alphabet' must come first");
        } else if (l.keyword == "states") {
            for (const auto& p : tokens(l.rest)) a->add_state(p);
        } else if (l.keyword == "initial") {
            for (const auto& p : tokens(l.rest)) initial.push_back(p);
        } else {
            add_transition_line(*a, l, l.keyword + " " + l.rest);
        }
    }
    if (!a) throw ParseError("missing alphabet", 0);
    for (const auto& p : initial) a->add_initial(p);
    return *a;
}

std::string print_nta(const TreeAutomaton& a) {
    std::string s = "nta " + a.name + "\n" + alphabet_line("alphabet", a.alphabet());
    s += "states";
    for (const auto& p : a.states()) s += " " + p;
    s += "\ninitial";
    for (const auto& p : a.initial()) s += " " + p;
    s += "\n";
    for (const Transition& t : a.transitions()) s += transition_line(t) + "\n";
    return s;
}

// ---------------------------------------------------------------------------
// TOP

Top parse_top(const std::string& text) {
    const auto lines = split_lines(text);
    if (lines.empty() || lines[0].keyword != "top") throw ParseError("expected 'top NAME' header", 0);
    Top m;
    m.name = lines[0].rest.empty() ? "M" : lines[0].rest;
    std::optional<TreeAutomaton> filter;
    std::vector<std::string> filter_initial;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const Line& l = lines[i];
        try {
            if (l.keyword == "input") {
                m.input = parse_alphabet(l);
            } else if (l.keyword == "output") {
                m.output = parse_alphabet(l);
            } else if (l.keyword == "states") {
                for (const auto& q : tokens(l.rest)) m.add_state(q);
            } else if (l.keyword == "initial") {
                for (const auto& q : tokens(l.rest)) m.add_initial(q);
            } else if (l.keyword == "rule") {
                const auto [lhs_text, rhs_text] = split_arrow(l);
                const RawTerm lhs = parse_raw_term(lhs_text);
                if (lhs.angle || lhs.children.size() != 1) fail(l, "left-hand side must be q(σ(x1,...,xk))");
                const RawTerm& sym = lhs.children[0];
                if (!m.input.contains(sym.name)) fail(l, "unknown input symbol '" + sym.name + "'");
                const int k = m.input.rank(sym.name);
                if (static_cast<int>(sym.children.size()) != k) fail(l, "arity mismatch for " + sym.name);
                for (int j = 0; j < k; ++j)
                    if (variable_index(sym.children[static_cast<std::size_t>(j)], k) != j + 1)
                        fail(l, "left-hand side variables must be x1..xk in order");
                m.add_rule(lhs.name, sym.name, parse_top_rhs(m, rhs_text, k));
            } else if (l.keyword == "filter-initial") {
                for (const auto& p : tokens(l.rest)) filter_initial.push_back(p);
            } else if (l.keyword == "filter") {
                if (!filter) filter.emplace(m.input, "filter");
                add_transition_line(*filter, l, l.rest);
            } else {
                fail(l, "unknown keyword '" + l.keyword + "'");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            fail(l, e.what());
        }
    }
    if (m.initial().empty()) throw ParseError("no initial state", 0);
    if (filter || !filter_initial.empty()) {
        if (!filter) filter.emplace(m.input, "filter");
        for (const auto& p : filter_initial) filter->add_initial(p);
        m.set_filter(std::move(filter));
    }
    return m;
}

std::string print_top(const Top& m) {
    std::string s = "top " + m.name + "\n" + alphabet_line("input", m.input) + alphabet_line("output", m.output);
    s += "states";
    for (const auto& q : m.states()) s += " " + q;
    s += "\ninitial";
    for (const auto& q : m.initial()) s += " " + q;
    s += "\n";
    for (const TopRule& r : m.rules()) s += "rule " + rule_string(r, m.input.rank(r.symbol)) + "\n";
    if (m.filter()) {
        s += "filter-initial";
        for (const auto& p : m.filter()->initial()) s += " " + p;
        s += "\n";
        for (const Transition& t : m.filter()->transitions()) s += "filter " + transition_line(t) + "\n";
    }
    return s;
}

// ---------------------------------------------------------------------------
// MTT

Mtt parse_mtt(const std::string& text) {
    const auto lines = split_lines(text);
    if (lines.empty() || lines[0].keyword != "mtt") throw ParseError("expected 'mtt NAME' header", 0);
    Mtt m;
    m.name = lines[0].rest.empty() ? "M" : lines[0].rest;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const Line& l = lines[i];
        try {
            if (l.keyword == "input") {
                m.input = parse_alphabet(l);
            } else if (l.keyword == "output") {
                m.output = parse_alphabet(l);
            } else if (l.keyword == "states") {
                for (const auto& tok : tokens(l.rest)) {
                    const auto slash = tok.rfind('/');
                    if (slash == std::string::npos) {
                        m.add_state(tok, 0);
                    } else {
                        m.add_state(tok.substr(0, slash), std::stoi(tok.substr(slash + 1)));
                    }
                }
            } else if (l.keyword == "initial") {
                m.set_initial(l.rest);
            } else if (l.keyword == "rule") {
                const auto [lhs_text, rhs_text] = split_arrow(l);
                const RawTerm lhs = parse_raw_term(lhs_text);
                if (!lhs.angle) fail(l, "left-hand side must be <q, σ(x1,...,xk)>(y1,...,ym)");
                const RawTerm& sym = lhs.children[0];
                if (!m.input.contains(sym.name)) fail(l, "unknown input symbol '" + sym.name + "'");
                const int k = m.input.rank(sym.name);
                if (static_cast<int>(sym.children.size()) != k) fail(l, "arity mismatch for " + sym.name);
                for (int j = 0; j < k; ++j)
                    if (variable_index(sym.children[static_cast<std::size_t>(j)], k) != j + 1)
                        fail(l, "left-hand side variables must be x1..xk in order");
                const int p = m.params(lhs.name);
                if (static_cast<int>(lhs.children.size()) - 1 != p)
                    fail(l, "state " + lhs.name + " takes " + std::to_string(p) + " parameters");
                for (int j = 1; j <= p; ++j) {
                    const RawTerm& y = lhs.children[static_cast<std::size_t>(j)];
                    const bool ok = y.children.empty() &&
                                    (numbered(y.name, 'y') == j || (y.name == "y" && p == 1));
                    if (!ok) fail(l, "left-hand side parameters must be y1..ym in order");
                }
                m.add_rule(lhs.name, sym.name, parse_mtt_rhs(m, rhs_text, k, p));
            } else {
                fail(l, "unknown keyword '" + l.keyword + "'");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            fail(l, e.what());
        }
    }
    if (m.initial().empty()) throw ParseError("no initial state", 0);
    return m;
}

std::string print_mtt(const Mtt& m) {
    std::string s = "mtt " + m.name + "\n" + alphabet_line("input", m.input) + alphabet_line("output", m.output);
    s += "states";
    for (const auto& q : m.states()) s += " " + q + "/" + std::to_string(m.params(q));
    s += "\ninitial " + m.initial() + "\n";
    for (const auto& [q, sym] : m.rule_keys()) s += "rule " + mtt_rule_string(m, q, sym) + "\n";
    return s;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

}  // namespace ttk
