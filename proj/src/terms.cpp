#include "ttk/terms.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

namespace ttk {

RankedAlphabet::RankedAlphabet(std::initializer_list<std::pair<const std::string, int>> init) {
    for (const auto& [name, rank] : init) add(name, rank);
}

void RankedAlphabet::add(const std::string& name, int rank) {
    if (name.empty()) throw Error("empty symbol name");
    if (rank < 0) throw Error("negative rank for symbol " + name);
    auto [it, inserted] = ranks_.emplace(name, rank);
    if (!inserted && it->second != rank)
        throw Error("symbol " + name + " declared with ranks " + std::to_string(it->second) +
                    " and " + std::to_string(rank));
}

int RankedAlphabet::rank(const std::string& name) const {
    auto it = ranks_.find(name);
    if (it == ranks_.end()) throw Error("unknown symbol " + name);
    return it->second;
}

int RankedAlphabet::max_rank() const {
    int m = 0;
    for (const auto& [_, r] : ranks_) m = std::max(m, r);
    return m;
}

bool RankedAlphabet::has_constant() const {
    return std::any_of(ranks_.begin(), ranks_.end(), [](const auto& e) { return e.second == 0; });
}

std::string shape_symbol(int rank) { return "#" + std::to_string(rank); }

RankedAlphabet shape_alphabet(int max_rank) {
    RankedAlphabet psi;
    for (int k = 0; k <= max_rank; ++k) psi.add(shape_symbol(k), k);
    return psi;
}

// ---------------------------------------------------------------------------
// Tree

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

Tree::Tree() : Tree(make(Kind::Symbol, "?", 0, {})) {}

Tree Tree::make(Kind kind, std::string label, int index, std::vector<Tree> children) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->label = std::move(label);
    n->index = index;
    n->children = std::move(children);
    std::size_t h = mix(static_cast<std::size_t>(kind), std::hash<std::string>{}(n->label));
    h = mix(h, static_cast<std::size_t>(index));
    int height = 0, count = 1, syms = kind == Kind::Symbol ? 1 : 0;
    bool ground = kind == Kind::Symbol;
    for (const Tree& c : n->children) {
        h = mix(h, c.hash());
        height = std::max(height, c.height());
        count += c.node_count();
        syms += c.size();
        ground = ground && c.ground();
    }
    n->hash = h;
    n->height = height + 1;
    n->nodes = count;
    n->symbols = syms;
    n->ground = ground;
    return Tree(std::shared_ptr<const Node>(std::move(n)));
}

Tree Tree::symbol(std::string name, std::vector<Tree> children) {
    return make(Kind::Symbol, std::move(name), 0, std::move(children));
}
Tree Tree::var(int index) { return make(Kind::Var, "", index, {}); }
Tree Tree::param(int index) { return make(Kind::Param, "", index, {}); }
Tree Tree::call(std::string state, std::vector<Tree> children) {
    if (children.empty()) throw Error("state call without input argument");
    return make(Kind::Call, std::move(state), 0, std::move(children));
}

bool operator==(const Tree& a, const Tree& b) noexcept {
    if (a.node_ == b.node_) return true;
    if (a.hash() != b.hash()) return false;
    return (a <=> b) == std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const Tree& a, const Tree& b) noexcept {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (auto c = a.kind() <=> b.kind(); c != 0) return c;
    if (auto c = a.label().compare(b.label()); c != 0) return c <=> 0;
    if (auto c = a.index() <=> b.index(); c != 0) return c;
    const auto ac = a.children(), bc = b.children();
    const std::size_t n = std::min(ac.size(), bc.size());
    for (std::size_t i = 0; i < n; ++i)
        if (auto c = ac[i] <=> bc[i]; c != 0) return c;
    return ac.size() <=> bc.size();
}

bool enumeration_less(const Tree& a, const Tree& b) noexcept {
    if (a.height() != b.height()) return a.height() < b.height();
    return a < b;
}

// ---------------------------------------------------------------------------
// Path

Path Path::parse(const std::string& text) {
    if (text == "eps" || text.empty()) return {};
    std::vector<int> steps;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t j = i;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        if (j == i) throw ParseError("expected child index in path '" + text + "'", i);
        int step = std::stoi(text.substr(i, j - i));
        if (step < 1) throw ParseError("child indices start at 1", i);
        steps.push_back(step);
        if (j < text.size()) {
            if (text[j] != '.') throw ParseError("expected '.' in path '" + text + "'", j);
            ++j;
            if (j == text.size()) throw ParseError("trailing '.' in path", j);
        }
        i = j;
    }
    return Path(std::move(steps));
}

std::string Path::str() const {
    if (steps_.empty()) return "eps";
    std::string s;
    for (std::size_t i = 0; i < steps_.size(); ++i) {
        if (i) s += '.';
        s += std::to_string(steps_[i]);
    }
    return s;
}

Path Path::child(int i) const {
    auto s = steps_;
    s.push_back(i);
    return Path(std::move(s));
}

Path Path::concat(const Path& other) const {
    auto s = steps_;
    s.insert(s.end(), other.steps_.begin(), other.steps_.end());
    return Path(std::move(s));
}

bool Path::is_prefix_of(const Path& other) const noexcept {
    return steps_.size() <= other.steps_.size() &&
           std::equal(steps_.begin(), steps_.end(), other.steps_.begin());
}

Path Path::suffix_after(const Path& prefix) const {
    if (!prefix.is_prefix_of(*this)) throw Error(prefix.str() + " is not a prefix of " + str());
    return Path(std::vector<int>(steps_.begin() + static_cast<long>(prefix.length()), steps_.end()));
}

// ---------------------------------------------------------------------------
// Printing

namespace {

void print(const Tree& t, CallStyle style, std::string& out) {
    switch (t.kind()) {
    case Kind::Var:
        out += t.index() == 0 ? std::string("x") : "x" + std::to_string(t.index());
        return;
    case Kind::Param:
        out += "y" + std::to_string(t.index());
        return;
    case Kind::Symbol:
        out += t.label();
        if (t.arity() > 0) {
            out += '(';
            for (std::size_t i = 0; i < t.arity(); ++i) {
                if (i) out += ',';
                print(t.child(i), style, out);
            }
            out += ')';
        }
        return;
    case Kind::Call:
        if (style == CallStyle::Top && t.arity() == 1) {
            out += t.label();
            out += '(';
            print(t.child(0), style, out);
            out += ')';
            return;
        }
        out += '<';
        out += t.label();
        out += ',';
        print(t.child(0), style, out);
        out += '>';
        if (t.arity() > 1) {
            out += '(';
            for (std::size_t i = 1; i < t.arity(); ++i) {
                if (i > 1) out += ',';
                print(t.child(i), style, out);
            }
            out += ')';
        }
        return;
    }
}

}  // namespace

std::string to_string(const Tree& t, CallStyle style) {
    std::string out;
    print(t, style, out);
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

bool name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$' || c == '#';
}
bool name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

void skip_ws(const std::string& s, std::size_t& pos) {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
}

// A bracketed name such as "(q,n)" or "{q1,q2}": everything up to the
// matching closing bracket, taken verbatim.
std::string read_bracketed(const std::string& s, std::size_t& pos) {
    const std::size_t start = pos;
    int depth = 0;
    do {
        const char c = s[pos];
        if (c == '(' || c == '{' || c == '[') ++depth;
        if (c == ')' || c == '}' || c == ']') --depth;
        ++pos;
    } while (pos < s.size() && depth > 0);
    if (depth != 0) throw ParseError("unbalanced bracket in name", start);
    return s.substr(start, pos - start);
}

std::string read_name(const std::string& s, std::size_t& pos) {
    skip_ws(s, pos);
    if (pos >= s.size()) throw ParseError("unexpected end of input, expected a name", pos);
    if (s[pos] == '(' || s[pos] == '{') return read_bracketed(s, pos);
    if (!name_start(s[pos]))
        throw ParseError(std::string("unexpected character '") + s[pos] + "'", pos);
    const std::size_t start = pos++;
    while (pos < s.size() && name_char(s[pos])) ++pos;
    return s.substr(start, pos - start);
}

void expect(const std::string& s, std::size_t& pos, char c) {
    skip_ws(s, pos);
    if (pos >= s.size() || s[pos] != c)
        throw ParseError(std::string("expected '") + c + "'", pos);
    ++pos;
}

std::vector<RawTerm> parse_args(const std::string& s, std::size_t& pos) {
    std::vector<RawTerm> args;
    expect(s, pos, '(');
    skip_ws(s, pos);
    if (pos < s.size() && s[pos] == ')') {
        ++pos;
        return args;
    }
    for (;;) {
        args.push_back(parse_raw_term(s, pos));
        skip_ws(s, pos);
        if (pos < s.size() && s[pos] == ',') {
            ++pos;
            continue;
        }
        expect(s, pos, ')');
        return args;
    }
}

}  // namespace

RawTerm parse_raw_term(const std::string& text, std::size_t& pos) {
    skip_ws(text, pos);
    RawTerm t;
    t.pos = pos;
    if (pos < text.size() && text[pos] == '<') {
        ++pos;
        t.angle = true;
        t.name = read_name(text, pos);
        expect(text, pos, ',');
        t.children.push_back(parse_raw_term(text, pos));
        expect(text, pos, '>');
        skip_ws(text, pos);
        if (pos < text.size() && text[pos] == '(') {
            for (auto& a : parse_args(text, pos)) t.children.push_back(std::move(a));
        }
        return t;
    }
    t.name = read_name(text, pos);
    skip_ws(text, pos);
    if (pos < text.size() && text[pos] == '(') t.children = parse_args(text, pos);
    return t;
}

RawTerm parse_raw_term(const std::string& text) {
    std::size_t pos = 0;
    RawTerm t = parse_raw_term(text, pos);
    skip_ws(text, pos);
    if (pos != text.size()) throw ParseError("trailing input after term", pos);
    return t;
}

namespace {

Tree resolve_ground(const RawTerm& r, const RankedAlphabet& alphabet) {
    if (r.angle) throw ParseError("state call in ground tree", r.pos);
    if (!alphabet.contains(r.name)) throw ParseError("unknown symbol '" + r.name + "'", r.pos);
    const int rank = alphabet.rank(r.name);
    if (static_cast<int>(r.children.size()) != rank)
        throw ParseError("arity mismatch: '" + r.name + "' has rank " + std::to_string(rank) +
                             " but " + std::to_string(r.children.size()) + " children",
                         r.pos);
    std::vector<Tree> kids;
    kids.reserve(r.children.size());
    for (const auto& c : r.children) kids.push_back(resolve_ground(c, alphabet));
    return Tree::symbol(r.name, std::move(kids));
}

}  // namespace

Tree parse_tree(const std::string& text, const RankedAlphabet& alphabet) {
    return resolve_ground(parse_raw_term(text), alphabet);
}

bool conforms(const Tree& t, const RankedAlphabet& alphabet) {
    if (!t.is_symbol()) return false;
    if (!alphabet.contains(t.label()) || alphabet.rank(t.label()) != static_cast<int>(t.arity()))
        return false;
    for (const Tree& c : t.children())
        if (!conforms(c, alphabet)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Operations

Tree shape(const Tree& t) {
    if (!t.is_symbol()) throw Error("shape of a tree containing variables, parameters or calls");
    std::vector<Tree> kids;
    kids.reserve(t.arity());
    for (const Tree& c : t.children()) kids.push_back(shape(c));
    return Tree::symbol(shape_symbol(static_cast<int>(t.arity())), std::move(kids));
}

bool valid_path(const Tree& t, const Path& u) { return try_navigate(t, u).has_value(); }

std::optional<Tree> try_navigate(const Tree& t, const Path& u) {
    const Tree* cur = &t;
    for (int step : u.steps()) {
        if (step < 1 || static_cast<std::size_t>(step) > cur->arity()) return std::nullopt;
        cur = &cur->child(static_cast<std::size_t>(step - 1));
    }
    return *cur;
}

const Tree& navigate(const Tree& t, const Path& u) {
    const Tree* cur = &t;
    for (int step : u.steps()) {
        if (step < 1 || static_cast<std::size_t>(step) > cur->arity())
            throw Error("invalid path " + u.str() + " in " + to_string(t));
        cur = &cur->child(static_cast<std::size_t>(step - 1));
    }
    return *cur;
}

namespace {

Tree rebuild(const Tree& t, std::vector<Tree> kids) {
    switch (t.kind()) {
    case Kind::Symbol: return Tree::symbol(t.label(), std::move(kids));
    case Kind::Call: return Tree::call(t.label(), std::move(kids));
    default: return t;
    }
}

Tree graft_at(const Tree& t, std::span<const int> steps, const Tree& r, const Path& full) {
    if (steps.empty()) return r;
    const int step = steps.front();
    if (step < 1 || static_cast<std::size_t>(step) > t.arity())
        throw Error("invalid path " + full.str() + " for graft");
    std::vector<Tree> kids(t.children().begin(), t.children().end());
    kids[static_cast<std::size_t>(step - 1)] =
        graft_at(kids[static_cast<std::size_t>(step - 1)], steps.subspan(1), r, full);
    return rebuild(t, std::move(kids));
}

}  // namespace

Tree graft(const Tree& t, const Path& u, const Tree& replacement) {
    return graft_at(t, u.steps(), replacement, u);
}

std::vector<Path> nodes(const Tree& t) {
    std::vector<Path> out;
    std::function<void(const Tree&, const Path&)> walk = [&](const Tree& n, const Path& p) {
        out.push_back(p);
        for (std::size_t i = 0; i < n.arity(); ++i) walk(n.child(i), p.child(static_cast<int>(i + 1)));
    };
    walk(t, Path{});
    return out;
}

Tree substitute(const Tree& t, const Substitution& s) {
    if (t.is_var()) {
        auto it = s.vars.find(t.index());
        return it == s.vars.end() ? t : it->second;
    }
    if (t.is_param()) {
        auto it = s.params.find(t.index());
        return it == s.params.end() ? t : it->second;
    }
    if (t.ground()) return t;
    std::vector<Tree> kids;
    kids.reserve(t.arity());
    for (const Tree& c : t.children()) kids.push_back(substitute(c, s));
    return rebuild(t, std::move(kids));
}

Tree substitute_vars(const Tree& t, std::span<const Tree> xs) {
    Substitution s;
    for (std::size_t i = 0; i < xs.size(); ++i) s.vars.emplace(static_cast<int>(i + 1), xs[i]);
    return substitute(t, s);
}

Tree substitute_params(const Tree& t, std::span<const Tree> ys) {
    Substitution s;
    for (std::size_t i = 0; i < ys.size(); ++i) s.params.emplace(static_cast<int>(i + 1), ys[i]);
    return substitute(t, s);
}

std::vector<Tree> enumerate_trees(const RankedAlphabet& alphabet, int max_height) {
    // by_height[h] holds all trees of height exactly h+1.
    std::vector<std::vector<Tree>> by_height;
    std::vector<Tree> upto;  // all trees of height <= current level - 1
    for (int h = 1; h <= max_height; ++h) {
        std::vector<Tree> level;
        for (const auto& [name, rank] : alphabet.symbols()) {
            if (rank == 0) {
                if (h == 1) level.push_back(Tree::symbol(name));
                continue;
            }
            if (h == 1 || upto.empty()) continue;
            // children of height <= h-1 with at least one of height exactly h-1
            const auto& top = by_height[static_cast<std::size_t>(h - 2)];
            std::vector<Tree> kids(static_cast<std::size_t>(rank));
            std::function<void(int, bool)> fill = [&](int i, bool hit) {
                if (i == rank) {
                    if (hit) level.push_back(Tree::symbol(name, kids));
                    return;
                }
                for (const Tree& c : upto) {
                    kids[static_cast<std::size_t>(i)] = c;
                    fill(i + 1, hit || c.height() == h - 1);
                }
            };
            if (!top.empty()) fill(0, false);
        }
        std::sort(level.begin(), level.end());
        upto.insert(upto.end(), level.begin(), level.end());
        by_height.push_back(std::move(level));
        if (by_height.back().empty()) break;
    }
    std::sort(upto.begin(), upto.end(), enumeration_less);
    return upto;
}

}  // namespace ttk
