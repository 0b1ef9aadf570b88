#include "ttk/mtt.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <set>

namespace ttk {

void Mtt::add_state(const std::string& q, int params) {
    if (q.empty()) throw Error("empty state name");
    if (params < 0) throw Error("negative parameter count for state " + q);
    auto [it, inserted] = params_.emplace(q, params);
    if (!inserted) {
        if (it->second != params) throw Error("state " + q + " declared with two parameter counts");
        return;
    }
    states_.push_back(q);
}

int Mtt::params(const std::string& q) const {
    auto it = params_.find(q);
    if (it == params_.end()) throw Error("unknown state " + q);
    return it->second;
}

void Mtt::set_initial(const std::string& q) {
    if (params(q) != 0) throw Error("initial state " + q + " must not have parameters");
    initial_ = q;
}

namespace {

void check_mtt_rhs(const Mtt& m, const Tree& t, int k, int params) {
    switch (t.kind()) {
    case Kind::Symbol:
        if (!m.output.contains(t.label())) throw Error("unknown output symbol " + t.label());
        if (m.output.rank(t.label()) != static_cast<int>(t.arity()))
            throw Error("output symbol " + t.label() + " used with wrong arity");
        for (const Tree& c : t.children()) check_mtt_rhs(m, c, k, params);
        return;
    case Kind::Param:
        if (t.index() < 1 || t.index() > params)
            throw Error("parameter y" + std::to_string(t.index()) + " out of range");
        return;
    case Kind::Call: {
        if (!m.has_state(t.label())) throw Error("call to undeclared state " + t.label());
        if (static_cast<int>(t.arity()) != m.params(t.label()) + 1)
            throw Error("call to " + t.label() + " with wrong number of arguments");
        const Tree& x = t.child(0);
        if (!x.is_var() || x.index() < 1 || x.index() > k)
            throw Error("call to " + t.label() + " on an invalid input variable");
        for (std::size_t i = 1; i < t.arity(); ++i) check_mtt_rhs(m, t.child(i), k, params);
        return;
    }
    case Kind::Var: throw Error("bare input variable in right-hand side");
    }
}

}  // namespace

void Mtt::add_rule(const std::string& q, const std::string& symbol, Tree rhs) {
    if (!has_state(q)) throw Error("rule for undeclared state " + q);
    if (!input.contains(symbol)) throw Error("rule on unknown input symbol " + symbol);
    check_mtt_rhs(*this, rhs, input.rank(symbol), params(q));
    auto key = std::make_pair(q, symbol);
    if (rules_.count(key)) throw Error("second rule for <" + q + ", " + symbol + ">");
    max_rhs_ = std::max(max_rhs_, rhs.size());
    rules_.emplace(key, std::move(rhs));
    order_.push_back(std::move(key));
}

bool Mtt::has_rule(const std::string& q, const std::string& symbol) const {
    return rules_.count({q, symbol}) != 0;
}

const Tree& Mtt::rhs(const std::string& q, const std::string& symbol) const {
    auto it = rules_.find({q, symbol});
    if (it == rules_.end()) throw Error("no rule for <" + q + ", " + symbol + ">");
    return it->second;
}

void Mtt::check_total() const {
    if (initial_.empty()) throw Error("no initial state");
    std::string missing;
    for (const auto& q : states_)
        for (const auto& [sym, _] : input.symbols())
            if (!has_rule(q, sym)) missing += " <" + q + "," + sym + ">";
    if (!missing.empty()) throw Error("transducer is not total; missing rules:" + missing);
}

std::vector<std::pair<std::string, int>> mtt_calls(const Tree& rhs) {
    std::vector<std::pair<std::string, int>> out;
    std::function<void(const Tree&)> walk = [&](const Tree& t) {
        if (t.is_call()) out.emplace_back(t.label(), t.child(0).index());
        for (const Tree& c : t.children()) walk(c);
    };
    walk(rhs);
    return out;
}

std::string mtt_rule_string(const Mtt& m, const std::string& q, const std::string& symbol) {
    const int k = m.input.rank(symbol);
    std::string s = "<" + q + ", " + symbol;
    if (k > 0) {
        s += '(';
        for (int i = 1; i <= k; ++i) s += (i > 1 ? ",x" : "x") + std::to_string(i);
        s += ')';
    }
    s += '>';
    const int p = m.params(q);
    if (p > 0) {
        s += '(';
        for (int j = 1; j <= p; ++j) s += (j > 1 ? ",y" : "y") + std::to_string(j);
        s += ')';
    }
    return s + " -> " + to_string(m.rhs(q, symbol), CallStyle::Mtt);
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

/// q-translations with memoization. A Var(0) input is a hole: q on it yields
/// the pending call <q,x>(y1..ym).
class MttEvaluator {
public:
    explicit MttEvaluator(const Mtt& m) : m_(m) {}

    const Tree& run(const std::string& q, const Tree& s) {
        auto key = std::make_pair(q, s);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        Tree out;
        if (s.is_var()) {
            std::vector<Tree> kids{s};
            for (int j = 1; j <= m_.params(q); ++j) kids.push_back(Tree::param(j));
            out = Tree::call(q, std::move(kids));
        } else {
            out = inst(m_.rhs(q, s.label()), s);
        }
        return memo_.emplace(std::move(key), std::move(out)).first->second;
    }

private:
    Tree inst(const Tree& rhs, const Tree& s) {
        switch (rhs.kind()) {
        case Kind::Param: return rhs;
        case Kind::Call: {
            std::vector<Tree> args;
            for (std::size_t i = 1; i < rhs.arity(); ++i) args.push_back(inst(rhs.child(i), s));
            const Tree& sub = s.child(static_cast<std::size_t>(rhs.child(0).index() - 1));
            return substitute_params(run(rhs.label(), sub), args);
        }
        default: {
            std::vector<Tree> kids;
            for (const Tree& c : rhs.children()) kids.push_back(inst(c, s));
            return Tree::symbol(rhs.label(), std::move(kids));
        }
        }
    }

    const Mtt& m_;
    std::map<std::pair<std::string, Tree>, Tree> memo_;
};

void require_input(const Mtt& m, const Tree& s) {
    if (!conforms(s, m.input)) throw Error("input " + to_string(s) + " is not over the input alphabet");
}

}  // namespace

Tree q_translation(const Mtt& m, const std::string& q, const Tree& s) {
    require_input(m, s);
    MttEvaluator ev(m);
    return ev.run(q, s);
}

Tree evaluate(const Mtt& m, const Tree& s) { return q_translation(m, m.initial(), s); }

namespace {

struct ONode {
    std::string label;
    int param = 0;
    Path origin;
    std::vector<std::shared_ptr<const ONode>> kids;
    bool has_param = false;
};
using ONodePtr = std::shared_ptr<const ONode>;

class OriginEvaluator {
public:
    OriginEvaluator(const Mtt& m, const Tree& s) : m_(m), s_(s) {}

    ONodePtr run(const std::string& q, const Path& u) {
        auto key = std::make_pair(q, u);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        const Tree& node = navigate(s_, u);
        ONodePtr out = inst(m_.rhs(q, node.label()), u);
        memo_.emplace(std::move(key), out);
        return out;
    }

private:
    ONodePtr inst(const Tree& rhs, const Path& u) {
        auto n = std::make_shared<ONode>();
        switch (rhs.kind()) {
        case Kind::Param:
            n->param = rhs.index();
            n->has_param = true;
            return n;
        case Kind::Call: {
            std::vector<ONodePtr> args;
            for (std::size_t i = 1; i < rhs.arity(); ++i) args.push_back(inst(rhs.child(i), u));
            return subst(run(rhs.label(), u.child(rhs.child(0).index())), args);
        }
        default:
            n->label = rhs.label();
            n->origin = u;
            for (const Tree& c : rhs.children()) {
                n->kids.push_back(inst(c, u));
                n->has_param = n->has_param || n->kids.back()->has_param;
            }
            return n;
        }
    }

    static ONodePtr subst(const ONodePtr& t, const std::vector<ONodePtr>& args) {
        if (!t->has_param) return t;
        if (t->param > 0) return args.at(static_cast<std::size_t>(t->param - 1));
        auto n = std::make_shared<ONode>(*t);
        n->has_param = false;
        for (auto& k : n->kids) {
            k = subst(k, args);
            n->has_param = n->has_param || k->has_param;
        }
        return n;
    }

    const Mtt& m_;
    const Tree& s_;
    std::map<std::pair<std::string, Path>, ONodePtr> memo_;
};

Tree flatten(const ONodePtr& n, const Path& p, std::map<Path, Path>& origin) {
    origin[p] = n->origin;
    std::vector<Tree> kids;
    for (std::size_t i = 0; i < n->kids.size(); ++i)
        kids.push_back(flatten(n->kids[i], p.child(static_cast<int>(i + 1)), origin));
    return Tree::symbol(n->label, std::move(kids));
}

}  // namespace

OriginTree evaluate_with_origin(const Mtt& m, const Tree& s) {
    require_input(m, s);
    OriginEvaluator ev(m, s);
    OriginTree out;
    out.output = flatten(ev.run(m.initial(), Path{}), Path{}, out.origin);
    return out;
}

bool is_one_to_one_on(const Mtt& m, const Tree& s) {
    const OriginTree o = evaluate_with_origin(m, s);
    if (static_cast<int>(o.origin.size()) != s.node_count()) return false;
    std::set<Path> hit;
    for (const auto& [_, src] : o.origin)
        if (!hit.insert(src).second) return false;
    return true;
}

std::optional<Tree> check_one_to_one(const Mtt& m, int max_height) {
    for (const Tree& t : enumerate_trees(m.input, max_height))
        if (!is_one_to_one_on(m, t)) return t;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// State sequences and delays

namespace {

std::vector<std::string> hole_sequence(const Tree& out) {
    std::vector<std::string> seq;
    std::function<void(const Tree&)> walk = [&](const Tree& t) {
        if (t.is_call() && t.child(0).is_var()) seq.push_back(t.label());
        for (const Tree& c : t.children()) walk(c);
    };
    walk(out);
    return seq;
}

}  // namespace

std::vector<std::string> state_sequence(const Mtt& m, const Tree& s, const Path& u) {
    require_input(m, s);
    if (!valid_path(s, u)) throw Error("invalid path " + u.str());
    MttEvaluator ev(m);
    return hole_sequence(ev.run(m.initial(), graft(s, u, Tree::var(0))));
}

int delay(const Mtt& m, const Tree& s, const Path& u) {
    const auto seq = state_sequence(m, s, u);
    const Tree& sub = navigate(s, u);
    MttEvaluator ev(m);
    int total = 0;
    for (const auto& q : seq) total += ev.run(q, sub).size();
    return total - sub.size();
}

std::optional<int> DelayTable::lookup(const std::string& label, const std::vector<std::string>& seq) const {
    for (const auto& e : entries)
        if ((e.label == "*" || e.label == label) && e.sequence == seq) return e.delay;
    return std::nullopt;
}

DelayTable build_delay_table(const Mtt& m, int max_height, bool by_label) {
    m.check_total();
    DelayTable table;
    std::map<std::pair<std::string, std::vector<std::string>>, std::size_t> index;
    MttEvaluator ev(m);
    std::size_t max_seq = 1;
    for (const Tree& t : enumerate_trees(m.input, max_height)) {
        for (const Path& u : nodes(t)) {
            const Tree& sub = navigate(t, u);
            MttEvaluator hole(m);
            const auto seq = hole_sequence(hole.run(m.initial(), graft(t, u, Tree::var(0))));
            int d = -sub.size();
            for (const auto& q : seq) d += ev.run(q, sub).size();
            max_seq = std::max(max_seq, seq.size());
            const std::string label = by_label ? sub.label() : "*";
            auto [it, inserted] = index.emplace(std::make_pair(label, seq), table.entries.size());
            if (inserted) {
                table.entries.push_back({label, seq, d, t, u});
                table.b = std::max(table.b, std::abs(d));
                continue;
            }
            const DelayEntry& e = table.entries[it->second];
            if (e.delay != d) {
                std::string s;
                for (const auto& q : seq) s += (s.empty() ? "" : ",") + q;
                throw Error("inconsistent delay for sequence (" + s + "): " + std::to_string(e.delay) +
                            " at " + to_string(e.witness) + " path " + e.at.str() + ", " +
                            std::to_string(d) + " at " + to_string(t) + " path " + u.str());
            }
        }
    }
    const double labels = static_cast<double>(m.input.size()) * static_cast<double>(table.entries.size());
    table.theoretical_bound = static_cast<double>(max_seq) * std::max(1, m.max_rhs()) *
                              std::pow(m.input.max_rank() + 1.0, labels);
    return table;
}

ParamReport param_discipline_check(const Mtt& m) {
    ParamReport r;
    for (const auto& [q, sym] : m.rule_keys()) {
        const Tree& rhs = m.rhs(q, sym);
        const std::string where = "<" + q + ", " + sym + ">";
        const int p = m.params(q);
        std::vector<int> uses(static_cast<std::size_t>(p) + 1, 0);
        std::function<void(const Tree&)> walk = [&](const Tree& t) {
            if (t.is_param()) ++uses[static_cast<std::size_t>(t.index())];
            for (const Tree& c : t.children()) walk(c);
        };
        walk(rhs);
        for (int j = 1; j <= p; ++j) {
            const int n = uses[static_cast<std::size_t>(j)];
            if (n == 0) r.violations.push_back(where + ": parameter y" + std::to_string(j) + " deleted");
            if (n > 1) r.violations.push_back(where + ": parameter y" + std::to_string(j) + " copied");
        }
        const int k = m.input.rank(sym);
        std::vector<int> visits(static_cast<std::size_t>(k) + 1, 0);
        for (const auto& [_, i] : mtt_calls(rhs)) ++visits[static_cast<std::size_t>(i)];
        for (int i = 1; i <= k; ++i)
            if (visits[static_cast<std::size_t>(i)] == 0)
                r.violations.push_back(where + ": input x" + std::to_string(i) + " not visited");
        if (rhs.is_param()) r.erasing.push_back(where);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Prefixes

namespace {

Tree cut(const Tree& t, int depth, int b, int& next) {
    if (t.is_param()) return t;
    if (depth == b + 1 || t.is_var()) return Tree::var(next++);
    std::vector<Tree> kids;
    for (const Tree& c : t.children()) kids.push_back(cut(c, depth + 1, b, next));
    if (t.is_call()) return Tree::call(t.label(), std::move(kids));
    return Tree::symbol(t.label(), std::move(kids));
}

}  // namespace

Tree prefix_cut(const Tree& t, int b) {
    if (b < 1) throw Error("prefix bound must be at least 1");
    int next = 1;
    return cut(t, 1, b, next);
}

int PrefixTable::class_of(const Tree& t) const {
    std::vector<int> kids;
    for (const Tree& c : t.children()) kids.push_back(class_of(c));
    auto it = transitions.find({t.label(), kids});
    if (it == transitions.end()) throw Error("no prefix class for " + to_string(t));
    return it->second;
}

const Tree& PrefixTable::prefix(int cls, const std::string& q) const {
    auto it = std::find(states.begin(), states.end(), q);
    if (it == states.end()) throw Error("unknown state " + q);
    return classes.at(static_cast<std::size_t>(cls)).at(static_cast<std::size_t>(it - states.begin()));
}

PrefixTable build_prefix_table(const Mtt& m, int b, std::size_t cap) {
    m.check_total();
    PrefixTable table;
    table.b = b;
    table.states = m.states();
    std::map<std::vector<Tree>, int> ids;
    auto state_index = [&](const std::string& q) {
        return static_cast<std::size_t>(std::find(table.states.begin(), table.states.end(), q) -
                                        table.states.begin());
    };
    auto combine = [&](const std::string& sym, const std::vector<int>& kids) {
        std::vector<Tree> tuple;
        for (const auto& q : table.states) {
            std::function<Tree(const Tree&)> inst = [&](const Tree& r) -> Tree {
                switch (r.kind()) {
                case Kind::Param: return r;
                case Kind::Call: {
                    std::vector<Tree> args;
                    for (std::size_t i = 1; i < r.arity(); ++i) args.push_back(inst(r.child(i)));
                    const int c = kids[static_cast<std::size_t>(r.child(0).index() - 1)];
                    return substitute_params(
                        table.classes[static_cast<std::size_t>(c)][state_index(r.label())], args);
                }
                default: {
                    std::vector<Tree> ch;
                    for (const Tree& c : r.children()) ch.push_back(inst(c));
                    return Tree::symbol(r.label(), std::move(ch));
                }
                }
            };
            tuple.push_back(prefix_cut(inst(m.rhs(q, sym)), b));
        }
        auto [it, inserted] = ids.emplace(tuple, static_cast<int>(table.classes.size()));
        if (inserted) {
            if (table.classes.size() >= cap)
                throw CapExceeded("prefix classes exceeded cap of " + std::to_string(cap));
            table.classes.push_back(std::move(tuple));
        }
        table.transitions[{sym, kids}] = it->second;
    };
    for (bool changed = true; changed;) {
        changed = false;
        const std::size_t known = table.classes.size();
        for (const auto& [sym, rank] : m.input.symbols()) {
            std::vector<int> kids(static_cast<std::size_t>(rank));
            std::function<void(int)> fill = [&](int i) {
                if (i == rank) {
                    if (!table.transitions.count({sym, kids})) {
                        combine(sym, kids);
                        changed = true;
                    }
                    return;
                }
                for (int c = 0; c < static_cast<int>(known); ++c) {
                    kids[static_cast<std::size_t>(i)] = c;
                    fill(i + 1);
                }
            };
            fill(0);
        }
    }
    return table;
}

}  // namespace ttk
