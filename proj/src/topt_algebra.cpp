#include "ttk/topt_algebra.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "ttk/obligations.hpp"

namespace ttk {

TreeAutomaton domain_automaton(const Top& m) {
    const TreeAutomaton* filter = m.filter() ? &*m.filter() : nullptr;
    ObligationExplorer ex(m, filter);
    std::vector<int> roots;
    for (const auto& q : m.initial()) {
        if (filter) {
            for (const auto& p : filter->initial())
                roots.push_back(ex.intern({Obligation::dom(q), Obligation::aut(p)}));
        } else {
            roots.push_back(ex.intern({Obligation::dom(q)}));
        }
    }
    return ex.automaton(roots, "dom_" + m.name);
}

TreeAutomaton domain_automaton_for_state(const Top& m, const std::string& q) {
    return intersection_automaton(m, {q});
}

TreeAutomaton intersection_automaton(const Top& m, const std::set<std::string>& s) {
    ObligationExplorer ex(m);
    ObligationSet root;
    for (const auto& q : s) {
        if (!m.has_state(q)) throw Error("unknown state " + q);
        root.insert(Obligation::dom(q));
    }
    return ex.automaton({ex.intern(root)}, "I");
}

Top trim(const Top& m) {
    const StateSetsResult r = analyze_state_sets(m);
    std::set<std::string> keep;
    for (const auto& s : r.sets) keep.insert(s.begin(), s.end());
    Top out(m.name, m.input, m.output);
    for (const auto& q : m.states())
        if (keep.count(q)) out.add_state(q);
    for (const auto& q : m.initial())
        if (keep.count(q)) out.add_initial(q);
    for (std::size_t i = 0; i < m.rules().size(); ++i)
        if (r.used_rules.count(i)) {
            const TopRule& rule = m.rules()[i];
            out.add_rule(rule.state, rule.symbol, rule.rhs);
        }
    out.set_filter(m.filter());
    return out;
}

namespace {

std::string pair_name(const std::string& a, const std::string& b) { return "(" + a + "," + b + ")"; }

Tree map_calls(const Tree& rhs, const std::function<Tree(const std::string&, int)>& f) {
    if (rhs.is_call()) return f(rhs.label(), rhs.child(0).index());
    std::vector<Tree> kids;
    for (const Tree& c : rhs.children()) kids.push_back(map_calls(c, f));
    return Tree::symbol(rhs.label(), std::move(kids));
}

}  // namespace

Top restrict(const Top& m, const TreeAutomaton& a) {
    if (!(a.alphabet() == m.input)) throw Error("restrict: automaton alphabet differs from input alphabet");
    Top out(m.name + "|" + a.name, m.input, m.output);
    std::vector<std::pair<std::string, std::string>> work;
    std::set<std::pair<std::string, std::string>> seen;
    auto visit = [&](const std::string& q, const std::string& p) {
        const std::string n = pair_name(q, p);
        out.add_state(n);
        if (seen.insert({q, p}).second) work.emplace_back(q, p);
        return n;
    };
    for (const auto& q : m.initial())
        for (const auto& p : a.initial()) out.add_initial(visit(q, p));
    std::vector<std::tuple<std::string, std::string, Tree>> pending;
    for (std::size_t w = 0; w < work.size(); ++w) {
        const auto [q, p] = work[w];
        for (const auto& [sym, rank] : m.input.symbols()) {
            for (std::size_t r : m.rules_for(q, sym))
                for (const Transition* tr : a.transitions_from(p, sym)) {
                    Tree rhs = map_calls(m.rules()[r].rhs, [&](const std::string& q2, int i) {
                        return Tree::call(visit(q2, tr->to[static_cast<std::size_t>(i - 1)]), {Tree::var(i)});
                    });
                    pending.emplace_back(pair_name(q, p), sym, std::move(rhs));
                }
        }
    }
    for (auto& [q, sym, rhs] : pending) out.add_rule(q, sym, std::move(rhs));
    // Deleted subtrees escape the product; keep the automaton as a filter.
    if (!predicates(m).nondeleting) {
        out.set_filter(m.filter() ? product(*m.filter(), a) : a);
    } else {
        out.set_filter(m.filter());
    }
    return out;
}

Top compose_dlnt(const Top& m, const Top& n) {
    const TopPredicates p = predicates(n);
    if (!p.total || !p.deterministic || !p.linear || !p.nondeleting)
        throw Error("compose_dlnt: second transducer must be total, deterministic, linear and nondeleting");
    for (const auto& [sym, rank] : m.output.symbols())
        if (!n.input.contains(sym) || n.input.rank(sym) != rank)
            throw Error("compose_dlnt: output symbol " + sym + " not in the second input alphabet");
    Top out(m.name + ";" + n.name, m.input, n.output);
    std::vector<std::pair<std::string, std::string>> work;
    std::set<std::pair<std::string, std::string>> seen;
    auto visit = [&](const std::string& qm, const std::string& qn) {
        const std::string name = pair_name(qm, qn);
        out.add_state(name);
        if (seen.insert({qm, qn}).second) work.emplace_back(qm, qn);
        return name;
    };
    std::function<Tree(const Tree&, const std::string&)> run = [&](const Tree& t, const std::string& qn) {
        if (t.is_call()) return Tree::call(visit(t.label(), qn), {t.child(0)});
        const auto& rs = n.rules_for(qn, t.label());
        const Tree& rhs = n.rules()[rs.front()].rhs;
        return map_calls(rhs, [&](const std::string& q2, int i) {
            return run(t.child(static_cast<std::size_t>(i - 1)), q2);
        });
    };
    for (const auto& qm : m.initial())
        for (const auto& qn : n.initial()) out.add_initial(visit(qm, qn));
    std::vector<std::tuple<std::string, std::string, Tree>> pending;
    for (std::size_t w = 0; w < work.size(); ++w) {
        const auto [qm, qn] = work[w];
        for (const TopRule& r : m.rules())
            if (r.state == qm) pending.emplace_back(pair_name(qm, qn), r.symbol, run(r.rhs, qn));
    }
    for (auto& [q, sym, rhs] : pending) out.add_rule(q, sym, std::move(rhs));
    out.set_filter(m.filter());
    return out;
}

// ---------------------------------------------------------------------------
// Ranges

namespace {

/// Graph over (obligation set, state) pairs; an edge means the state's rule
/// calls another state on a child, weighted by the call's depth in the rhs.
struct RangeGraph {
    struct Edge {
        int to;
        int weight;
    };
    std::vector<std::pair<int, std::string>> nodes;
    std::map<std::pair<int, std::string>, int> index;
    std::vector<std::vector<Edge>> edges;

    int node(int set, const std::string& q) {
        auto [it, inserted] = index.emplace(std::make_pair(set, q), static_cast<int>(nodes.size()));
        if (inserted) {
            nodes.emplace_back(set, q);
            edges.emplace_back();
        }
        return it->second;
    }
};

struct RangeAnalysis {
    ObligationExplorer ex;
    RangeGraph g;
    std::vector<int> roots;

    RangeAnalysis(const Top& m, const std::string& q, const TreeAutomaton& a) : ex(m, &a) {
        if (!m.has_state(q)) throw Error("unknown state " + q);
        for (const auto& p : a.initial()) {
            const int id = ex.intern({Obligation::dom(q), Obligation::aut(p)});
            if (ex.productive(id)) roots.push_back(g.node(id, q));
        }
        for (std::size_t w = 0; w < g.nodes.size(); ++w) {
            const auto [set, state] = g.nodes[w];
            const ObligationSet& s = ex.set(set);
            const auto pos = static_cast<std::size_t>(
                std::distance(s.begin(), s.find(Obligation::dom(state))));
            for (const auto& [sym, _] : m.input.symbols())
                for (const auto& mv : ex.moves(set, sym)) {
                    if (!std::all_of(mv.children.begin(), mv.children.end(),
                                     [&](int c) { return ex.productive(c); }))
                        continue;
                    const Tree& rhs = m.rules()[mv.rules[pos]].rhs;
                    for (const auto& c : calls_with_depth(rhs)) {
                        const int to = g.node(mv.children[static_cast<std::size_t>(c.var - 1)], c.state);
                        g.edges[w].push_back({to, c.depth});
                    }
                }
        }
    }

    struct Call {
        std::string state;
        int var;
        int depth;
    };
    static std::vector<Call> calls_with_depth(const Tree& rhs) {
        std::vector<Call> out;
        std::function<void(const Tree&, int)> walk = [&](const Tree& t, int d) {
            if (t.is_call()) {
                out.push_back({t.label(), t.child(0).index(), d});
                return;
            }
            for (const Tree& c : t.children()) walk(c, d + 1);
        };
        walk(rhs, 0);
        return out;
    }

    bool reaches(int from, int to) const {
        std::vector<char> seen(g.nodes.size(), 0);
        std::vector<int> work{from};
        seen[static_cast<std::size_t>(from)] = 1;
        while (!work.empty()) {
            const int n = work.back();
            work.pop_back();
            if (n == to) return true;
            for (const auto& e : g.edges[static_cast<std::size_t>(n)])
                if (!seen[static_cast<std::size_t>(e.to)]) {
                    seen[static_cast<std::size_t>(e.to)] = 1;
                    work.push_back(e.to);
                }
        }
        return false;
    }

    bool finite() const {
        for (std::size_t n = 0; n < g.nodes.size(); ++n)
            for (const auto& e : g.edges[n])
                if (e.weight > 0 && reaches(e.to, static_cast<int>(n))) return false;
        return true;
    }
};

}  // namespace

bool range_finite_on(const Top& m, const std::string& q, const TreeAutomaton& a) {
    return RangeAnalysis(m, q, a).finite();
}

std::set<Tree> image_set(const Top& m, const std::string& q, const TreeAutomaton& a, std::size_t cap) {
    RangeAnalysis ra(m, q, a);
    if (!ra.finite()) throw Error("image_set: range of " + q + " is infinite");
    auto& ex = ra.ex;
    auto& g = ra.g;
    // Over-approximation by fixpoint, then an exact filter via inverse images.
    std::vector<std::set<Tree>> out(g.nodes.size());
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t n = 0; n < g.nodes.size(); ++n) {
            const auto [set, state] = g.nodes[n];
            const ObligationSet& s = ex.set(set);
            const auto pos = static_cast<std::size_t>(std::distance(s.begin(), s.find(Obligation::dom(state))));
            for (const auto& [sym, _] : m.input.symbols())
                for (const auto& mv : ex.moves(set, sym)) {
                    if (!std::all_of(mv.children.begin(), mv.children.end(),
                                     [&](int c) { return ex.productive(c); }))
                        continue;
                    const Tree& rhs = m.rules()[mv.rules[pos]].rhs;
                    std::function<std::vector<Tree>(const Tree&)> expand = [&](const Tree& t) {
                        if (t.is_call()) {
                            const int child = mv.children[static_cast<std::size_t>(t.child(0).index() - 1)];
                            const auto& got = out[static_cast<std::size_t>(g.index.at({child, t.label()}))];
                            return std::vector<Tree>(got.begin(), got.end());
                        }
                        std::vector<Tree> res{Tree::symbol(t.label())};
                        if (t.arity() == 0) return res;
                        res.clear();
                        std::vector<std::vector<Tree>> kids;
                        for (const Tree& c : t.children()) kids.push_back(expand(c));
                        std::vector<Tree> cur(kids.size());
                        std::function<void(std::size_t)> fill = [&](std::size_t i) {
                            if (i == kids.size()) {
                                res.push_back(Tree::symbol(t.label(), cur));
                                return;
                            }
                            for (const Tree& k : kids[i]) {
                                cur[i] = k;
                                fill(i + 1);
                            }
                        };
                        fill(0);
                        return res;
                    };
                    for (Tree& t : expand(rhs)) {
                        if (out[n].insert(std::move(t)).second) {
                            changed = true;
                            if (out[n].size() > cap) throw CapExceeded("image set exceeded cap");
                        }
                    }
                }
        }
    }
    std::set<Tree> result;
    for (int root : ra.roots) {
        const ObligationSet& rs = ex.set(g.nodes[static_cast<std::size_t>(root)].first);
        std::vector<std::string> auts;
        for (const auto& o : rs)
            if (o.kind == Obligation::Kind::Aut) auts.push_back(o.name);
        for (const Tree& t : out[static_cast<std::size_t>(root)]) {
            ObligationSet check{Obligation::aim(q, t)};
            for (const auto& p : auts) check.insert(Obligation::aut(p));
            if (ex.productive(ex.intern(check))) result.insert(t);
        }
    }
    return result;
}

TreeAutomaton inverse_image_automaton(const Top& m, const std::string& q, const Tree& t) {
    if (!m.has_state(q)) throw Error("unknown state " + q);
    ObligationExplorer ex(m);
    return ex.automaton({ex.intern({Obligation::aim(q, t)})}, "inv");
}

}  // namespace ttk
