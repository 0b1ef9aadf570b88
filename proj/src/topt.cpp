#include "ttk/topt.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

#include "ttk/obligations.hpp"

namespace ttk {

void Top::add_state(const std::string& q) {
    if (q.empty()) throw Error("empty state name");
    if (state_set_.insert(q).second) states_.push_back(q);
}

void Top::add_initial(const std::string& q) {
    if (!has_state(q)) throw Error("initial state " + q + " is not declared");
    if (std::find(initial_.begin(), initial_.end(), q) == initial_.end()) initial_.push_back(q);
}

namespace {

void check_rhs(const Top& m, const Tree& rhs, int k) {
    switch (rhs.kind()) {
    case Kind::Symbol:
        if (!m.output.contains(rhs.label()))
            throw Error("unknown output symbol " + rhs.label() + " in rule");
        if (m.output.rank(rhs.label()) != static_cast<int>(rhs.arity()))
            throw Error("output symbol " + rhs.label() + " used with wrong arity");
        for (const Tree& c : rhs.children()) check_rhs(m, c, k);
        return;
    case Kind::Call: {
        if (!m.has_state(rhs.label())) throw Error("call to undeclared state " + rhs.label());
        if (rhs.arity() != 1 || !rhs.child(0).is_var())
            throw Error("state call " + rhs.label() + " must have exactly one variable argument");
        const int i = rhs.child(0).index();
        if (i < 1 || i > k)
            throw Error("variable x" + std::to_string(i) + " out of range for rank " + std::to_string(k));
        return;
    }
    case Kind::Var: throw Error("bare variable in right-hand side");
    case Kind::Param: throw Error("parameter in a top-down transducer rule");
    }
}

}  // namespace

void Top::add_rule(const std::string& state, const std::string& symbol, Tree rhs) {
    if (!has_state(state)) throw Error("rule for undeclared state " + state);
    if (!input.contains(symbol)) throw Error("rule on unknown input symbol " + symbol);
    check_rhs(*this, rhs, input.rank(symbol));
    max_rhs_ = std::max(max_rhs_, rhs.height());
    index_[{state, symbol}].push_back(rules_.size());
    rules_.push_back({state, symbol, std::move(rhs)});
}

void Top::set_filter(std::optional<TreeAutomaton> filter) {
    if (filter && !(filter->alphabet() == input)) throw Error("filter alphabet differs from input alphabet");
    filter_ = std::move(filter);
}

const std::vector<std::size_t>& Top::rules_for(const std::string& q, const std::string& symbol) const {
    static const std::vector<std::size_t> none;
    auto it = index_.find({q, symbol});
    return it == index_.end() ? none : it->second;
}

std::vector<std::pair<std::string, int>> rhs_calls(const Tree& rhs) {
    std::vector<std::pair<std::string, int>> out;
    std::function<void(const Tree&)> walk = [&](const Tree& t) {
        if (t.is_call()) {
            out.emplace_back(t.label(), t.child(0).index());
            return;
        }
        for (const Tree& c : t.children()) walk(c);
    };
    walk(rhs);
    return out;
}

std::string rule_string(const TopRule& r, int rank) {
    std::string lhs = r.state + "(" + r.symbol;
    if (rank > 0) {
        lhs += '(';
        for (int i = 1; i <= rank; ++i) {
            if (i > 1) lhs += ',';
            lhs += "x" + std::to_string(i);
        }
        lhs += ')';
    }
    return lhs + ") -> " + to_string(r.rhs);
}

Tree step(const Tree& configuration, const TopRule& rule, const Path& u) {
    const Tree& node = navigate(configuration, u);
    if (!node.is_call()) throw Error("no state call at path " + u.str());
    if (node.label() != rule.state) throw Error("rule state " + rule.state + " does not match call " + node.label());
    const Tree& arg = node.child(0);
    if (!arg.is_symbol() || arg.label() != rule.symbol)
        throw Error("rule symbol " + rule.symbol + " does not match input " + to_string(arg));
    return graft(configuration, u, substitute_vars(rule.rhs, arg.children()));
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

/// Memoized nondeterministic evaluation. A Var(0) leaf in the input is a hole:
/// calling q on it yields the pending call q(x) when `hole_ok(q)` holds.
class Evaluator {
public:
    Evaluator(const Top& m, std::size_t cap, std::function<bool(const std::string&)> hole_ok = {})
        : m_(m), cap_(cap), hole_ok_(std::move(hole_ok)) {}

    const std::set<Tree>& run(const std::string& q, const Tree& s) {
        auto key = std::make_pair(q, s);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        std::set<Tree> out;
        if (s.is_var()) {
            if (hole_ok_ && hole_ok_(q)) out.insert(Tree::call(q, {s}));
        } else {
            for (std::size_t r : m_.rules_for(q, s.label())) {
                for (Tree& t : expand(m_.rules()[r].rhs, s)) {
                    out.insert(std::move(t));
                    check(out.size());
                }
            }
        }
        return memo_.emplace(std::move(key), std::move(out)).first->second;
    }

private:
    std::vector<Tree> expand(const Tree& rhs, const Tree& s) {
        if (rhs.is_call()) {
            const auto& r = run(rhs.label(), s.child(static_cast<std::size_t>(rhs.child(0).index() - 1)));
            return {r.begin(), r.end()};
        }
        std::vector<std::vector<Tree>> kids;
        for (const Tree& c : rhs.children()) {
            kids.push_back(expand(c, s));
            if (kids.back().empty()) return {};
        }
        std::vector<Tree> out;
        std::vector<Tree> cur(kids.size());
        std::function<void(std::size_t)> fill = [&](std::size_t i) {
            if (i == kids.size()) {
                out.push_back(Tree::symbol(rhs.label(), cur));
                check(out.size());
                return;
            }
            for (const Tree& t : kids[i]) {
                cur[i] = t;
                fill(i + 1);
            }
        };
        fill(0);
        return out;
    }

    void check(std::size_t n) const {
        if (n > cap_) throw CapExceeded("more than " + std::to_string(cap_) + " outputs");
    }

    const Top& m_;
    std::size_t cap_;
    std::function<bool(const std::string&)> hole_ok_;
    std::map<std::pair<std::string, Tree>, std::set<Tree>> memo_;
};

bool passes_filter(const Top& m, const Tree& t) {
    return !m.filter() || accepts(*m.filter(), t);
}

}  // namespace

std::set<Tree> apply_state(const Top& m, const std::string& q, const Tree& t, std::size_t cap) {
    if (!conforms(t, m.input)) throw Error("input " + to_string(t) + " is not over the input alphabet");
    Evaluator ev(m, cap);
    return ev.run(q, t);
}

std::set<Tree> apply_all(const Top& m, const Tree& t, std::size_t cap) {
    if (!conforms(t, m.input)) throw Error("input " + to_string(t) + " is not over the input alphabet");
    if (!passes_filter(m, t)) return {};
    Evaluator ev(m, cap);
    std::set<Tree> out;
    for (const auto& q : m.initial()) {
        const auto& r = ev.run(q, t);
        out.insert(r.begin(), r.end());
        if (out.size() > cap) throw CapExceeded("more than " + std::to_string(cap) + " outputs");
    }
    return out;
}

std::set<ProvisionalOutput> provisional_outputs(const Top& m, const Tree& t, const Path& u,
                                                std::size_t cap) {
    if (!conforms(t, m.input)) throw Error("input " + to_string(t) + " is not over the input alphabet");
    const Tree& sub = navigate(t, u);
    if (!passes_filter(m, t)) return {};
    ObligationExplorer ex(m);
    std::map<std::string, bool> in_domain;
    auto hole_ok = [&](const std::string& q) {
        auto it = in_domain.find(q);
        if (it != in_domain.end()) return it->second;
        const TreeAutomaton dom = ex.automaton({ex.intern({Obligation::dom(q)})}, "dom");
        return in_domain[q] = accepts(dom, sub);
    };
    Evaluator ev(m, cap, hole_ok);
    const Tree holed = graft(t, u, Tree::var(0));
    std::set<ProvisionalOutput> out;
    for (const auto& q : m.initial()) {
        for (const Tree& o : ev.run(q, holed)) {
            ProvisionalOutput po{o, {}, {}};
            for (const Path& p : nodes(o)) {
                const Tree& n = navigate(o, p);
                if (n.is_call()) {
                    po.state_sequence.push_back(n.label());
                    po.hole_paths.push_back(p);
                }
            }
            out.insert(std::move(po));
            if (out.size() > cap) throw CapExceeded("more than " + std::to_string(cap) + " provisional outputs");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// State sets

StateSetsResult analyze_state_sets(const Top& m) {
    StateSetsResult res;
    ObligationExplorer ex(m);
    auto as_set = [](const ObligationSet& s) {
        std::set<std::string> out;
        for (const auto& o : s) out.insert(o.name);
        return out;
    };
    std::vector<int> work;
    std::set<int> seen;
    for (const auto& q : m.initial()) {
        const int id = ex.intern({Obligation::dom(q)});
        if (ex.productive(id) && seen.insert(id).second) work.push_back(id);
    }
    for (std::size_t w = 0; w < work.size(); ++w) {
        const int id = work[w];
        res.sets.insert(as_set(ex.set(id)));
        for (const auto& [sym, rank] : m.input.symbols()) {
            for (const auto& mv : ex.moves(id, sym)) {
                if (!std::all_of(mv.children.begin(), mv.children.end(),
                                 [&](int c) { return ex.productive(c); }))
                    continue;
                std::vector<std::vector<std::string>> seqs(static_cast<std::size_t>(rank));
                for (std::size_t r : mv.rules) {
                    res.used_rules.insert(r);
                    for (const auto& [q, i] : rhs_calls(m.rules()[r].rhs))
                        seqs[static_cast<std::size_t>(i - 1)].push_back(q);
                }
                for (auto& seq : seqs) {
                    std::set<std::string> uniq(seq.begin(), seq.end());
                    if (uniq.size() != seq.size() &&
                        std::find(res.repeated.begin(), res.repeated.end(), seq) == res.repeated.end())
                        res.repeated.push_back(seq);
                }
                for (int c : mv.children)
                    if (!ex.set(c).empty() && seen.insert(c).second) work.push_back(c);
            }
        }
    }
    return res;
}

std::set<std::set<std::string>> state_sets(const Top& m) { return analyze_state_sets(m).sets; }

// ---------------------------------------------------------------------------
// Predicates and generators

TopPredicates predicates(const Top& m) {
    TopPredicates p;
    p.deterministic = m.initial().size() <= 1;
    p.total = !m.filter().has_value();
    for (const auto& q : m.states())
        for (const auto& [sym, rank] : m.input.symbols()) {
            const auto n = m.rules_for(q, sym).size();
            if (n > 1) p.deterministic = false;
            if (n == 0) p.total = false;
        }
    for (const TopRule& r : m.rules()) {
        const int k = m.input.rank(r.symbol);
        std::vector<int> uses(static_cast<std::size_t>(k) + 1, 0);
        for (const auto& [q, i] : rhs_calls(r.rhs)) ++uses[static_cast<std::size_t>(i)];
        for (int i = 1; i <= k; ++i) {
            if (uses[static_cast<std::size_t>(i)] > 1) p.linear = false;
            if (uses[static_cast<std::size_t>(i)] == 0) p.nondeleting = false;
        }
        bool relabel = r.rhs.is_symbol() && static_cast<int>(r.rhs.arity()) == k;
        for (int i = 0; relabel && i < k; ++i) {
            const Tree& c = r.rhs.child(static_cast<std::size_t>(i));
            relabel = c.is_call() && c.child(0).index() == i + 1;
        }
        if (!relabel) p.relabeling = false;
    }
    return p;
}

namespace {

Top generate_single_state(const RankedAlphabet& sigma, const RankedAlphabet& out, const std::string& name,
                          const std::function<std::string(const std::string&, int)>& label) {
    if (sigma.size() == 0) throw Error("empty alphabet");
    Top m(name, sigma, out);
    m.add_state("q");
    m.add_initial("q");
    for (const auto& [sym, rank] : sigma.symbols()) {
        std::vector<Tree> kids;
        for (int i = 1; i <= rank; ++i) kids.push_back(Tree::call("q", {Tree::var(i)}));
        m.add_rule("q", sym, Tree::symbol(label(sym, rank), std::move(kids)));
    }
    return m;
}

}  // namespace

Top generate_identity_top(const RankedAlphabet& sigma) {
    return generate_single_state(sigma, sigma, "identity", [](const std::string& s, int) { return s; });
}

Top generate_shape_top(const RankedAlphabet& sigma) {
    return generate_single_state(sigma, shape_alphabet(sigma.max_rank()), "shape",
                                 [](const std::string&, int k) { return shape_symbol(k); });
}

}  // namespace ttk
