#include "ttk/linearize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <sstream>
#include <tuple>

#include "ttk/obligations.hpp"
#include "ttk/topt_algebra.hpp"

namespace ttk {

namespace {

using Assertions = std::set<std::pair<std::string, Tree>>;

template <class T, class F>
void for_each_choice(const std::vector<std::vector<T>>& options, F&& f) {
    std::vector<const T*> pick(options.size());
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == options.size()) {
            f(pick);
            return;
        }
        for (const T& o : options[i]) {
            pick[i] = &o;
            rec(i + 1);
        }
    };
    rec(0);
}

Tree rename_var(const Tree& t, int from, int to) {
    if (t.is_var()) return t.index() == from ? Tree::var(to) : t;
    if (t.ground() || t.arity() == 0) return t;
    std::vector<Tree> kids;
    kids.reserve(t.arity());
    for (const Tree& c : t.children()) kids.push_back(rename_var(c, from, to));
    if (t.is_call()) return Tree::call(t.label(), std::move(kids));
    return Tree::symbol(t.label(), std::move(kids));
}

/// Call nodes in pre-order; the search does not descend into calls.
void collect_calls(const Tree& t, const Path& at, std::vector<Path>& out) {
    if (t.is_call()) {
        out.push_back(at);
        return;
    }
    for (std::size_t i = 0; i < t.arity(); ++i)
        collect_calls(t.child(i), at.child(static_cast<int>(i) + 1), out);
}

/// Matches an rhs against a target output; calls q(x_j) bind subtrees.
bool match(const Tree& rhs, const Tree& target, std::vector<Assertions>& kids) {
    if (rhs.is_call()) {
        kids.at(static_cast<std::size_t>(rhs.child(0).index()) - 1).insert({rhs.label(), target});
        return true;
    }
    if (!target.is_symbol() || rhs.label() != target.label() || rhs.arity() != target.arity())
        return false;
    for (std::size_t i = 0; i < rhs.arity(); ++i)
        if (!match(rhs.child(i), target.child(i), kids)) return false;
    return true;
}

std::string assertions_name(const Assertions& p) {
    std::string s = "{";
    bool first = true;
    for (const auto& [q, t] : p) {
        if (!first) s += ",";
        first = false;
        s += q + "(x)=" + to_string(t);
    }
    return s + "}";
}

std::vector<std::string> split_top_level(const std::string& s, char sep) {
    std::vector<std::string> parts(1);
    int depth = 0;
    for (char c : s) {
        if (c == '(' || c == '{' || c == '[') ++depth;
        if (c == ')' || c == '}' || c == ']') --depth;
        if (c == sep && depth == 0)
            parts.emplace_back();
        else
            parts.back() += c;
    }
    return parts;
}

Tree unary_tower(std::size_t n, Tree t) {
    for (std::size_t i = 0; i < n; ++i) t = Tree::symbol(shape_symbol(1), {t});
    return t;
}

class Linearizer {
public:
    Linearizer(const Top& m, std::size_t cap) : m_(m), cap_(cap), explorer_(m) {
        double pow = std::pow(2.0, static_cast<double>(m.states().size()));
        bound_v_ = pow;
        bound_t_ = m.max_rhs() * pow;
    }

    Linearization run() {
        Linearization out;
        out.bound_v = bound_v_;
        out.bound_t = bound_t_;
        std::deque<LinState> work;
        std::vector<std::string> initial;
        for (const std::string& q : m_.initial()) {
            if (!satisfiable({q}, {})) continue;
            LinState s{{}, Path(), Tree::call(q, {Tree::var(0)})};
            initial.push_back(admit(s, out, work));
        }
        struct RuleText {
            std::string state, symbol;
            Tree rhs;
            auto operator<=>(const RuleText&) const = default;
        };
        std::set<RuleText> rules;
        while (!work.empty()) {
            LinState s = work.front();
            work.pop_front();
            for (const auto& [sym, k] : m_.input.symbols()) {
                for (const auto& [rhs, kids] : expand(s, sym, k)) {
                    for (const LinState& c : kids) admit(c, out, work);
                    rules.insert({s.name(), sym, rhs});
                }
            }
        }
        Top lin(m_.name + "_lin", m_.input, m_.output);
        for (const auto& [name, st] : out.states) lin.add_state(name);
        for (const std::string& q : initial) lin.add_initial(q);
        for (const RuleText& r : rules) lin.add_rule(r.state, r.symbol, r.rhs);
        out.top = lin;
        return out;
    }

private:
    std::string admit(const LinState& s, Linearization& out, std::deque<LinState>& work) {
        std::string name = s.name();
        if (out.states.count(name)) return name;
        if (static_cast<double>(s.v.length()) > bound_v_ || s.t.height() > bound_t_)
            throw Error("linearization state exceeds the size bound: " + name);
        if (out.states.size() >= cap_)
            throw CapExceeded("linearization exceeded cap of " + std::to_string(cap_) + " states");
        out.max_v = std::max(out.max_v, s.v.length());
        out.max_t_height = std::max(out.max_t_height, s.t.height());
        out.states.emplace(name, s);
        work.push_back(s);
        return name;
    }

    bool satisfiable(const std::set<std::string>& calls, const Assertions& p) {
        ObligationSet o;
        for (const std::string& q : calls) o.insert(Obligation::dom(q));
        for (const auto& [q, t] : p) o.insert(Obligation::aim(q, t));
        if (o.empty()) return true;
        return explorer_.productive(explorer_.intern(o));
    }

    /// M_q(I(S)) when finite.
    const std::optional<std::set<Tree>>& image(const std::set<std::string>& s, const std::string& q) {
        auto key = std::make_pair(s, q);
        auto it = images_.find(key);
        if (it != images_.end()) return it->second;
        auto dit = domains_.find(s);
        if (dit == domains_.end()) dit = domains_.emplace(s, intersection_automaton(m_, s)).first;
        std::optional<std::set<Tree>> img;
        if (range_finite_on(m_, q, dit->second)) img = image_set(m_, q, dit->second, cap_);
        return images_.emplace(key, std::move(img)).first->second;
    }

    std::vector<std::pair<Tree, std::vector<LinState>>> expand(const LinState& s, const std::string& sym,
                                                               int k) {
        std::vector<std::pair<Tree, std::vector<LinState>>> result;
        const auto nk = static_cast<std::size_t>(k);

        std::vector<Path> call_paths;
        collect_calls(s.t, Path(), call_paths);
        std::vector<std::vector<std::size_t>> call_options;
        for (const Path& u : call_paths) {
            call_options.push_back(m_.rules_for(navigate(s.t, u).label(), sym));
            if (call_options.back().empty()) return result;
        }

        std::vector<std::vector<std::vector<Assertions>>> assertion_options;
        for (const auto& [q, target] : s.p) {
            std::vector<std::vector<Assertions>> opts;
            for (std::size_t r : m_.rules_for(q, sym)) {
                std::vector<Assertions> kids(nk);
                if (match(m_.rules()[r].rhs, target, kids)) opts.push_back(std::move(kids));
            }
            if (opts.empty()) return result;
            assertion_options.push_back(std::move(opts));
        }

        for_each_choice(call_options, [&](const std::vector<const std::size_t*>& rule_pick) {
            Tree big = s.t;
            for (std::size_t i = 0; i < call_paths.size(); ++i)
                big = graft(big, call_paths[i], m_.rules()[*rule_pick[i]].rhs);
            for_each_choice(assertion_options, [&](const std::vector<const std::vector<Assertions>*>& ap) {
                std::vector<Assertions> p(nk);
                for (const auto* kids : ap)
                    for (std::size_t j = 0; j < nk; ++j) p[j].insert((*kids)[j].begin(), (*kids)[j].end());
                predict(s, big, p, nk, result);
            });
        });
        return result;
    }

    /// Replaces calls with finite range on the child's domain by predicted trees.
    void predict(const LinState& s, const Tree& big, const std::vector<Assertions>& p, std::size_t nk,
                 std::vector<std::pair<Tree, std::vector<LinState>>>& result) {
        std::vector<Path> paths;
        collect_calls(big, Path(), paths);
        std::vector<std::set<std::string>> sets(nk);
        for (const Path& u : paths) {
            const Tree& c = navigate(big, u);
            sets[static_cast<std::size_t>(c.child(0).index()) - 1].insert(c.label());
        }
        for (std::size_t j = 0; j < nk; ++j)
            for (const auto& a : p[j]) sets[j].insert(a.first);

        std::vector<Path> predicted;
        std::vector<std::vector<Tree>> options;
        for (const Path& u : paths) {
            const Tree& c = navigate(big, u);
            const auto& img = image(sets[static_cast<std::size_t>(c.child(0).index()) - 1], c.label());
            if (!img) continue;
            predicted.push_back(u);
            options.emplace_back(img->begin(), img->end());
        }
        for_each_choice(options, [&](const std::vector<const Tree*>& pick) {
            Tree t = big;
            std::vector<Assertions> pj = p;
            for (std::size_t i = 0; i < predicted.size(); ++i) {
                const Tree& c = navigate(big, predicted[i]);
                pj[static_cast<std::size_t>(c.child(0).index()) - 1].insert({c.label(), *pick[i]});
                t = graft(t, predicted[i], *pick[i]);
            }
            assign(s, t, pj, nk, result);
        });
    }

    /// Hands each part of the expanded output to the child it belongs to.
    void assign(const LinState& s, const Tree& t, const std::vector<Assertions>& p, std::size_t nk,
                std::vector<std::pair<Tree, std::vector<LinState>>>& result) {
        std::vector<Path> calls;
        collect_calls(t, Path(), calls);
        std::vector<std::set<std::string>> remaining(nk);
        for (const Path& u : calls) {
            const Tree& c = navigate(t, u);
            remaining[static_cast<std::size_t>(c.child(0).index()) - 1].insert(c.label());
        }
        for (std::size_t j = 0; j < nk; ++j)
            if (!satisfiable(remaining[j], p[j])) return;

        std::vector<LinState> kids;
        std::vector<Path> at;
        for (std::size_t j = 0; j < nk; ++j) {
            const int var = static_cast<int>(j) + 1;
            Path target = s.v.child(var);
            // Walk towards target; stop at a call or a leaf.
            Path reached;
            const Tree* node = &t;
            bool found = true;
            for (int step : target.steps()) {
                if (node->is_call() || static_cast<std::size_t>(step) > node->arity()) {
                    found = false;
                    break;
                }
                node = &node->child(static_cast<std::size_t>(step) - 1);
                reached = reached.child(step);
            }
            if (found) {
                std::vector<Path> inner;
                collect_calls(*node, Path(), inner);
                for (const Path& u : inner)
                    if (navigate(*node, u).child(0).index() != var) return;
                kids.push_back({p[j], Path(), rename_var(*node, var, 0)});
            } else {
                if (!node->is_call() || node->child(0).index() != var) return;
                kids.push_back({p[j], target.suffix_after(reached), Tree::call(node->label(), {Tree::var(0)})});
            }
            at.push_back(reached);
        }
        // Every remaining call must sit inside a region handed to a child.
        for (const Path& u : calls) {
            bool covered = false;
            for (std::size_t j = 0; j < nk && !covered; ++j) covered = at[j].is_prefix_of(u);
            if (!covered) return;
        }
        Tree rhs = t;
        for (std::size_t j = 0; j < nk; ++j)
            rhs = graft(rhs, at[j], Tree::call(kids[j].name(), {Tree::var(static_cast<int>(j) + 1)}));
        result.emplace_back(rhs, std::move(kids));
    }

    const Top& m_;
    std::size_t cap_;
    ObligationExplorer explorer_;
    double bound_v_ = 0;
    double bound_t_ = 0;
    std::map<std::set<std::string>, TreeAutomaton> domains_;
    std::map<std::pair<std::set<std::string>, std::string>, std::optional<std::set<Tree>>> images_;
};

}  // namespace

const StateSetEntry& StateSetTable::at(const std::set<std::string>& s) const {
    auto it = entries.find(s);
    if (it == entries.end()) throw Error("state set not in table");
    return it->second;
}

StateSetTable build_state_set_table(const Top& m, std::size_t cap) {
    StateSetTable table;
    for (const auto& s : state_sets(m)) {
        StateSetEntry e{intersection_automaton(m, s), {}, {}};
        for (const std::string& q : s) {
            if (!range_finite_on(m, q, e.domain)) continue;
            e.fin.insert(q);
            e.images[q] = image_set(m, q, e.domain, cap);
        }
        table.entries.emplace(s, std::move(e));
    }
    return table;
}

std::set<std::size_t> PredictionAutomaton::state_of(const Tree& s) const {
    std::set<std::size_t> p;
    for (std::size_t i = 0; i < components.size(); ++i)
        if (accepts(components[i].automaton, s)) p.insert(i);
    return p;
}

std::set<Tree> PredictionAutomaton::table(const std::set<std::size_t>& p, const std::set<std::string>& s,
                                          const std::string& q) const {
    std::set<Tree> out;
    for (std::size_t i : p) {
        const Component& c = components.at(i);
        if (c.set == s && c.state == q) out.insert(c.target);
    }
    return out;
}

PredictionAutomaton build_prediction_automaton(const Top& m, const StateSetTable& table) {
    PredictionAutomaton a;
    for (const auto& [s, e] : table.entries)
        for (const auto& [q, img] : e.images)
            for (const Tree& t : img)
                a.components.push_back({s, q, t, trim(product(inverse_image_automaton(m, q, t), e.domain))});
    return a;
}

std::string LinState::name() const {
    return "(" + assertions_name(p) + ";" + v.str() + ";" + to_string(t) + ")";
}

std::optional<std::size_t> lin_state_depth(const std::string& name) {
    if (name.size() < 2 || name.front() != '(' || name.back() != ')') return std::nullopt;
    auto parts = split_top_level(name.substr(1, name.size() - 2), ';');
    if (parts.size() != 3) return std::nullopt;
    try {
        return Path::parse(parts[1]).length();
    } catch (const Error&) {
        return std::nullopt;
    }
}

Linearization linearize(const Top& input, const Verdict& verdict, std::size_t cap) {
    if (!verdict.preserving()) throw Error("linearize requires a shape-preserving verdict");
    if (input.filter()) throw Error("linearize does not support transducers with an input filter");
    Top m = trim(input);
    Linearization out = Linearizer(m, cap).run();
    out.top = trim(out.top);
    std::map<std::string, LinState> kept;
    for (const std::string& q : out.top.states()) kept.emplace(q, out.states.at(q));
    out.states = std::move(kept);
    out.stamp = "verified to height " + std::to_string(verdict.height);
    return out;
}

LinearizationReport verify_linearization(const Top& m, const Top& lin, int max_height, std::size_t cap) {
    LinearizationReport r;
    TopPredicates pr = predicates(lin);
    r.linear = pr.linear;
    r.nondeleting = pr.nondeleting;

    std::vector<Tree> dom = enumerate_language(domain_automaton(m), max_height);
    std::set<Tree> inputs(dom.begin(), dom.end());
    for (const Tree& t : enumerate_language(domain_automaton(lin), max_height)) inputs.insert(t);
    std::vector<Tree> ordered(inputs.begin(), inputs.end());
    std::sort(ordered.begin(), ordered.end(), enumeration_less);
    r.inputs = ordered.size();
    for (const Tree& t : ordered) {
        if (apply_all(m, t, cap) != apply_all(lin, t, cap)) {
            r.mismatch = t;
            r.violations.push_back("outputs differ on " + to_string(t));
            break;
        }
    }

    auto note = [&](std::string msg) {
        if (r.violations.size() < 20) r.violations.push_back(std::move(msg));
    };
    for (const Tree& t : dom) {
        for (const Path& u : nodes(t)) {
            const Tree& sub = navigate(t, u);
            for (const ProvisionalOutput& po : provisional_outputs(lin, t, u, cap)) {
                if (po.state_sequence.size() != 1) {
                    note("node " + u.str() + " of " + to_string(t) + " is processed by " +
                         std::to_string(po.state_sequence.size()) + " states");
                    continue;
                }
                ++r.state_calls;
                const std::string& q = po.state_sequence.front();
                auto depth = lin_state_depth(q);
                if (!depth) continue;
                Tree expected = unary_tower(*depth, shape(sub));
                for (const Tree& o : apply_state(lin, q, sub, cap))
                    if (shape(o) != expected)
                        note("state " + q + " on " + to_string(sub) + " yields " + to_string(o));
            }
        }
    }
    return r;
}

}  // namespace ttk
