#include "ttk/automata.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

namespace ttk {

void TreeAutomaton::add_state(const std::string& p) {
    if (p.empty()) throw Error("empty automaton state name");
    states_.insert(p);
}

void TreeAutomaton::add_initial(const std::string& p) {
    add_state(p);
    initial_.insert(p);
}

void TreeAutomaton::add_transition(const std::string& from, const std::string& symbol,
                                   std::vector<std::string> to) {
    if (!alphabet_.contains(symbol)) throw Error("transition on unknown symbol " + symbol);
    if (alphabet_.rank(symbol) != static_cast<int>(to.size()))
        throw Error("transition on " + symbol + " has " + std::to_string(to.size()) +
                    " targets, rank is " + std::to_string(alphabet_.rank(symbol)));
    add_state(from);
    for (const auto& p : to) add_state(p);
    Transition tr{from, symbol, std::move(to)};
    if (!seen_.insert(tr).second) return;
    index_[{from, symbol}].push_back(transitions_.size());
    transitions_.push_back(std::move(tr));
}

std::vector<const Transition*> TreeAutomaton::transitions_from(const std::string& p,
                                                               const std::string& symbol) const {
    std::vector<const Transition*> out;
    auto it = index_.find({p, symbol});
    if (it == index_.end()) return out;
    for (std::size_t i : it->second) out.push_back(&transitions_[i]);
    return out;
}

TreeAutomaton universal_automaton(const RankedAlphabet& alphabet) {
    TreeAutomaton a(alphabet, "universal");
    a.add_initial("u");
    for (const auto& [name, rank] : alphabet.symbols())
        a.add_transition("u", name, std::vector<std::string>(static_cast<std::size_t>(rank), "u"));
    return a;
}

TreeAutomaton finite_automaton(const RankedAlphabet& alphabet, const std::vector<Tree>& trees) {
    TreeAutomaton a(alphabet, "finite");
    std::function<std::string(const Tree&)> add = [&](const Tree& t) {
        if (!conforms(t, alphabet)) throw Error("tree " + to_string(t) + " not over the alphabet");
        const std::string name = "[" + to_string(t) + "]";
        std::vector<std::string> to;
        for (const Tree& c : t.children()) to.push_back(add(c));
        a.add_transition(name, t.label(), std::move(to));
        return name;
    };
    for (const Tree& t : trees) a.add_initial(add(t));
    return a;
}

namespace {

using StateSet = std::set<std::string>;

StateSet accepting_memo(const TreeAutomaton& a, const Tree& t,
                        std::unordered_map<Tree, StateSet, TreeHash>& memo) {
    if (auto it = memo.find(t); it != memo.end()) return it->second;
    if (!t.is_symbol()) throw Error("automaton input contains variables or calls");
    if (!a.alphabet().contains(t.label()) ||
        a.alphabet().rank(t.label()) != static_cast<int>(t.arity()))
        throw Error("tree " + to_string(t) + " is not over the automaton alphabet");
    std::vector<StateSet> kids;
    for (const Tree& c : t.children()) kids.push_back(accepting_memo(a, c, memo));
    StateSet out;
    for (const Transition& tr : a.transitions()) {
        if (tr.symbol != t.label()) continue;
        bool ok = true;
        for (std::size_t i = 0; ok && i < tr.to.size(); ++i) ok = kids[i].count(tr.to[i]) != 0;
        if (ok) out.insert(tr.from);
    }
    memo.emplace(t, out);
    return out;
}

}  // namespace

std::set<std::string> accepting_states(const TreeAutomaton& a, const Tree& t) {
    std::unordered_map<Tree, StateSet, TreeHash> memo;
    return accepting_memo(a, t, memo);
}

bool accepts(const TreeAutomaton& a, const Tree& t) {
    const auto states = accepting_states(a, t);
    return std::any_of(a.initial().begin(), a.initial().end(),
                       [&](const std::string& p) { return states.count(p) != 0; });
}

std::map<std::string, Tree> state_witnesses(const TreeAutomaton& a) {
    std::map<std::string, Tree> found;
    for (int round = 1;; ++round) {
        std::map<std::string, Tree> fresh;
        for (const Transition& tr : a.transitions()) {
            if (found.count(tr.from)) continue;
            std::vector<Tree> kids;
            bool ok = true;
            for (const auto& p : tr.to) {
                auto it = found.find(p);
                if (it == found.end()) {
                    ok = false;
                    break;
                }
                kids.push_back(it->second);
            }
            if (!ok) continue;
            Tree t = Tree::symbol(tr.symbol, std::move(kids));
            if (t.height() != round) continue;
            auto it = fresh.find(tr.from);
            if (it == fresh.end() || enumeration_less(t, it->second)) fresh.insert_or_assign(tr.from, t);
        }
        if (fresh.empty()) {
            // Nothing of this height; a larger round can only succeed if
            // some state was found in the previous round.
            bool pending = false;
            for (const Transition& tr : a.transitions()) {
                if (found.count(tr.from)) continue;
                if (std::all_of(tr.to.begin(), tr.to.end(),
                                [&](const std::string& p) { return found.count(p) != 0; })) {
                    pending = true;
                    break;
                }
            }
            if (!pending) break;
            continue;
        }
        found.merge(fresh);
    }
    return found;
}

std::optional<Tree> is_empty(const TreeAutomaton& a) {
    const auto w = state_witnesses(a);
    std::optional<Tree> best;
    for (const auto& p : a.initial()) {
        auto it = w.find(p);
        if (it == w.end()) continue;
        if (!best || enumeration_less(it->second, *best)) best = it->second;
    }
    return best;
}

TreeAutomaton product(const TreeAutomaton& a, const TreeAutomaton& b) {
    if (!(a.alphabet() == b.alphabet())) throw Error("product of automata over different alphabets");
    TreeAutomaton out(a.alphabet(), a.name + "x" + b.name);
    auto pname = [](const std::string& p, const std::string& q) { return "(" + p + "," + q + ")"; };
    std::vector<std::pair<std::string, std::string>> work;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& p : a.initial())
        for (const auto& q : b.initial()) {
            out.add_initial(pname(p, q));
            if (seen.insert({p, q}).second) work.emplace_back(p, q);
        }
    while (!work.empty()) {
        auto [p, q] = work.back();
        work.pop_back();
        for (const auto& [sym, rank] : a.alphabet().symbols()) {
            for (const Transition* ta : a.transitions_from(p, sym))
                for (const Transition* tb : b.transitions_from(q, sym)) {
                    std::vector<std::string> to;
                    for (int i = 0; i < rank; ++i) {
                        const auto& pi = ta->to[static_cast<std::size_t>(i)];
                        const auto& qi = tb->to[static_cast<std::size_t>(i)];
                        to.push_back(pname(pi, qi));
                        if (seen.insert({pi, qi}).second) work.emplace_back(pi, qi);
                    }
                    out.add_transition(pname(p, q), sym, std::move(to));
                }
        }
    }
    return out;
}

TreeAutomaton trim(const TreeAutomaton& a) {
    const auto productive = state_witnesses(a);
    auto usable = [&](const Transition& tr) {
        return productive.count(tr.from) &&
               std::all_of(tr.to.begin(), tr.to.end(),
                           [&](const std::string& p) { return productive.count(p) != 0; });
    };
    std::set<std::string> reach;
    std::vector<std::string> work;
    for (const auto& p : a.initial())
        if (productive.count(p) && reach.insert(p).second) work.push_back(p);
    while (!work.empty()) {
        const std::string p = work.back();
        work.pop_back();
        for (const Transition& tr : a.transitions()) {
            if (tr.from != p || !usable(tr)) continue;
            for (const auto& c : tr.to)
                if (reach.insert(c).second) work.push_back(c);
        }
    }
    TreeAutomaton out(a.alphabet(), a.name);
    for (const auto& p : a.initial())
        if (reach.count(p)) out.add_initial(p);
    for (const Transition& tr : a.transitions())
        if (reach.count(tr.from) && usable(tr)) out.add_transition(tr.from, tr.symbol, tr.to);
    return out;
}

bool is_finite_language(const TreeAutomaton& a) {
    const TreeAutomaton t = trim(a);
    std::map<std::string, std::set<std::string>> succ;
    for (const Transition& tr : t.transitions())
        for (const auto& c : tr.to) succ[tr.from].insert(c);
    // Cycle detection by colouring DFS.
    std::map<std::string, int> colour;
    std::function<bool(const std::string&)> cyclic = [&](const std::string& p) {
        colour[p] = 1;
        for (const auto& c : succ[p]) {
            const int col = colour[c];
            if (col == 1) return true;
            if (col == 0 && cyclic(c)) return true;
        }
        colour[p] = 2;
        return false;
    };
    for (const auto& p : t.states())
        if (colour[p] == 0 && cyclic(p)) return false;
    return true;
}

std::vector<Tree> enumerate_language(const TreeAutomaton& a, int max_height, std::size_t cap) {
    const TreeAutomaton t = trim(a);
    // upto[p]: members of L(p) of height <= h-1; exact[p]: height exactly h-1.
    std::map<std::string, std::vector<Tree>> upto, exact;
    for (int h = 1; h <= max_height; ++h) {
        std::map<std::string, std::set<Tree>> level;
        for (const Transition& tr : t.transitions()) {
            const int k = static_cast<int>(tr.to.size());
            if (k == 0) {
                if (h == 1) level[tr.from].insert(Tree::symbol(tr.symbol));
                continue;
            }
            if (h == 1) continue;
            std::vector<Tree> kids(static_cast<std::size_t>(k));
            auto& bucket = level[tr.from];
            std::function<void(int, bool)> fill = [&](int i, bool hit) {
                if (i == k) {
                    if (hit) {
                        bucket.insert(Tree::symbol(tr.symbol, kids));
                        if (bucket.size() > cap)
                            throw CapExceeded("language enumeration exceeded cap of " +
                                              std::to_string(cap) + " trees");
                    }
                    return;
                }
                const auto& pool = upto[tr.to[static_cast<std::size_t>(i)]];
                for (const Tree& c : pool) {
                    kids[static_cast<std::size_t>(i)] = c;
                    fill(i + 1, hit || c.height() == h - 1);
                }
            };
            // Skip when no child can reach height exactly h-1.
            bool possible = false;
            for (const auto& p : tr.to) possible = possible || !exact[p].empty();
            if (possible) fill(0, false);
        }
        exact.clear();
        for (auto& [p, trees] : level) {
            exact[p].assign(trees.begin(), trees.end());
            upto[p].insert(upto[p].end(), trees.begin(), trees.end());
        }
        if (level.empty() || std::all_of(level.begin(), level.end(),
                                         [](const auto& e) { return e.second.empty(); }))
            break;
    }
    std::set<Tree> result;
    for (const auto& p : t.initial()) result.insert(upto[p].begin(), upto[p].end());
    std::vector<Tree> out(result.begin(), result.end());
    std::sort(out.begin(), out.end(), enumeration_less);
    return out;
}

}  // namespace ttk
