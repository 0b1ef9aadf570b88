#pragma once

// Brute-force reference implementations. They share no code with the
// library beyond the data types and accessors.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ttk/automata.hpp"
#include "ttk/mtt.hpp"
#include "ttk/topt.hpp"

namespace oracle {

using ttk::Tree;

inline void product_into(const std::string& sym, const std::vector<std::vector<Tree>>& pools,
                         std::vector<Tree>& cur, std::set<Tree>& out) {
    if (cur.size() == pools.size()) {
        out.insert(Tree::symbol(sym, cur));
        return;
    }
    for (const Tree& t : pools[cur.size()]) {
        cur.push_back(t);
        product_into(sym, pools, cur, out);
        cur.pop_back();
    }
}

/// All trees of height <= h.
inline std::set<Tree> all_trees(const ttk::RankedAlphabet& a, int h) {
    std::set<Tree> out;
    if (h <= 0) return out;
    std::set<Tree> below = all_trees(a, h - 1);
    std::vector<Tree> pool(below.begin(), below.end());
    for (const auto& [sym, k] : a.symbols()) {
        std::vector<std::vector<Tree>> pools(k, pool);
        std::vector<Tree> cur;
        product_into(sym, pools, cur, out);
    }
    return out;
}

inline bool accepts_from(const ttk::TreeAutomaton& a, const std::string& p, const Tree& t) {
    for (const ttk::Transition& tr : a.transitions()) {
        if (tr.from != p || tr.symbol != t.label() || tr.to.size() != t.arity()) continue;
        bool ok = true;
        for (std::size_t i = 0; ok && i < tr.to.size(); ++i) ok = oracle::accepts_from(a, tr.to[i], t.child(i));
        if (ok) return true;
    }
    return false;
}

inline bool accepts(const ttk::TreeAutomaton& a, const Tree& t) {
    for (const std::string& p : a.initial())
        if (oracle::accepts_from(a, p, t)) return true;
    return false;
}

/// L(A) restricted to height <= h, generated from the transitions.
inline std::set<Tree> language(const ttk::TreeAutomaton& a, int h) {
    std::map<std::string, std::set<Tree>> level;
    for (int i = 1; i <= h; ++i) {
        std::map<std::string, std::set<Tree>> next;
        for (const ttk::Transition& tr : a.transitions()) {
            std::vector<std::vector<Tree>> pools;
            for (const std::string& c : tr.to) pools.emplace_back(level[c].begin(), level[c].end());
            std::vector<Tree> cur;
            product_into(tr.symbol, pools, cur, next[tr.from]);
        }
        level = std::move(next);
    }
    std::set<Tree> out;
    for (const std::string& p : a.initial()) out.insert(level[p].begin(), level[p].end());
    return out;
}

/// Pumping: with n states, L(A) is infinite iff it has a member whose
/// height lies in [n+1, 2n+1]. Tracks the achievable heights per state.
inline bool language_infinite(const ttk::TreeAutomaton& a) {
    const int n = static_cast<int>(a.states().size());
    const int top = 2 * n + 1;
    std::map<std::string, std::set<int>> heights;
    for (bool changed = true; changed;) {
        changed = false;
        for (const ttk::Transition& tr : a.transitions()) {
            std::set<int> acc = {0};
            for (const std::string& c : tr.to) {
                std::set<int> nxt;
                for (int x : acc)
                    for (int y : heights[c]) nxt.insert(std::max(x, y));
                acc = std::move(nxt);
            }
            for (int x : acc)
                if (x + 1 <= top && heights[tr.from].insert(x + 1).second) changed = true;
        }
    }
    for (const std::string& p : a.initial())
        for (int x : heights[p])
            if (x > n) return true;
    return false;
}

/// Outputs of state q on t by direct recursion over the rules; ignores filters.
inline std::set<Tree> apply(const ttk::Top& m, const std::string& q, const Tree& t);

inline std::set<Tree> instantiate(const ttk::Top& m, const Tree& rhs, const Tree& input) {
    if (rhs.is_call()) return oracle::apply(m, rhs.label(), input.child(rhs.child(0).index() - 1));
    std::vector<std::vector<Tree>> pools;
    for (const Tree& c : rhs.children()) {
        std::set<Tree> s = oracle::instantiate(m, c, input);
        if (s.empty()) return {};
        pools.emplace_back(s.begin(), s.end());
    }
    std::set<Tree> out;
    std::vector<Tree> cur;
    product_into(rhs.label(), pools, cur, out);
    return out;
}

inline std::set<Tree> apply(const ttk::Top& m, const std::string& q, const Tree& t) {
    std::set<Tree> out;
    for (const ttk::TopRule& r : m.rules()) {
        if (r.state != q || r.symbol != t.label()) continue;
        std::set<Tree> s = oracle::instantiate(m, r.rhs, t);
        out.insert(s.begin(), s.end());
    }
    return out;
}

inline std::set<Tree> apply(const ttk::Top& m, const Tree& t) {
    if (m.filter() && !oracle::accepts(*m.filter(), t)) return {};
    std::set<Tree> out;
    for (const std::string& q : m.initial()) {
        std::set<Tree> s = oracle::apply(m, q, t);
        out.insert(s.begin(), s.end());
    }
    return out;
}

namespace detail {

inline void calls_by_var(const Tree& rhs, std::map<int, std::set<std::string>>& out) {
    if (rhs.is_call()) {
        out[rhs.child(0).index()].insert(rhs.label());
        return;
    }
    for (const Tree& c : rhs.children()) calls_by_var(c, out);
}

using Memo = std::map<std::pair<std::set<std::string>, int>, std::set<Tree>>;

inline const std::set<Tree>& runs_for_all(const ttk::Top& m, const std::set<std::string>& s, int h, Memo& memo) {
    auto key = std::make_pair(s, h);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::set<Tree> out;
    if (s.empty()) {
        out = all_trees(m.input, h);
    } else if (h > 0) {
        std::vector<std::string> qs(s.begin(), s.end());
        for (const auto& [sym, k] : m.input.symbols()) {
            std::vector<std::vector<const ttk::TopRule*>> choices;
            for (const std::string& q : qs) {
                std::vector<const ttk::TopRule*> rs;
                for (const ttk::TopRule& r : m.rules())
                    if (r.state == q && r.symbol == sym) rs.push_back(&r);
                choices.push_back(rs);
            }
            std::vector<std::size_t> pick(qs.size(), 0);
            bool any = true;
            for (const auto& c : choices) any = any && !c.empty();
            while (any) {
                std::map<int, std::set<std::string>> need;
                for (std::size_t i = 0; i < qs.size(); ++i) calls_by_var(choices[i][pick[i]]->rhs, need);
                std::vector<std::vector<Tree>> pools;
                for (int i = 1; i <= k; ++i) {
                    const std::set<Tree>& sub = runs_for_all(m, need[i], h - 1, memo);
                    pools.emplace_back(sub.begin(), sub.end());
                }
                std::vector<Tree> cur;
                product_into(sym, pools, cur, out);
                std::size_t i = 0;
                while (i < pick.size() && ++pick[i] == choices[i].size()) pick[i++] = 0;
                if (i == pick.size()) break;
            }
        }
    }
    return memo.emplace(key, std::move(out)).first->second;
}

}  // namespace detail

/// Members of dom(M) of height <= h, generated top-down from state sets and
/// then confirmed by apply().
inline std::set<Tree> domain(const ttk::Top& m, int h) {
    detail::Memo memo;
    std::set<Tree> out;
    for (const std::string& q : m.initial())
        for (const Tree& t : detail::runs_for_all(m, {q}, h, memo))
            if (!oracle::apply(m, t).empty()) out.insert(t);
    return out;
}

/// MTT semantics by direct recursion, parameters passed as ground trees.
inline Tree eval(const ttk::Mtt& m, const std::string& q, const Tree& s, const std::vector<Tree>& ys);

inline Tree eval_rhs(const ttk::Mtt& m, const Tree& rhs, const Tree& s, const std::vector<Tree>& ys) {
    if (rhs.is_param()) return ys.at(rhs.index() - 1);
    std::vector<Tree> kids;
    const std::size_t from = rhs.is_call() ? 1 : 0;
    for (std::size_t i = from; i < rhs.arity(); ++i) kids.push_back(eval_rhs(m, rhs.child(i), s, ys));
    if (rhs.is_call()) return eval(m, rhs.label(), s.child(rhs.child(0).index() - 1), kids);
    return Tree::symbol(rhs.label(), kids);
}

/// A Var leaf in s is a hole: calls reaching it stay pending.
inline Tree eval(const ttk::Mtt& m, const std::string& q, const Tree& s, const std::vector<Tree>& ys) {
    if (s.is_var()) {
        std::vector<Tree> kids{s};
        kids.insert(kids.end(), ys.begin(), ys.end());
        return Tree::call(q, kids);
    }
    return eval_rhs(m, m.rhs(q, s.label()), s, ys);
}

/// q(s) with parameters left as Param leaves.
inline Tree translation(const ttk::Mtt& m, const std::string& q, const Tree& s) {
    std::vector<Tree> ys;
    for (int j = 1; j <= m.params(q); ++j) ys.push_back(Tree::param(j));
    return eval(m, q, s, ys);
}

/// States pending on the hole, in pre-order.
inline void pending(const Tree& t, std::vector<std::string>& out) {
    if (t.is_call() && t.child(0).is_var()) out.push_back(t.label());
    for (const Tree& c : t.children()) pending(c, out);
}

inline Tree eval(const ttk::Mtt& m, const Tree& s) { return eval(m, m.initial(), s, {}); }

inline int count_symbols(const Tree& t) {
    int n = t.is_symbol() ? 1 : 0;
    for (const Tree& c : t.children()) n += count_symbols(c);
    return n;
}

inline Tree shape_of(const Tree& t) {
    std::vector<Tree> kids;
    for (const Tree& c : t.children()) kids.push_back(shape_of(c));
    return Tree::symbol("#" + std::to_string(t.arity()), kids);
}

}  // namespace oracle
