#include "ttk/obligations.hpp"

#include <algorithm>
#include <functional>

namespace ttk {

std::string obligation_set_name(const ObligationSet& s) {
    std::string out = "{";
    bool first = true;
    for (const Obligation& o : s) {
        if (!first) out += ',';
        first = false;
        switch (o.kind) {
        case Obligation::Kind::Dom: out += o.name; break;
        case Obligation::Kind::Target: out += o.name + "=" + to_string(o.target); break;
        case Obligation::Kind::Aut: out += "@" + o.name; break;
        }
    }
    return out + "}";
}

ObligationExplorer::ObligationExplorer(const Top& m, const TreeAutomaton* aux, std::size_t cap)
    : m_(m), aux_(aux), cap_(cap) {
    if (aux_ && !(aux_->alphabet() == m_.input))
        throw Error("auxiliary automaton alphabet differs from the transducer input alphabet");
}

int ObligationExplorer::intern(const ObligationSet& s) {
    auto [it, inserted] = ids_.emplace(s, static_cast<int>(sets_.size()));
    if (inserted) {
        if (sets_.size() >= cap_)
            throw CapExceeded("obligation exploration exceeded " + std::to_string(cap_) + " sets");
        sets_.push_back(s);
    }
    return it->second;
}

namespace {

using Contribution = std::vector<ObligationSet>;
struct Alternative {
    Contribution children;
    std::size_t rule;
};

void add_calls(const Tree& rhs, Contribution& out) {
    if (rhs.is_call()) {
        const int i = rhs.child(0).index();
        out[static_cast<std::size_t>(i - 1)].insert(Obligation::dom(rhs.label()));
        return;
    }
    for (const Tree& c : rhs.children()) add_calls(c, out);
}

bool match_target(const Tree& rhs, const Tree& t, Contribution& out) {
    if (rhs.is_call()) {
        const int i = rhs.child(0).index();
        out[static_cast<std::size_t>(i - 1)].insert(Obligation::aim(rhs.label(), t));
        return true;
    }
    if (!rhs.is_symbol() || rhs.label() != t.label() || rhs.arity() != t.arity()) return false;
    for (std::size_t i = 0; i < rhs.arity(); ++i)
        if (!match_target(rhs.child(i), t.child(i), out)) return false;
    return true;
}

}  // namespace

const std::vector<ObligationExplorer::Move>& ObligationExplorer::moves(int id,
                                                                      const std::string& symbol) {
    const auto key = std::make_pair(id, symbol);
    if (auto it = moves_.find(key); it != moves_.end()) return it->second;

    const int k = m_.input.rank(symbol);
    const auto width = static_cast<std::size_t>(k);
    std::vector<std::vector<Alternative>> per_item;
    for (const Obligation& o : set(id)) {
        std::vector<Alternative> alts;
        switch (o.kind) {
        case Obligation::Kind::Dom:
            if (!m_.has_state(o.name)) break;
            for (std::size_t r : m_.rules_for(o.name, symbol)) {
                Contribution c(width);
                add_calls(m_.rules()[r].rhs, c);
                alts.push_back({std::move(c), r});
            }
            break;
        case Obligation::Kind::Target:
            if (!m_.has_state(o.name)) break;
            for (std::size_t r : m_.rules_for(o.name, symbol)) {
                Contribution c(width);
                if (match_target(m_.rules()[r].rhs, o.target, c)) alts.push_back({std::move(c), r});
            }
            break;
        case Obligation::Kind::Aut:
            if (!aux_) throw Error("automaton obligation without auxiliary automaton");
            for (const Transition* tr : aux_->transitions_from(o.name, symbol)) {
                Contribution c(width);
                for (std::size_t i = 0; i < width; ++i) c[i].insert(Obligation::aut(tr->to[i]));
                alts.push_back({std::move(c), no_rule});
            }
            break;
        }
        per_item.push_back(std::move(alts));
    }

    std::vector<Move> result;
    std::set<std::pair<std::vector<int>, std::vector<std::size_t>>> seen;
    std::vector<std::size_t> choice(per_item.size());
    Contribution acc(width);
    std::function<void(std::size_t, Contribution)> combine = [&](std::size_t i, Contribution cur) {
        if (i == per_item.size()) {
            Move mv;
            for (const auto& s : cur) mv.children.push_back(intern(s));
            mv.rules = choice;
            if (seen.insert({mv.children, mv.rules}).second) result.push_back(std::move(mv));
            if (result.size() > cap_) throw CapExceeded("too many obligation moves");
            return;
        }
        for (const Alternative& a : per_item[i]) {
            Contribution next = cur;
            for (std::size_t j = 0; j < width; ++j) next[j].insert(a.children[j].begin(), a.children[j].end());
            choice[i] = a.rule;
            combine(i + 1, std::move(next));
        }
    };
    combine(0, acc);
    return moves_.emplace(key, std::move(result)).first->second;
}

void ObligationExplorer::decide(int root) {
    if (decided_.count(root)) return;
    // Closure of undecided sets.
    std::vector<int> closure{root};
    std::set<int> in_closure{root};
    for (std::size_t i = 0; i < closure.size(); ++i) {
        for (const auto& [sym, _] : m_.input.symbols())
            for (const Move& mv : moves(closure[i], sym))
                for (int c : mv.children)
                    if (!decided_.count(c) && in_closure.insert(c).second) closure.push_back(c);
    }
    std::map<int, Tree> found;
    auto known = [&](int c) -> const Tree* {
        if (auto it = decided_.find(c); it != decided_.end()) return it->second ? &*it->second : nullptr;
        if (auto it = found.find(c); it != found.end()) return &it->second;
        return nullptr;
    };
    for (int round = 1;; ++round) {
        std::map<int, Tree> fresh;
        bool pending = false;
        for (int s : closure) {
            if (found.count(s)) continue;
            for (const auto& [sym, _] : m_.input.symbols()) {
                for (const Move& mv : moves(s, sym)) {
                    std::vector<Tree> kids;
                    bool ok = true;
                    for (int c : mv.children) {
                        const Tree* w = known(c);
                        if (!w) {
                            ok = false;
                            break;
                        }
                        kids.push_back(*w);
                    }
                    if (!ok) continue;
                    Tree t = Tree::symbol(sym, std::move(kids));
                    if (t.height() > round) {
                        pending = true;
                        continue;
                    }
                    auto it = fresh.find(s);
                    if (it == fresh.end() || enumeration_less(t, it->second)) fresh.insert_or_assign(s, t);
                }
            }
        }
        if (fresh.empty() && !pending) break;
        found.merge(fresh);
    }
    for (int s : closure) {
        auto it = found.find(s);
        decided_[s] = it == found.end() ? std::nullopt : std::optional<Tree>(it->second);
    }
}

bool ObligationExplorer::productive(int id) {
    decide(id);
    return decided_.at(id).has_value();
}

std::optional<Tree> ObligationExplorer::witness(int id) {
    decide(id);
    return decided_.at(id);
}

std::vector<int> ObligationExplorer::reachable(const std::vector<int>& roots) {
    std::vector<int> order;
    std::set<int> seen;
    for (int r : roots)
        if (productive(r) && seen.insert(r).second) order.push_back(r);
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (const auto& [sym, _] : m_.input.symbols())
            for (const Move& mv : moves(order[i], sym)) {
                if (!std::all_of(mv.children.begin(), mv.children.end(),
                                 [&](int c) { return productive(c); }))
                    continue;
                for (int c : mv.children)
                    if (seen.insert(c).second) order.push_back(c);
            }
    }
    return order;
}

TreeAutomaton ObligationExplorer::automaton(const std::vector<int>& roots, const std::string& name) {
    TreeAutomaton a(m_.input, name);
    const auto states = reachable(roots);
    for (int r : roots)
        if (productive(r)) a.add_initial(obligation_set_name(set(r)));
    if (a.initial().empty()) a.add_initial("(empty)");
    for (int s : states) {
        for (const auto& [sym, _] : m_.input.symbols())
            for (const Move& mv : moves(s, sym)) {
                if (!std::all_of(mv.children.begin(), mv.children.end(),
                                 [&](int c) { return productive(c); }))
                    continue;
                std::vector<std::string> to;
                for (int c : mv.children) to.push_back(obligation_set_name(set(c)));
                a.add_transition(obligation_set_name(set(s)), sym, std::move(to));
            }
    }
    return a;
}

}  // namespace ttk
