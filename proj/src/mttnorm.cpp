#include "ttk/mttnorm.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include "ttk/spcheck.hpp"

namespace ttk {

namespace {

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

std::string unwrap(const std::string& s) {
    if (s.size() >= 2 && s.front() == '(' && s.back() == ')') return s.substr(1, s.size() - 2);
    return s;
}

void collect_params(const Tree& t, std::set<int>& out) {
    if (t.is_param()) out.insert(t.index());
    for (const Tree& c : t.children()) collect_params(c, out);
}

Tree map_params(const Tree& t, const std::map<int, int>& to) {
    if (t.is_param()) {
        auto it = to.find(t.index());
        if (it == to.end()) throw ConstructionBug("parameter y" + std::to_string(t.index()) + " outside helper");
        return Tree::param(it->second);
    }
    if (t.arity() == 0) return t;
    std::vector<Tree> kids;
    for (const Tree& c : t.children()) kids.push_back(map_params(c, to));
    if (t.is_call()) return Tree::call(t.label(), std::move(kids));
    return Tree::symbol(t.label(), std::move(kids));
}

using HelperMaker = std::function<Tree(const std::string& q, int var, const Path& p, std::vector<Tree> args)>;

Tree down_impl(const Tree& rhs, const Path& p, std::size_t i, const PrefixView& view, const HelperMaker& make) {
    if (i == p.length()) return rhs;
    if (rhs.is_symbol()) {
        const int step = p[i];
        if (step < 1 || static_cast<std::size_t>(step) > rhs.arity())
            throw ConstructionBug("path " + p.str() + " leaves " + to_string(rhs, CallStyle::Mtt));
        return down_impl(rhs.child(static_cast<std::size_t>(step) - 1), p, i + 1, view, make);
    }
    if (rhs.is_call()) {
        const int var = rhs.child(0).index();
        if (auto pred = view(rhs.label(), var)) {
            const Tree* node = &*pred;
            for (std::size_t j = i;; ++j) {
                if (node->is_param())
                    return down_impl(rhs.child(static_cast<std::size_t>(node->index())), p, j, view, make);
                if (j == p.length() || !node->is_symbol()) break;
                if (static_cast<std::size_t>(p[j]) > node->arity())
                    throw ConstructionBug("path " + p.str() + " leaves the predicted prefix " +
                                          to_string(*pred, CallStyle::Mtt));
                node = &node->child(static_cast<std::size_t>(p[j]) - 1);
            }
        }
        std::vector<int> rest(p.steps().begin() + static_cast<std::ptrdiff_t>(i), p.steps().end());
        std::vector<Tree> args(rhs.children().begin() + 1, rhs.children().end());
        return make(rhs.label(), var, Path(std::move(rest)), std::move(args));
    }
    throw ConstructionBug("path " + p.str() + " ends below a parameter in " + to_string(rhs, CallStyle::Mtt));
}

struct Base {
    enum class Kind { Orig, Path, Const };
    Kind kind = Kind::Orig;
    std::string q;
    Path p;
    /// Parameters of q kept by a path helper, in order.
    std::vector<int> params;
    std::string a;
    int c = 0;
};

std::string state_name(const std::string& base, int ctx) { return "(" + base + ";" + std::to_string(ctx) + ")"; }

class Normalizer {
public:
    Normalizer(const Mtt& m, Relabeling r, int b, std::size_t cap)
        : m_(m), r_(std::move(r)), b_(b), cap_(cap) {}

    Normalization run() {
        for (const std::string& q : m_.states()) intern(Base{Base::Kind::Orig, q, {}, {}, {}, 0});
        const std::string root_name = m_.initial();
        const int ctx0 = context({root_name});
        std::deque<std::pair<int, int>> work;
        std::set<std::pair<int, int>> seen;
        auto push = [&](int ctx, int cls) {
            for (std::size_t rid = 0; rid < r_.legend.size(); ++rid) {
                if (cls >= 0 && r_.legend[rid].cls != cls) continue;
                auto key = std::make_pair(ctx, static_cast<int>(rid));
                if (!seen.insert(key).second) continue;
                if (seen.size() > cap_)
                    throw CapExceeded("normalization exceeded cap of " + std::to_string(cap_) + " rule families");
                work.push_back(key);
            }
        };
        push(ctx0, -1);
        while (!work.empty()) {
            auto [ctx, rid] = work.front();
            work.pop_front();
            for (auto [child_ctx, cls] : family(ctx, rid)) push(child_ctx, cls);
        }

        Normalization out;
        out.b = b_;
        out.contexts = contexts_;
        out.max_const_helpers = max_const_;
        Mtt mp(m_.name + "_norm", r_.output, m_.output);
        for (const auto& [name, base] : states_) {
            mp.add_state(name, arity(bases_.at(base)));
            out.base_of[name] = base;
        }
        mp.set_initial(state_name(root_name, ctx0));
        for (const auto& [key, rhs] : rules_) mp.add_rule(key.first, key.second, rhs);
        out.mtt = std::move(mp);
        out.plain_rules.assign(plain_.begin(), plain_.end());
        out.relabeling = std::move(r_);
        return out;
    }

private:
    struct Site {
        std::size_t rule;
        Path at;
    };

    int arity(const Base& x) const {
        switch (x.kind) {
        case Base::Kind::Orig: return m_.params(x.q);
        case Base::Kind::Path: return static_cast<int>(x.params.size());
        case Base::Kind::Const: return m_.output.rank(x.a);
        }
        return 0;
    }

    std::string intern(const Base& x) {
        std::string name;
        switch (x.kind) {
        case Base::Kind::Orig: name = x.q; break;
        case Base::Kind::Path: {
            name = path_helper_name(x.q, x.p);
            if (static_cast<int>(x.params.size()) != m_.params(x.q)) {
                std::string js;
                for (int j : x.params) js += (js.empty() ? "" : ",") + std::to_string(j);
                name = name.substr(0, name.size() - 1) + ",[" + js + "])";
            }
            break;
        }
        case Base::Kind::Const: name = const_helper_name(x.a, x.c); break;
        }
        bases_.emplace(name, x);
        return name;
    }

    int context(const std::vector<std::string>& seq) {
        auto [it, inserted] = ctx_ids_.emplace(seq, static_cast<int>(contexts_.size()));
        if (inserted) contexts_.push_back(seq);
        return it->second;
    }

    const Tree& witness(int cls) const { return r_.witnesses.at(static_cast<std::size_t>(cls)); }

    Tree translation(const std::string& q, int cls) {
        auto key = std::make_pair(q, cls);
        auto it = translations_.find(key);
        if (it == translations_.end()) it = translations_.emplace(key, q_translation(m_, q, witness(cls))).first;
        return it->second;
    }

    int size(const std::string& base, int cls) {
        const Base& x = bases_.at(base);
        switch (x.kind) {
        case Base::Kind::Orig: return translation(x.q, cls).size();
        case Base::Kind::Path: return navigate(translation(x.q, cls), x.p).size();
        case Base::Kind::Const: return 1;
        }
        return 0;
    }

    /// A path helper call for (q(s))/p keeping the arguments whose parameters occur below p.
    Tree helper_call(const std::string& q, int var, const Path& p, const std::vector<Tree>& args, int cls) {
        const Tree sub = navigate(translation(q, cls), p);
        std::set<int> used;
        collect_params(sub, used);
        Base x{Base::Kind::Path, q, p, std::vector<int>(used.begin(), used.end()), {}, 0};
        std::vector<Tree> kids{Tree::var(var)};
        for (int j : x.params) kids.push_back(args.at(static_cast<std::size_t>(j) - 1));
        return Tree::call(intern(x), std::move(kids));
    }

    Tree raw_rhs(const Base& x, const std::string& sym, const std::vector<int>& kids) {
        switch (x.kind) {
        case Base::Kind::Orig: return m_.rhs(x.q, sym);
        case Base::Kind::Const: {
            std::vector<Tree> ys;
            for (int j = 1; j <= m_.output.rank(x.a); ++j) ys.push_back(Tree::param(j));
            return Tree::symbol(x.a, std::move(ys));
        }
        case Base::Kind::Path: {
            PrefixView view = [&](const std::string& q, int var) -> std::optional<Tree> {
                return r_.prefixes.prefix(kids.at(static_cast<std::size_t>(var) - 1), q);
            };
            HelperMaker make = [&](const std::string& q, int var, const Path& p, std::vector<Tree> args) {
                return helper_call(q, var, p, args, kids.at(static_cast<std::size_t>(var) - 1));
            };
            Tree t = down_impl(m_.rhs(x.q, sym), x.p, 0, view, make);
            std::map<int, int> to;
            for (std::size_t i = 0; i < x.params.size(); ++i) to[x.params[i]] = static_cast<int>(i) + 1;
            return map_params(t, to);
        }
        }
        return Tree();
    }

    void sites(const Tree& t, std::size_t rule, const Path& at, int var, std::vector<Site>& out) const {
        if (t.is_call() && t.child(0).index() == var) out.push_back({rule, at});
        for (std::size_t i = 0; i < t.arity(); ++i) sites(t.child(i), rule, at.child(static_cast<int>(i) + 1), var, out);
    }

    std::vector<Site> calls_on(const std::vector<Tree>& rhs, int var) const {
        std::vector<Site> out;
        for (std::size_t i = 0; i < rhs.size(); ++i) sites(rhs[i], i, Path(), var, out);
        return out;
    }

    int child_delay(const std::vector<Tree>& rhs, int var, int cls) {
        int total = 0;
        for (const Site& s : calls_on(rhs, var)) total += size(navigate(rhs[s.rule], s.at).label(), cls);
        return total - witness(cls).size();
    }

    /// The predicted output of a call, with its parameters replaced by the call's arguments' indices.
    std::optional<Tree> predicted(const Tree& call, int cls) {
        const Base& x = bases_.at(call.label());
        if (x.kind == Base::Kind::Const) return std::nullopt;
        Tree pre = r_.prefixes.prefix(cls, x.q);
        if (x.kind == Base::Kind::Path) {
            auto sub = try_navigate(pre, x.p);
            if (!sub) return std::nullopt;
            std::map<int, int> to;
            for (std::size_t i = 0; i < x.params.size(); ++i) to[x.params[i]] = static_cast<int>(i) + 1;
            std::set<int> used;
            collect_params(*sub, used);
            for (int j : used)
                if (!to.count(j)) return std::nullopt;
            pre = map_params(*sub, to);
        }
        if (!pre.is_symbol()) return std::nullopt;
        return pre;
    }

    /// Takes `budget` symbols of the predicted prefix in pre-order; the rest becomes helper calls.
    Tree splice(const Tree& node, const Path& pi, const Tree& call, int var, int cls, int& budget) {
        const Base x = bases_.at(call.label());
        std::vector<Tree> args(call.children().begin() + 1, call.children().end());
        if (node.is_param()) return args.at(static_cast<std::size_t>(node.index()) - 1);
        if (node.is_symbol() && budget > 0) {
            --budget;
            std::vector<Tree> kids;
            for (std::size_t i = 0; i < node.arity(); ++i)
                kids.push_back(splice(node.child(i), pi.child(static_cast<int>(i) + 1), call, var, cls, budget));
            return Tree::symbol(node.label(), std::move(kids));
        }
        // Arguments of the original call are indexed by q's parameters.
        std::vector<Tree> full(static_cast<std::size_t>(m_.params(x.q)));
        if (x.kind == Base::Kind::Orig) {
            full = args;
        } else {
            for (std::size_t i = 0; i < x.params.size(); ++i) full[static_cast<std::size_t>(x.params[i]) - 1] = args[i];
        }
        return helper_call(x.q, var, x.p.concat(pi), full, cls);
    }

    void remove_positive(std::vector<Tree>& rhs, int var, int cls, int delta) {
        std::vector<Site> cs = calls_on(rhs, var);
        std::vector<std::size_t> order(cs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return arity(bases_.at(navigate(rhs[cs[a].rule], cs[a].at).label())) <
                   arity(bases_.at(navigate(rhs[cs[b].rule], cs[b].at).label()));
        });
        std::map<std::size_t, int> take;
        int remaining = delta;
        for (std::size_t i : order) {
            if (remaining == 0) break;
            auto pre = predicted(navigate(rhs[cs[i].rule], cs[i].at), cls);
            if (!pre) continue;
            const int n = std::min(remaining, pre->size());
            take[i] = n;
            remaining -= n;
        }
        if (remaining > 0)
            throw ConstructionBug("predicted prefixes are too small to absorb delay " + std::to_string(delta));
        // Rewrite deepest sites first so that shallower paths stay valid.
        for (auto it = take.rbegin(); it != take.rend(); ++it) {
            const Site& s = cs[it->first];
            const Tree call = navigate(rhs[s.rule], s.at);
            int budget = it->second;
            const Tree pre = *predicted(call, cls);
            rhs[s.rule] = graft(rhs[s.rule], s.at, splice(pre, Path(), call, var, cls, budget));
        }
    }

    void remove_negative(std::vector<Tree>& rhs, const std::vector<std::string>& ctx, int var, int count) {
        struct Node {
            std::size_t rule;
            Path at;
            int rank;
            std::size_t order;
        };
        std::vector<Node> nodes_;
        std::size_t order = 0;
        std::function<void(const Tree&, std::size_t, const Path&)> walk = [&](const Tree& t, std::size_t rule,
                                                                             const Path& at) {
            if (t.is_symbol()) nodes_.push_back({rule, at, static_cast<int>(t.arity()), order++});
            for (std::size_t i = 0; i < t.arity(); ++i) walk(t.child(i), rule, at.child(static_cast<int>(i) + 1));
        };
        for (std::size_t i = 0; i < rhs.size(); ++i) walk(rhs[i], i, Path());
        std::stable_sort(nodes_.begin(), nodes_.end(),
                         [](const Node& a, const Node& b) { return (a.rank > 0) < (b.rank > 0); });
        if (static_cast<int>(nodes_.size()) < count)
            throw ConstructionBug("not enough output nodes to move " + std::to_string(count) + " below x" +
                                  std::to_string(var));
        nodes_.resize(static_cast<std::size_t>(count));

        std::set<std::string> used;
        for (const Site& s : calls_on(rhs, var)) used.insert(navigate(rhs[s.rule], s.at).label());
        std::vector<std::string> names(nodes_.size());
        // A helper's own node moves down with it.
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const Base& owner = bases_.at(ctx[nodes_[i].rule]);
            if (owner.kind == Base::Kind::Const && nodes_[i].at.empty() && !used.count(ctx[nodes_[i].rule])) {
                names[i] = ctx[nodes_[i].rule];
                used.insert(names[i]);
            }
        }
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (!names[i].empty()) continue;
            const std::string a = navigate(rhs[nodes_[i].rule], nodes_[i].at).label();
            for (int c = 1;; ++c) {
                Base x{Base::Kind::Const, {}, {}, {}, a, c};
                std::string name = const_helper_name(a, c);
                if (used.count(name)) continue;
                names[i] = intern(x);
                used.insert(name);
                break;
            }
        }
        std::vector<std::size_t> idx(nodes_.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return nodes_[a].order > nodes_[b].order; });
        for (std::size_t i : idx) {
            const Node& n = nodes_[i];
            const Tree& old = navigate(rhs[n.rule], n.at);
            std::vector<Tree> kids{Tree::var(var)};
            kids.insert(kids.end(), old.children().begin(), old.children().end());
            rhs[n.rule] = graft(rhs[n.rule], n.at, Tree::call(names[i], std::move(kids)));
        }
    }

    std::vector<std::pair<int, int>> family(int ctx_id, int rid) {
        const std::vector<std::string> ctx = contexts_.at(static_cast<std::size_t>(ctx_id));
        const Relabeling::Entry& e = r_.legend.at(static_cast<std::size_t>(rid));
        const int k = static_cast<int>(e.children.size());

        int own = 0;
        for (const auto& x : ctx) own += size(x, e.cls);
        if (own != witness(e.cls).size())
            throw ConstructionBug("context " + std::to_string(ctx_id) + " has nonzero delay on " +
                                  annotated_symbol(e.symbol, rid));

        std::vector<Tree> rhs;
        for (const auto& x : ctx) rhs.push_back(raw_rhs(bases_.at(x), e.symbol, e.children));

        for (int j = 1; j <= k; ++j) {
            const int cls = e.children[static_cast<std::size_t>(j) - 1];
            const int d = child_delay(rhs, j, cls);
            if (d > 0) remove_positive(rhs, j, cls, d);
        }
        int symbols = 0, delays = 0;
        for (const Tree& t : rhs) symbols += t.size();
        std::vector<int> delta(static_cast<std::size_t>(k));
        for (int j = 1; j <= k; ++j) {
            delta[static_cast<std::size_t>(j) - 1] = child_delay(rhs, j, e.children[static_cast<std::size_t>(j) - 1]);
            if (delta[static_cast<std::size_t>(j) - 1] > 0) throw ConstructionBug("positive delay survived splicing");
            delays += delta[static_cast<std::size_t>(j) - 1];
        }
        if (symbols != 1 - delays)
            throw ConstructionBug("size ledger violated on " + annotated_symbol(e.symbol, rid) + ": " +
                                  std::to_string(symbols) + " symbols, delays sum to " + std::to_string(delays));
        for (int j = 1; j <= k; ++j)
            if (delta[static_cast<std::size_t>(j) - 1] < 0) remove_negative(rhs, ctx, j, -delta[static_cast<std::size_t>(j) - 1]);

        // Child contexts and renaming.
        std::vector<std::pair<int, int>> next;
        std::map<std::pair<std::string, int>, std::string> rename;
        for (int j = 1; j <= k; ++j) {
            std::vector<std::string> seq;
            std::size_t consts = 0;
            for (const Site& s : calls_on(rhs, j)) {
                const std::string& base = navigate(rhs[s.rule], s.at).label();
                if (std::find(seq.begin(), seq.end(), base) != seq.end())
                    throw ConstructionBug("state " + base + " called twice on one input node");
                seq.push_back(base);
                if (bases_.at(base).kind == Base::Kind::Const) ++consts;
            }
            max_const_ = std::max(max_const_, consts);
            const int c = context(seq);
            for (const auto& base : seq) {
                rename[{base, j}] = state_name(base, c);
                states_.emplace(state_name(base, c), base);
            }
            next.emplace_back(c, e.children[static_cast<std::size_t>(j) - 1]);
        }
        std::function<Tree(const Tree&)> named = [&](const Tree& t) -> Tree {
            if (t.arity() == 0) return t;
            std::vector<Tree> kids;
            for (const Tree& c : t.children()) kids.push_back(named(c));
            if (t.is_call()) return Tree::call(rename.at({t.label(), t.child(0).index()}), std::move(kids));
            return Tree::symbol(t.label(), std::move(kids));
        };
        const std::string sym = annotated_symbol(e.symbol, rid);
        for (std::size_t i = 0; i < ctx.size(); ++i) {
            const std::string st = state_name(ctx[i], ctx_id);
            states_.emplace(st, ctx[i]);
            rules_[{st, sym}] = named(rhs[i]);
            plain_.insert(plain_rule(ctx[i], e.symbol, k, rhs[i]));
        }
        return next;
    }

    std::string plain_rule(const std::string& base, const std::string& sym, int k, const Tree& rhs) const {
        std::string s = "<" + base + ", " + sym;
        if (k > 0) {
            s += '(';
            for (int i = 1; i <= k; ++i) s += (i > 1 ? ",x" : "x") + std::to_string(i);
            s += ')';
        }
        s += '>';
        const int p = arity(bases_.at(base));
        if (p > 0) {
            s += '(';
            for (int j = 1; j <= p; ++j) s += (j > 1 ? ",y" : "y") + std::to_string(j);
            s += ')';
        }
        return s + " -> " + to_string(rhs, CallStyle::Mtt);
    }

    const Mtt& m_;
    Relabeling r_;
    int b_;
    std::size_t cap_;
    std::map<std::string, Base> bases_;
    std::map<std::vector<std::string>, int> ctx_ids_;
    std::vector<std::vector<std::string>> contexts_;
    std::map<std::string, std::string> states_;
    std::map<std::pair<std::string, std::string>, Tree> rules_;
    std::set<std::string> plain_;
    std::map<std::pair<std::string, int>, Tree> translations_;
    std::size_t max_const_ = 0;
};

/// Splits an M′ state name "(base;ctx)" into its base.
std::optional<std::string> base_of_state(const std::string& name) {
    if (name.empty() || name.front() != '(') return std::nullopt;
    auto parts = split_top_level(unwrap(name), ';');
    if (parts.size() != 2) return std::nullopt;
    return parts[0];
}

}  // namespace

std::string annotated_symbol(const std::string& symbol, int rid) {
    return "(" + symbol + ";" + std::to_string(rid) + ")";
}

std::string plain_symbol(const std::string& name) {
    if (name.empty() || name.front() != '(') return name;
    auto parts = split_top_level(unwrap(name), ';');
    return parts.size() == 2 ? parts[0] : name;
}

std::string path_helper_name(const std::string& q, const Path& p) { return "(" + q + "," + p.str() + ")"; }

std::string const_helper_name(const std::string& a, int c) { return "(" + std::to_string(c) + "," + a + ")"; }

Tree down_path(const Tree& rhs, const Path& p, const PrefixView& prefix) {
    HelperMaker make = [](const std::string& q, int var, const Path& rest, std::vector<Tree> args) {
        args.insert(args.begin(), Tree::var(var));
        return Tree::call(path_helper_name(q, rest), std::move(args));
    };
    return down_impl(rhs, p, 0, prefix, make);
}

Tree Relabeling::apply(const Tree& t) const {
    std::function<std::pair<Tree, int>(const Tree&)> go = [&](const Tree& s) -> std::pair<Tree, int> {
        std::vector<Tree> kids;
        std::vector<int> classes;
        for (const Tree& c : s.children()) {
            auto [ct, cc] = go(c);
            kids.push_back(std::move(ct));
            classes.push_back(cc);
        }
        auto it = index.find({s.label(), classes});
        if (it == index.end()) throw Error("no annotation for " + to_string(s));
        const Entry& e = legend[static_cast<std::size_t>(it->second)];
        return {Tree::symbol(annotated_symbol(s.label(), it->second), std::move(kids)), e.cls};
    };
    return go(t).first;
}

std::string Relabeling::legend_text() const {
    std::ostringstream os;
    for (std::size_t rid = 0; rid < legend.size(); ++rid) {
        const Entry& e = legend[rid];
        os << annotated_symbol(e.symbol, static_cast<int>(rid)) << ": class " << e.cls << " children [";
        for (std::size_t i = 0; i < e.children.size(); ++i) os << (i ? "," : "") << e.children[i];
        os << "]";
        for (std::size_t q = 0; q < prefixes.states.size(); ++q)
            os << " " << prefixes.states[q] << "^=" << to_string(prefixes.classes[static_cast<std::size_t>(e.cls)][q], CallStyle::Mtt);
        os << "\n";
    }
    return os.str();
}

Relabeling build_relabeling(const Mtt& m, int b, std::size_t cap) {
    Relabeling r;
    r.input = m.input;
    r.prefixes = build_prefix_table(m, b, cap);
    for (const auto& [key, cls] : r.prefixes.transitions) {
        const int rid = static_cast<int>(r.legend.size());
        r.legend.push_back({key.first, key.second, cls});
        r.index[key] = rid;
        r.output.add(annotated_symbol(key.first, rid), static_cast<int>(key.second.size()));
    }
    r.witnesses.assign(r.prefixes.classes.size(), Tree());
    std::vector<bool> known(r.prefixes.classes.size(), false);
    for (bool changed = true; changed;) {
        changed = false;
        std::vector<bool> before = known;
        for (const auto& [key, cls] : r.prefixes.transitions) {
            if (known[static_cast<std::size_t>(cls)]) continue;
            bool ready = true;
            for (int c : key.second) ready = ready && before[static_cast<std::size_t>(c)];
            if (!ready) continue;
            std::vector<Tree> kids;
            for (int c : key.second) kids.push_back(r.witnesses[static_cast<std::size_t>(c)]);
            r.witnesses[static_cast<std::size_t>(cls)] = Tree::symbol(key.first, std::move(kids));
            known[static_cast<std::size_t>(cls)] = true;
            changed = true;
        }
    }
    return r;
}

Normalization normalize_one_to_one(const Mtt& m, int max_height, std::size_t cap) {
    ParamReport pr = param_discipline_check(m);
    if (!pr.passes()) throw Error("parameter discipline violated: " + pr.violations.front());
    if (!decide_shape_preserving_mtt(m, max_height).preserving())
        throw Error("transducer is not shape-preserving up to height " + std::to_string(max_height));
    const int b = build_delay_table(m, max_height).b;
    return Normalizer(m, build_relabeling(m, b, cap), b, cap).run();
}

NormalizationReport verify_normalization(const Mtt& m, const Relabeling* r, const Mtt& normalized,
                                         int max_height) {
    NormalizationReport rep;
    auto note = [](std::vector<std::string>& v, std::string msg) {
        if (v.size() < 20) v.push_back(std::move(msg));
    };
    for (const Tree& t : enumerate_trees(m.input, max_height)) {
        ++rep.inputs;
        const Tree rt = r ? r->apply(t) : t;
        if (!rep.mismatch && evaluate(normalized, rt) != evaluate(m, t)) rep.mismatch = t;
        if (!rep.not_one_to_one && !is_one_to_one_on(normalized, rt)) rep.not_one_to_one = t;
        for (const Path& u : nodes(rt)) {
            const Tree& sub = navigate(rt, u);
            int total = 0;
            for (const std::string& st : state_sequence(normalized, rt, u)) {
                const Tree out = q_translation(normalized, st, sub);
                total += out.size();
                auto base = base_of_state(st);
                if (!base || base->empty() || base->front() != '(') continue;
                auto parts = split_top_level(unwrap(*base), ',');
                if (parts.size() < 2 || !m.has_state(parts[0])) continue;
                const Path p = Path::parse(parts[1]);
                std::map<int, int> to;
                if (parts.size() == 3) {
                    std::string js = parts[2].substr(1, parts[2].size() - 2);
                    int i = 1;
                    std::istringstream is(js);
                    for (std::string tok; std::getline(is, tok, ',');) to[std::stoi(tok)] = i++;
                } else {
                    for (int j = 1; j <= m.params(parts[0]); ++j) to[j] = j;
                }
                const Tree expect = map_params(navigate(q_translation(m, parts[0], navigate(t, u)), p), to);
                if (out != expect)
                    note(rep.helper_violations, st + " on " + to_string(navigate(t, u)) + " yields " +
                                                    to_string(out, CallStyle::Mtt) + ", expected " +
                                                    to_string(expect, CallStyle::Mtt));
            }
            const int d = total - sub.size();
            if (d != 0)
                note(rep.nonzero_delays, "delay " + std::to_string(d) + " at " + u.str() + " of " + to_string(t));
        }
    }
    return rep;
}

}  // namespace ttk
