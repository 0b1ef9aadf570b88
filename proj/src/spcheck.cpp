#include "ttk/spcheck.hpp"

#include <sstream>

#include "ttk/topt_algebra.hpp"

namespace ttk {

namespace {

int leaf_count(const Tree& t) {
    if (t.is_call()) return 0;
    if (t.arity() == 0) return t.is_symbol() ? 1 : 0;
    int n = 0;
    for (const Tree& c : t.children()) n += leaf_count(c);
    return n;
}

bool has_output_constant(const Tree& t) {
    if (t.is_call()) return false;
    if (t.is_symbol() && t.arity() == 0) return true;
    for (const Tree& c : t.children())
        if (has_output_constant(c)) return true;
    return false;
}

std::optional<Tree> output_with_shape(const Top& m, const Tree& s, const Tree& sh, std::size_t cap) {
    for (const Tree& o : apply_all(m, s, cap))
        if (shape(o) == sh) return o;
    return std::nullopt;
}

}  // namespace

std::string Verdict::describe() const {
    std::ostringstream os;
    if (preserving()) {
        os << "shape-preserving up to height " << height;
        return os.str();
    }
    os << "not shape-preserving";
    switch (evidence) {
        case Evidence::Structural: os << " (structural: " << rule << ")"; break;
        case Evidence::NonFunctional: os << " (two outputs with different shapes)"; break;
        case Evidence::ShapeMismatch: os << " (output shape differs from input shape)"; break;
        case Evidence::None: break;
    }
    if (input) os << "\n  input:  " << to_string(*input);
    for (const Tree& o : outputs) os << "\n  output: " << to_string(o);
    return os.str();
}

std::optional<std::string> structural_check(const Top& m) {
    for (const TopRule& r : m.rules()) {
        int k = m.input.rank(r.symbol);
        if (k >= 1 && has_output_constant(r.rhs)) return rule_string(r, k);
        if (k == 0 && leaf_count(r.rhs) != 1) return rule_string(r, k);
    }
    return std::nullopt;
}

std::optional<std::tuple<Tree, Tree, Tree>> functionality_counterexample(const Top& m,
                                                                         const TreeAutomaton& dom,
                                                                         int max_height,
                                                                         std::size_t cap) {
    for (const Tree& t : enumerate_language(dom, max_height)) {
        std::set<Tree> outs = apply_all(m, t, cap);
        if (outs.size() >= 2) {
            auto it = outs.begin();
            Tree a = *it++;
            return std::make_tuple(t, a, *it);
        }
    }
    return std::nullopt;
}

std::optional<Tree> equivalence_counterexample(const Top& m1, const Top& m2, const TreeAutomaton& dom,
                                               int max_height, std::size_t cap) {
    for (const Tree& t : enumerate_language(dom, max_height)) {
        std::set<Tree> a = apply_all(m1, t, cap);
        std::set<Tree> b = apply_all(m2, t, cap);
        if (a.size() > 1 || b.size() > 1) throw NotFunctional("transducer is not functional on " + to_string(t), t);
        if (a != b) return t;
    }
    return std::nullopt;
}

Verdict decide_shape_preserving(const Top& input, int max_height, std::size_t cap) {
    Top m = trim(input);
    TreeAutomaton dom = domain_automaton(m);
    Verdict v;
    v.height = max_height;

    if (auto rule = structural_check(m)) {
        v.kind = Verdict::Kind::NotPreserving;
        v.evidence = Verdict::Evidence::Structural;
        v.rule = *rule;
        // Look for a concrete input; give up quietly once the domain gets too large.
        try {
            for (int h = 1; h <= max_height; ++h) {
                for (const Tree& t : enumerate_language(dom, h, cap)) {
                    if (t.height() != h) continue;
                    Tree sh = shape(t);
                    for (const Tree& o : apply_all(m, t, cap)) {
                        if (shape(o) != sh) {
                            v.input = t;
                            v.outputs = {o};
                            return v;
                        }
                    }
                }
            }
        } catch (const CapExceeded&) {
        }
        return v;
    }
    v.structural_passed = true;

    Top d = compose_dlnt(m, generate_shape_top(m.output));
    if (auto fc = functionality_counterexample(d, dom, max_height, cap)) {
        auto& [s, sh1, sh2] = *fc;
        v.kind = Verdict::Kind::NotPreserving;
        v.evidence = Verdict::Evidence::NonFunctional;
        v.input = s;
        v.outputs = {*output_with_shape(m, s, sh1, cap), *output_with_shape(m, s, sh2, cap)};
        return v;
    }

    Top e = restrict(generate_shape_top(m.input), dom);
    if (auto cex = equivalence_counterexample(d, e, dom, max_height, cap)) {
        v.kind = Verdict::Kind::NotPreserving;
        v.evidence = Verdict::Evidence::ShapeMismatch;
        v.input = *cex;
        Tree sh = shape(*cex);
        for (const Tree& o : apply_all(m, *cex, cap)) {
            if (shape(o) != sh) {
                v.outputs = {o};
                break;
            }
        }
        return v;
    }
    return v;
}

Verdict decide_shape_preserving_mtt(const Mtt& m, int max_height) {
    Verdict v;
    v.height = max_height;
    v.structural_passed = true;
    for (const Tree& t : enumerate_trees(m.input, max_height)) {
        Tree o = evaluate(m, t);
        if (shape(o) != shape(t)) {
            v.kind = Verdict::Kind::NotPreserving;
            v.evidence = Verdict::Evidence::ShapeMismatch;
            v.input = t;
            v.outputs = {o};
            return v;
        }
    }
    return v;
}

bool verify_verdict(const Top& m, const Verdict& v, std::size_t cap) {
    if (v.preserving()) return true;
    if (!v.input) return v.evidence == Verdict::Evidence::Structural && structural_check(m).has_value();
    std::set<Tree> outs = apply_all(m, *v.input, cap);
    for (const Tree& o : v.outputs)
        if (!outs.count(o)) return false;
    switch (v.evidence) {
        case Verdict::Evidence::NonFunctional:
            return v.outputs.size() == 2 && shape(v.outputs[0]) != shape(v.outputs[1]);
        case Verdict::Evidence::Structural:
        case Verdict::Evidence::ShapeMismatch:
            return v.outputs.size() == 1 && shape(v.outputs[0]) != shape(*v.input);
        case Verdict::Evidence::None: return false;
    }
    return false;
}

bool verify_verdict(const Mtt& m, const Verdict& v) {
    if (v.preserving()) return true;
    if (!v.input || v.outputs.size() != 1) return false;
    Tree o = evaluate(m, *v.input);
    return o == v.outputs[0] && shape(o) != shape(*v.input);
}

}  // namespace ttk
