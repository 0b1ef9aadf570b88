#include <doctest.h>

#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "ttk/spcheck.hpp"
#include "ttk/topt_algebra.hpp"

using namespace ttk;

namespace {

Top with_rule_replaced(const std::string& file, const std::string& from, const std::string& to) {
    std::string text = read_file(fixture::path(file));
    text.replace(text.find(from), from.size(), to);
    return parse_top(text);
}

/// First domain member, in enumeration order, with an output whose shape
/// differs from the input's.
std::optional<Tree> brute_first_mismatch(const Top& m, int h) {
    std::set<Tree> dom = oracle::domain(m, h);
    std::vector<Tree> ordered(dom.begin(), dom.end());
    std::sort(ordered.begin(), ordered.end(), enumeration_less);
    for (const Tree& t : ordered)
        for (const Tree& o : oracle::apply(m, t))
            if (oracle::shape_of(o) != oracle::shape_of(t)) return t;
    return std::nullopt;
}

Verdict mismatch_at(const Tree& input, const Tree& output) {
    Verdict v;
    v.kind = Verdict::Kind::NotPreserving;
    v.evidence = Verdict::Evidence::ShapeMismatch;
    v.input = input;
    v.outputs = {output};
    return v;
}

}  // namespace

TEST_CASE("structural check") {
    CHECK_FALSE(structural_check(fixture::m0()).has_value());
    CHECK_FALSE(structural_check(fixture::intro_top()).has_value());
    Top leafy = with_rule_replaced("m0.top", "h(h(f(q2(x1),q3(x1))))", "h(h(f(q2(x1),a)))");
    auto w = structural_check(leafy);
    REQUIRE(w.has_value());
    CHECK(w->find("q1(h(x1))") != std::string::npos);
    Top two_leaves = with_rule_replaced("m0.top", "ql(a) -> a", "ql(a) -> f(a,a)");
    CHECK(structural_check(two_leaves).has_value());
}

TEST_CASE("functionality") {
    Top m0 = fixture::m0();
    TreeAutomaton dom = domain_automaton(m0);
    CHECK_FALSE(functionality_counterexample(compose_dlnt(m0, generate_shape_top(m0.output)), dom, 6));

    RankedAlphabet ab = gen::alphabet({{"a", 0}, {"b", 0}, {"e", 0}});
    Top two("T", ab, ab);
    two.add_state("q");
    two.add_initial("q");
    two.add_rule("q", "e", Tree::symbol("a"));
    two.add_rule("q", "e", Tree::symbol("b"));
    auto c = functionality_counterexample(two, domain_automaton(two), 3);
    REQUIRE(c.has_value());
    CHECK(to_string(std::get<0>(*c)) == "e");
    CHECK(std::set<std::string>{to_string(std::get<1>(*c)), to_string(std::get<2>(*c))} ==
          std::set<std::string>{"a", "b"});

    Top mut = fixture::m0_mutated();
    CHECK_FALSE(functionality_counterexample(compose_dlnt(mut, generate_shape_top(mut.output)),
                                             domain_automaton(mut), 6));
}

TEST_CASE("equivalence") {
    Top m0 = fixture::m0();
    TreeAutomaton dom = domain_automaton(m0);
    Top d = compose_dlnt(m0, generate_shape_top(m0.output));
    Top e = restrict(generate_shape_top(m0.input), dom);
    CHECK_FALSE(equivalence_counterexample(d, e, dom, 6));
    CHECK_FALSE(equivalence_counterexample(m0, m0, dom, 6));

    Top mut = fixture::m0_mutated();
    TreeAutomaton mdom = domain_automaton(mut);
    auto c = equivalence_counterexample(compose_dlnt(mut, generate_shape_top(mut.output)),
                                        restrict(generate_shape_top(mut.input), mdom), mdom, 6);
    REQUIRE(c.has_value());
    CHECK(c == brute_first_mismatch(mut, 6));

    Top intro = fixture::intro_top();
    CHECK_THROWS_AS(equivalence_counterexample(intro, with_rule_replaced("intro_top.top", "rule q0(e) -> e",
                                                                         "rule q0(e) -> e\nrule q1(f(x1,x2)) -> q0(x2)"),
                                               domain_automaton(intro), 5),
                    NotFunctional);
}

TEST_CASE("shape decisions for TOPs") {
    Verdict intro = decide_shape_preserving(fixture::intro_top(), 9);
    CHECK(intro.preserving());
    CHECK(intro.height == 9);
    Verdict m0 = decide_shape_preserving(fixture::m0(), 7);
    CHECK(m0.preserving());
    CHECK(m0.height == 7);
    CHECK(m0.describe() == "shape-preserving up to height 7");

    Top mut = fixture::m0_mutated();
    Verdict v = decide_shape_preserving(mut, 7);
    CHECK_FALSE(v.preserving());
    REQUIRE(v.input.has_value());
    CHECK(verify_verdict(mut, v));
    CHECK(v.input == brute_first_mismatch(mut, 6));
    CHECK(to_string(*v.input) == "h(h(g(a,a)))");

    Tree t = parse_tree("h(h(g(a,b)))", mut.input);
    std::set<Tree> outs = apply_all(mut, t);
    REQUIRE(outs.size() == 1);
    CHECK(to_string(shape(*outs.begin())) == "#1(#2(#0,#0))");
    CHECK(to_string(shape(t)) == "#1(#1(#2(#0,#0)))");
    CHECK(verify_verdict(mut, mismatch_at(t, *outs.begin())));
    CHECK_FALSE(verify_verdict(fixture::m0(), mismatch_at(t, *apply_all(fixture::m0(), t).begin())));

    Top leafy = with_rule_replaced("m0.top", "h(h(f(q2(x1),q3(x1))))", "h(h(f(q2(x1),a)))");
    Verdict s = decide_shape_preserving(leafy, 7);
    CHECK_FALSE(s.preserving());
    CHECK(s.evidence == Verdict::Evidence::Structural);
    CHECK(verify_verdict(leafy, s));
}

TEST_CASE("shape decisions agree with brute force on random TOPs") {
    std::mt19937 rng(5);
    const RankedAlphabet sigma = gen::alphabet({{"f", 2}, {"a", 1}, {"e", 0}});
    int rejected = 0;
    for (int round = 0; round < 30; ++round) {
        Top m = gen::random_top(rng, sigma, sigma, 2);
        CAPTURE(print_top(m));
        Verdict v = decide_shape_preserving(m, 4);
        bool brute = true;
        for (const Tree& t : oracle::domain(m, 4))
            for (const Tree& o : oracle::apply(m, t)) brute = brute && oracle::shape_of(o) == oracle::shape_of(t);
        if (v.preserving()) {
            CHECK(brute);
        } else {
            ++rejected;
            CHECK(verify_verdict(m, v));
            if (v.input) CHECK_FALSE(brute);
        }
    }
    CHECK(rejected > 0);
}

TEST_CASE("shape decisions for MTTs") {
    Verdict intro = decide_shape_preserving_mtt(fixture::intro_mtt(), 6);
    CHECK(intro.preserving());
    CHECK(intro.height == 6);
    CHECK(decide_shape_preserving_mtt(fixture::m1(), 7).preserving());

    Mtt mut = fixture::m1_mutated();
    Verdict v = decide_shape_preserving_mtt(mut, 7);
    CHECK_FALSE(v.preserving());
    REQUIRE(v.input.has_value());
    CHECK(to_string(*v.input) == "a(e)");
    CHECK(verify_verdict(mut, v));
    for (const Tree& t : enumerate_trees(mut.input, 5))
        if (t.height() < 2) CHECK(oracle::count_symbols(oracle::eval(mut, t)) == t.size());
}
