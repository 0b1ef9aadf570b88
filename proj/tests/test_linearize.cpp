#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "ttk/linearize.hpp"
#include "ttk/topt_algebra.hpp"

using namespace ttk;

namespace {

std::set<std::string> strings(const std::set<Tree>& ts) {
    std::set<std::string> out;
    for (const Tree& t : ts) out.insert(to_string(t));
    return out;
}

std::set<std::string> rule_lines(const Top& m) {
    std::set<std::string> out;
    std::istringstream is(print_top(m));
    for (std::string line; std::getline(is, line);)
        if (line.rfind("rule ", 0) == 0) out.insert(line.substr(5));
    return out;
}

Linearization linearize_checked(const Top& m, int h) {
    Verdict v = decide_shape_preserving(m, h);
    REQUIRE(v.preserving());
    return linearize(m, v);
}

}  // namespace

TEST_CASE("state set table of M0") {
    Top m0 = fixture::m0();
    StateSetTable t = build_state_set_table(m0);
    CHECK(t.entries.size() == 4);
    CHECK(t.at({"q0"}).fin.empty());
    CHECK(t.at({"q1"}).fin.empty());
    CHECK(t.at({"q2", "q3"}).fin == std::set<std::string>{"q3"});
    CHECK(strings(t.at({"q2", "q3"}).images.at("q3")) == std::set<std::string>{"a", "b"});
    CHECK(t.at({"ql"}).fin == std::set<std::string>{"ql"});
    CHECK(strings(t.at({"ql"}).images.at("ql")) == std::set<std::string>{"a", "b"});
    CHECK(accepts(t.at({"q2", "q3"}).domain, parse_tree("g(a,b)", m0.input)));
    CHECK_THROWS_AS(t.at({"q0", "q1"}), Error);

    Top id = generate_identity_top(gen::alphabet({{"f", 2}, {"e", 0}}));
    StateSetTable it = build_state_set_table(id);
    REQUIRE(it.entries.size() == 1);
    CHECK(it.entries.begin()->second.fin.empty());
}

TEST_CASE("state set images agree with brute force") {
    for (const Top& m : {fixture::m0(), fixture::intro_top()}) {
        StateSetTable t = build_state_set_table(m);
        for (const auto& [s, entry] : t.entries) {
            const std::set<Tree> members = oracle::language(entry.domain, 6);
            for (const std::string& q : s) {
                std::set<Tree> range;
                for (const Tree& x : members) {
                    std::set<Tree> o = oracle::apply(m, q, x);
                    range.insert(o.begin(), o.end());
                }
                if (entry.fin.count(q)) CHECK(entry.images.at(q) == range);
            }
        }
    }
}

TEST_CASE("prediction automaton") {
    Top m0 = fixture::m0();
    PredictionAutomaton a = build_prediction_automaton(m0, build_state_set_table(m0));
    CHECK_FALSE(a.universal());
    auto pg = a.state_of(parse_tree("g(a,b)", m0.input));
    CHECK(strings(a.table(pg, {"q2", "q3"}, "q3")) == std::set<std::string>{"a"});
    auto pb = a.state_of(parse_tree("b", m0.input));
    CHECK(strings(a.table(pb, {"ql"}, "ql")) == std::set<std::string>{"b"});
    auto pa = a.state_of(parse_tree("a", m0.input));
    CHECK(strings(a.table(pa, {"ql"}, "ql")) == std::set<std::string>{"a"});
    auto pf = a.state_of(parse_tree("f(g(b,a),a)", m0.input));
    CHECK(strings(a.table(pf, {"q2", "q3"}, "q3")) == std::set<std::string>{"b"});

    for (const Tree& s : enumerate_language(intersection_automaton(m0, {"q2", "q3"}), 5)) {
        std::set<Tree> want = oracle::apply(m0, "q3", s);
        CHECK(a.table(a.state_of(s), {"q2", "q3"}, "q3") == want);
    }

    Top id = generate_identity_top(gen::alphabet({{"f", 2}, {"e", 0}}));
    CHECK(build_prediction_automaton(id, build_state_set_table(id)).universal());
}

TEST_CASE("linearizing M0") {
    Top m0 = fixture::m0();
    Linearization lin = linearize_checked(m0, 7);
    CHECK(lin.stamp == "verified to height 7");
    const std::set<std::string> rules = rule_lines(lin.top);
    CHECK(rules.count("({};eps;q0(x))(h(x1)) -> ({};1;q1(x))(x1)"));
    CHECK(rules.count("({};1;q1(x))(h(x1)) -> h(h(({q3(x)=a};eps;f(q2(x),a))(x1)))"));
    CHECK(rules.count("({};1;q1(x))(h(x1)) -> h(h(({q3(x)=b};eps;f(q2(x),b))(x1)))"));
    CHECK(lin.states.count("({q3(x)=a};eps;f(q2(x),a))"));
    CHECK(lin.states.count("({};eps;q0(x))"));
    CHECK(lin.top.initial() == std::vector<std::string>{"({};eps;q0(x))"});

    TopPredicates p = predicates(lin.top);
    CHECK(p.linear);
    CHECK(p.nondeleting);
    CHECK(static_cast<double>(lin.max_v) <= lin.bound_v);
    CHECK(static_cast<double>(lin.max_t_height) <= lin.bound_t);
    CHECK(lin_state_depth("({};1;q1(x))") == 1u);
    CHECK(lin_state_depth("({};eps;q0(x))") == 0u);

    for (const Tree& t : oracle::domain(m0, 7)) CHECK(apply_all(lin.top, t) == oracle::apply(m0, t));
    for (const Tree& t : enumerate_trees(m0.input, 3)) CHECK(apply_all(lin.top, t) == apply_all(m0, t));
}

TEST_CASE("linearization reports") {
    Top m0 = fixture::m0();
    Linearization lin = linearize_checked(m0, 7);
    LinearizationReport ok = verify_linearization(m0, lin.top, 7);
    CHECK(ok.passes());
    CHECK(ok.inputs == 60);

    LinearizationReport self = verify_linearization(m0, m0, 7);
    CHECK_FALSE(self.passes());
    CHECK_FALSE(self.linear);

    Top intro = fixture::intro_top();
    Linearization li = linearize_checked(intro, 9);
    CHECK(verify_linearization(intro, li.top, 9).passes());
    CHECK(static_cast<double>(li.max_v) <= li.bound_v);
    CHECK(static_cast<double>(li.max_t_height) <= li.bound_t);

    std::string text = print_top(lin.top);
    const std::string from = "({ql(x)=a};eps;b)(a) -> b";
    text.replace(text.find(from), from.size(), "({ql(x)=a};eps;b)(a) -> a");
    LinearizationReport bad = verify_linearization(m0, parse_top(text), 7);
    CHECK_FALSE(bad.passes());
    CHECK(bad.mismatch.has_value());
}

TEST_CASE("linearizing a linear TOP keeps its translation") {
    const RankedAlphabet sigma = gen::alphabet({{"f", 2}, {"a", 1}, {"e", 0}});
    Top id = generate_identity_top(sigma);
    Linearization lin = linearize_checked(id, 3);
    CHECK(predicates(lin.top).linear);
    for (const Tree& t : enumerate_trees(sigma, 5)) CHECK(apply_all(lin.top, t) == std::set<Tree>{t});

    CHECK_THROWS_AS(linearize(fixture::m0_mutated(), decide_shape_preserving(fixture::m0_mutated(), 7)), Error);
}
