#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "ttk/automata.hpp"
#include "ttk/topt_algebra.hpp"

using namespace ttk;

namespace {

RankedAlphabet gae() {
    RankedAlphabet a;
    a.add("g", 2);
    a.add("a", 1);
    a.add("e", 0);
    return a;
}

TreeAutomaton random_automaton(std::mt19937& rng) {
    const RankedAlphabet sigma = gae();
    TreeAutomaton a(sigma);
    std::uniform_int_distribution<int> nstates(1, 3), coin(0, 3);
    const int n = nstates(rng);
    auto st = [](int i) { return "p" + std::to_string(i); };
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int i = 0; i < n; ++i) a.add_state(st(i));
    a.add_initial(st(0));
    if (n > 1 && coin(rng) == 0) a.add_initial(st(1));
    for (int i = 0; i < n; ++i) {
        for (const auto& [sym, k] : sigma.symbols()) {
            const int count = coin(rng) == 0 ? 0 : (coin(rng) == 0 ? 2 : 1);
            for (int c = 0; c < count; ++c) {
                std::vector<std::string> to;
                for (int j = 0; j < k; ++j) to.push_back(st(pick(rng)));
                a.add_transition(st(i), sym, to);
            }
        }
    }
    return a;
}

std::set<Tree> as_set(const std::vector<Tree>& ts) { return {ts.begin(), ts.end()}; }

}  // namespace

TEST_CASE("membership in domain automata") {
    Top m0 = fixture::m0();
    TreeAutomaton d0 = domain_automaton(m0);
    CHECK(accepts(d0, parse_tree("h(h(g(a,b)))", m0.input)));
    CHECK(accepts(d0, parse_tree("h(h(f(g(a,b),a)))", m0.input)));
    CHECK_FALSE(accepts(d0, parse_tree("h(g(a,b))", m0.input)));

    Top intro = fixture::intro_top();
    TreeAutomaton di = domain_automaton(intro);
    CHECK(accepts(di, parse_tree("a(f(e,e))", intro.input)));
    CHECK_FALSE(accepts(di, parse_tree("a(e)", intro.input)));
}

TEST_CASE("emptiness") {
    TreeAutomaton none(gae());
    none.add_initial("p");
    none.add_transition("p", "a", {"p"});
    CHECK_FALSE(is_empty(none).has_value());

    RankedAlphabet e;
    e.add("e", 0);
    CHECK(to_string(*is_empty(universal_automaton(e))) == "e");

    Top m0 = fixture::m0();
    auto w = is_empty(domain_automaton(m0));
    REQUIRE(w.has_value());
    CHECK(w->height() == 4);
    CHECK(to_string(*w).rfind("h(h(g(", 0) == 0);
}

TEST_CASE("product") {
    Top m0 = fixture::m0();
    TreeAutomaton d0 = domain_automaton(m0);
    CHECK(as_set(enumerate_language(product(d0, d0), 6)) == as_set(enumerate_language(d0, 6)));
    CHECK(as_set(enumerate_language(product(d0, universal_automaton(m0.input)), 6)) ==
          as_set(enumerate_language(d0, 6)));
}

TEST_CASE("finiteness") {
    Top m0 = fixture::m0();
    TreeAutomaton ab = finite_automaton(m0.input, {parse_tree("a", m0.input), parse_tree("b", m0.input)});
    CHECK(is_finite_language(ab));
    CHECK_FALSE(is_finite_language(domain_automaton(m0)));
    CHECK(is_finite_language(TreeAutomaton(gae())));
    for (int h = 4; h <= 7; ++h) {
        bool found = false;
        for (const Tree& t : enumerate_language(domain_automaton(m0), h))
            found = found || t.height() == h;
        CHECK(found);
    }
}

TEST_CASE("language enumeration") {
    RankedAlphabet ae;
    ae.add("a", 1);
    ae.add("e", 0);
    auto u = enumerate_language(universal_automaton(ae), 2);
    REQUIRE(u.size() == 2);
    CHECK(to_string(u[0]) == "e");
    CHECK(to_string(u[1]) == "a(e)");
    Top intro = fixture::intro_top();
    // q0(e) -> e puts the leaf itself in the domain
    std::vector<std::string> small;
    for (const Tree& t : enumerate_language(domain_automaton(intro), 3)) small.push_back(to_string(t));
    CHECK(small == std::vector<std::string>{"e", "a(f(e,e))"});
    std::set<Tree> brute;
    for (const Tree& t : oracle::all_trees(intro.input, 3))
        if (!oracle::apply(intro, t).empty()) brute.insert(t);
    CHECK(as_set(enumerate_language(domain_automaton(intro), 3)) == brute);
}

TEST_CASE("random automata agree with brute force") {
    std::mt19937 rng(20261015);
    const std::vector<Tree> all = enumerate_trees(gae(), 4);
    for (int round = 0; round < 20; ++round) {
        TreeAutomaton a = random_automaton(rng);
        CAPTURE(print_nta(a));
        std::vector<Tree> filtered;
        for (const Tree& t : all) {
            CHECK(accepts(a, t) == oracle::accepts(a, t));
            if (oracle::accepts(a, t)) filtered.push_back(t);
        }
        CHECK(enumerate_language(a, 4) == filtered);
        CHECK(as_set(filtered) == oracle::language(a, 4));
        CHECK(is_finite_language(a) == !oracle::language_infinite(a));
        CHECK(is_empty(a).has_value() == !oracle::language(a, static_cast<int>(a.states().size())).empty());
        if (auto w = is_empty(a)) CHECK(oracle::accepts(a, *w));
        TreeAutomaton t = trim(a);
        for (const Tree& s : all) CHECK(accepts(t, s) == oracle::accepts(a, s));
    }
}

TEST_CASE("product agrees with intersection on random pairs") {
    std::mt19937 rng(7);
    const std::vector<Tree> all = enumerate_trees(gae(), 4);
    for (int round = 0; round < 20; ++round) {
        TreeAutomaton a = random_automaton(rng), b = random_automaton(rng);
        TreeAutomaton p = product(a, b);
        for (const Tree& t : all) CHECK(accepts(p, t) == (oracle::accepts(a, t) && oracle::accepts(b, t)));
    }
}
