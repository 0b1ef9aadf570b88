#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "ttk/mtt.hpp"

using namespace ttk;

namespace {

Mtt identity_mtt() {
    return parse_mtt(
        "mtt Id\n"
        "input f/2 a/1 e/0\n"
        "output f/2 a/1 e/0\n"
        "states q/0\n"
        "initial q\n"
        "rule <q, f(x1,x2)> -> f(<q,x1>,<q,x2>)\n"
        "rule <q, a(x1)> -> a(<q,x1>)\n"
        "rule <q, e> -> e\n");
}

std::vector<std::string> brute_sequence(const Mtt& m, const Tree& s, const Path& u) {
    std::vector<std::string> seq;
    oracle::pending(oracle::eval(m, m.initial(), graft(s, u, Tree::var(0)), {}), seq);
    return seq;
}

int brute_delay(const Mtt& m, const Tree& s, const Path& u) {
    const Tree& sub = navigate(s, u);
    int total = 0;
    for (const std::string& q : brute_sequence(m, s, u)) total += oracle::count_symbols(oracle::translation(m, q, sub));
    return total - oracle::count_symbols(sub);
}

using Seq = std::vector<std::string>;

}  // namespace

TEST_CASE("evaluation") {
    Mtt intro = fixture::intro_mtt();
    Tree t = parse_tree("$(c(a(b(a(a(b(e)))))))", intro.input);
    CHECK(to_string(evaluate(intro, t)) == "$(a(a(a(b(b(c(e)))))))");

    Mtt m1 = fixture::m1();
    CHECK(to_string(evaluate(m1, parse_tree("b(a(b(e)))", m1.input))) == "b(a(b(e)))");
    CHECK(to_string(evaluate(m1, parse_tree("b(a(a(b(e))))", m1.input))) == "b(a(a(b(e))))");
    CHECK(to_string(evaluate(m1, parse_tree("b(b(a(a(e))))", m1.input))) == "a(a(b(b(e))))");
    CHECK(to_string(evaluate(m1, parse_tree("a(b(a(b(e))))", m1.input))) == "a(b(b(a(e))))");
    CHECK(to_string(q_translation(m1, "qb", parse_tree("b(a(e))", m1.input))) == "b(a(e))");
    CHECK(to_string(q_translation(m1, "qa", parse_tree("a(b(e))", m1.input)), CallStyle::Mtt) == "a(y1)");

    for (const Mtt& m : {intro, m1, identity_mtt()})
        for (const Tree& s : enumerate_trees(m.input, 5)) {
            CHECK(evaluate(m, s) == oracle::eval(m, s));
            for (const std::string& q : m.states()) CHECK(q_translation(m, q, s) == oracle::translation(m, q, s));
        }
}

TEST_CASE("origins") {
    Mtt id = identity_mtt();
    for (const Tree& s : enumerate_trees(id.input, 4)) {
        OriginTree o = evaluate_with_origin(id, s);
        CHECK(o.output == s);
        REQUIRE(o.origin.size() == nodes(s).size());
        for (const auto& [out, in] : o.origin) CHECK(out == in);
    }

    Mtt intro = fixture::intro_mtt();
    OriginTree o = evaluate_with_origin(intro, parse_tree("$(a(e))", intro.input));
    CHECK(to_string(o.output) == "$(a(e))");
    CHECK(o.origin.at(Path()) == Path());
    CHECK(o.origin.at(Path::parse("1")) == Path::parse("1"));
    // the leaf comes from the $ rule, not from the input leaf
    CHECK(o.origin.at(Path::parse("1.1")) == Path());
    CHECK_FALSE(is_one_to_one_on(intro, parse_tree("$(a(e))", intro.input)));

    Mtt m1 = fixture::m1();
    OriginTree a = evaluate_with_origin(m1, parse_tree("a(e)", m1.input));
    CHECK(to_string(a.output) == "a(e)");
    CHECK(a.origin.at(Path()) == Path::parse("1"));
    CHECK(a.origin.at(Path::parse("1")) == Path::parse("1"));
    CHECK_FALSE(is_one_to_one_on(m1, parse_tree("a(e)", m1.input)));
}

TEST_CASE("one-to-one") {
    CHECK_FALSE(check_one_to_one(identity_mtt(), 4).has_value());
    Mtt mono = parse_mtt(
        "mtt Mono\ninput a/1 b/1 e/0\noutput a/1 b/1 e/0\nstates q/0\ninitial q\n"
        "rule <q, a(x1)> -> a(<q,x1>)\nrule <q, b(x1)> -> b(<q,x1>)\nrule <q, e> -> e\n");
    CHECK_FALSE(check_one_to_one(mono, 6).has_value());
    Mtt m1 = fixture::m1();
    auto c = check_one_to_one(m1, 4);
    REQUIRE(c.has_value());
    CHECK(to_string(*c) == "a(e)");
}

TEST_CASE("state sequences") {
    Mtt m1 = fixture::m1();
    CHECK(state_sequence(m1, parse_tree("a(e)", m1.input), Path::parse("1")) == Seq{"qa", "qb"});
    CHECK(state_sequence(m1, parse_tree("b(e)", m1.input), Path::parse("1")) == Seq{"qm"});
    CHECK(state_sequence(m1, parse_tree("b(e)", m1.input), Path()) == Seq{"q0"});
    for (const Mtt& m : {m1, fixture::intro_mtt()})
        for (const Tree& s : enumerate_trees(m.input, 4))
            for (const Path& u : nodes(s)) CHECK(state_sequence(m, s, u) == brute_sequence(m, s, u));
}

TEST_CASE("delays") {
    Mtt m1 = fixture::m1();
    CHECK(delay(m1, parse_tree("a(b(e))", m1.input), Path::parse("1")) == 1);
    CHECK(delay(m1, parse_tree("b(a(e))", m1.input), Path::parse("1")) == -1);
    CHECK(delay(m1, parse_tree("b(a(e))", m1.input), Path()) == 0);
    for (const Mtt& m : {m1, fixture::intro_mtt(), identity_mtt()})
        for (const Tree& s : enumerate_trees(m.input, 4))
            for (const Path& u : nodes(s)) CHECK(delay(m, s, u) == brute_delay(m, s, u));
}

TEST_CASE("delay tables") {
    auto table_of = [](const DelayTable& t) {
        std::map<Seq, int> out;
        for (const DelayEntry& e : t.entries) out[e.sequence] = e.delay;
        return out;
    };
    DelayTable m1 = build_delay_table(fixture::m1(), 6);
    CHECK(table_of(m1) == std::map<Seq, int>{{{"q0"}, 0}, {{"qa", "qb"}, 1}, {{"qm"}, -1}});
    CHECK(m1.b == 1);
    CHECK(m1.lookup("*", {"qa", "qb"}) == 1);

    // frozen from the direct-definition oracle below
    DelayTable intro = build_delay_table(fixture::intro_mtt(), 5);
    CHECK(table_of(intro) == std::map<Seq, int>{{{"q0"}, 0}, {{"qa", "qb", "qc"}, -1}});
    CHECK(intro.b == 1);

    for (const Mtt& m : {fixture::m1(), fixture::intro_mtt()}) {
        DelayTable t = build_delay_table(m, 5);
        std::map<Seq, int> brute;
        for (const Tree& s : enumerate_trees(m.input, 5))
            for (const Path& u : nodes(s)) brute[brute_sequence(m, s, u)] = brute_delay(m, s, u);
        CHECK(table_of(t) == brute);
    }

    DelayTable id = build_delay_table(identity_mtt(), 4);
    for (const DelayEntry& e : id.entries) CHECK(e.delay == 0);
}

TEST_CASE("parameter discipline") {
    ParamReport m1 = param_discipline_check(fixture::m1());
    CHECK(m1.passes());
    CHECK_FALSE(m1.nonerasing());
    CHECK(param_discipline_check(fixture::intro_mtt()).passes());
    CHECK(param_discipline_check(identity_mtt()).nonerasing());

    std::string text = read_file(fixture::path("m1.mtt"));
    const std::string from = "<qa, a(x1)>(y1) -> <qa,x1>(a(y1))";
    text.replace(text.find(from), from.size(), "<qa, a(x1)>(y1) -> <qa,x1>(a(e))");
    CHECK_FALSE(param_discipline_check(parse_mtt(text)).passes());
}

TEST_CASE("prefixes") {
    RankedAlphabet ae;
    ae.add("a", 1);
    ae.add("e", 0);
    CHECK(to_string(prefix_cut(parse_tree("a(e)", ae), 1)) == "a(x1)");
    CHECK(to_string(prefix_cut(parse_tree("a(e)", ae), 2)) == "a(e)");
    CHECK(to_string(prefix_cut(Tree::param(1), 3), CallStyle::Mtt) == "y1");

    Mtt m1 = fixture::m1();
    for (const Tree& s : enumerate_trees(m1.input, 5)) {
        const bool has_b = to_string(s).find('b') != std::string::npos;
        CHECK(to_string(prefix_cut(q_translation(m1, "qb", s), 1)) == (has_b ? "b(x1)" : "a(x1)"));
    }

    for (const Mtt& m : {m1, fixture::intro_mtt()}) {
        PrefixTable pt = build_prefix_table(m, 1);
        const std::vector<Tree> inputs = enumerate_trees(m.input, 4);
        auto key = [&](const Tree& s) {
            std::vector<Tree> k;
            for (const std::string& q : m.states()) k.push_back(prefix_cut(oracle::translation(m, q, s), 1));
            return k;
        };
        for (const Tree& s : inputs) {
            for (const std::string& q : m.states())
                CHECK(pt.prefix(pt.class_of(s), q) == prefix_cut(oracle::translation(m, q, s), 1));
            for (const Tree& r : inputs)
                if (r.height() <= 3) CHECK((pt.class_of(s) == pt.class_of(r)) == (key(s) == key(r)));
        }
    }
}
