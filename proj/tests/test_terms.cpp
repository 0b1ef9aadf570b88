#include <doctest.h>

#include "oracles.hpp"
#include "ttk/terms.hpp"

using namespace ttk;

namespace {

RankedAlphabet alpha(std::initializer_list<std::pair<const char*, int>> syms) {
    RankedAlphabet a;
    for (auto [s, k] : syms) a.add(s, k);
    return a;
}

const RankedAlphabet afe = alpha({{"a", 1}, {"f", 2}, {"e", 0}});

std::vector<std::string> strings(const std::vector<Tree>& ts) {
    std::vector<std::string> out;
    for (const Tree& t : ts) out.push_back(to_string(t));
    return out;
}

}  // namespace

TEST_CASE("parse and print") {
    CHECK(to_string(parse_tree("e", afe)) == "e");
    Tree t = parse_tree("a(f(e,e))", afe);
    CHECK(t.label() == "a");
    CHECK(t.child(0).label() == "f");
    CHECK(t.child(0).child(1).label() == "e");
    CHECK(to_string(t) == "a(f(e,e))");
    CHECK(to_string(parse_tree(" a ( f ( e , e ) ) ", afe)) == "a(f(e,e))");
    CHECK_THROWS_AS(parse_tree("a(f(e))", afe), ParseError);
    CHECK_THROWS_AS(parse_tree("g(e)", afe), ParseError);
    CHECK_THROWS_AS(parse_tree("a(e", afe), ParseError);
}

TEST_CASE("sizes and heights") {
    Tree t = parse_tree("a(f(e,e))", afe);
    CHECK(t.height() == 3);
    CHECK(t.size() == 4);
    Tree c = Tree::symbol("a", {Tree::call("q", {Tree::var(0)})});
    CHECK(c.size() == 1);
    CHECK_FALSE(c.ground());
}

TEST_CASE("shape") {
    CHECK(to_string(shape(parse_tree("e", afe))) == "#0");
    CHECK(to_string(shape(parse_tree("a(f(e,e))", afe))) == "#1(#2(#0,#0))");
    for (const Tree& t : enumerate_trees(afe, 4)) {
        CHECK(shape(shape(t)) == shape(t));
        CHECK(shape(t) == oracle::shape_of(t));
    }
}

TEST_CASE("paths") {
    CHECK(Path().str() == "eps");
    CHECK(Path::parse("eps").empty());
    Path p = Path::parse("1.2");
    CHECK(p.length() == 2);
    CHECK(Path::parse(p.str()) == p);
    CHECK(Path::parse("1").is_prefix_of(p));
    CHECK(p.suffix_after(Path::parse("1")) == Path::parse("2"));
}

TEST_CASE("navigate, graft, substitute") {
    Tree t = parse_tree("a(f(e,e))", afe);
    CHECK(to_string(navigate(t, Path::parse("1.2"))) == "e");
    CHECK_FALSE(try_navigate(t, Path::parse("2")).has_value());
    CHECK(to_string(graft(parse_tree("a(e)", afe), Path::parse("1"), parse_tree("f(e,e)", afe))) == "a(f(e,e))");
    Tree fx = Tree::symbol("f", {Tree::var(1), Tree::var(1)});
    Substitution s;
    s.vars[1] = parse_tree("e", afe);
    CHECK(to_string(substitute(fx, s)) == "f(e,e)");
    CHECK(nodes(t).size() == 4);
}

TEST_CASE("enumerate trees") {
    CHECK(strings(enumerate_trees(alpha({{"a", 1}, {"e", 0}}), 2)) == std::vector<std::string>{"e", "a(e)"});
    CHECK(strings(enumerate_trees(alpha({{"e", 0}}), 5)) == std::vector<std::string>{"e"});
    // golden, cross-checked against oracle::all_trees below
    CHECK(strings(enumerate_trees(alpha({{"f", 2}, {"e", 0}}), 3)) ==
          std::vector<std::string>{"e", "f(e,e)", "f(e,f(e,e))", "f(f(e,e),e)", "f(f(e,e),f(e,e))"});
    CHECK(enumerate_trees(afe, 5).size() == 33673);
}

TEST_CASE("enumeration agrees with the oracle and is ordered") {
    for (const RankedAlphabet& a : {afe, alpha({{"f", 2}, {"e", 0}}), alpha({{"g", 3}, {"b", 1}, {"c", 0}, {"d", 0}})}) {
        for (int h = 0; h <= 4; ++h) {
            if (a.max_rank() == 3 && h == 4) continue;
            std::vector<Tree> ts = enumerate_trees(a, h);
            std::set<Tree> brute = oracle::all_trees(a, h);
            CHECK(std::set<Tree>(ts.begin(), ts.end()) == brute);
            CHECK(ts.size() == brute.size());
            for (std::size_t i = 1; i < ts.size(); ++i) CHECK(enumeration_less(ts[i - 1], ts[i]));
        }
    }
}
