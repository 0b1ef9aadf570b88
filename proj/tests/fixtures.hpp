#pragma once

#include <string>

#include "ttk/io.hpp"

#ifndef TTK_CORPUS_DIR
#define TTK_CORPUS_DIR "corpus"
#endif

namespace fixture {

inline std::string path(const std::string& name) { return std::string(TTK_CORPUS_DIR) + "/" + name; }
inline ttk::Top top(const std::string& name) { return ttk::parse_top(ttk::read_file(path(name))); }
inline ttk::Mtt mtt(const std::string& name) { return ttk::parse_mtt(ttk::read_file(path(name))); }

inline ttk::Top m0() { return top("m0.top"); }
inline ttk::Top intro_top() { return top("intro_top.top"); }
inline ttk::Mtt m1() { return mtt("m1.mtt"); }
inline ttk::Mtt intro_mtt() { return mtt("intro_mtt.mtt"); }

/// M0 with one h dropped from the q1 rule.
inline ttk::Top m0_mutated() {
    std::string text = ttk::read_file(path("m0.top"));
    const std::string from = "h(h(f(q2(x1),q3(x1))))";
    text.replace(text.find(from), from.size(), "h(f(q2(x1),q3(x1)))");
    return ttk::parse_top(text);
}

/// M1 with <qb, e> -> e.
inline ttk::Mtt m1_mutated() {
    std::string text = ttk::read_file(path("m1.mtt"));
    const std::string from = "<qb, e> -> a(e)";
    text.replace(text.find(from), from.size(), "<qb, e> -> e");
    return ttk::parse_mtt(text);
}

}  // namespace fixture
