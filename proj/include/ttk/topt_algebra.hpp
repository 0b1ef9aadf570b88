#pragma once

#include <set>
#include <string>

#include "ttk/automata.hpp"
#include "ttk/topt.hpp"

namespace ttk {

/// dom(M), including the input filter if any. States are obligation sets.
TreeAutomaton domain_automaton(const Top& m);
TreeAutomaton domain_automaton_for_state(const Top& m, const std::string& q);
/// I(S): the intersection of dom(M_q) for q in S.
TreeAutomaton intersection_automaton(const Top& m, const std::set<std::string>& s);

/// Drops states and rules that occur in no valid run.
Top trim(const Top& m);

/// {(s,t) in M | s in L(A)}, as the product of M's states with A's states.
Top restrict(const Top& m, const TreeAutomaton& a);

/// M ; N for N total, deterministic, linear and nondeleting.
Top compose_dlnt(const Top& m, const Top& n);

/// Is M_q(L(A) ∩ dom(M_q)) finite?
bool range_finite_on(const Top& m, const std::string& q, const TreeAutomaton& a);
/// M_q(L(A)); requires a finite range.
std::set<Tree> image_set(const Top& m, const std::string& q, const TreeAutomaton& a,
                         std::size_t cap = 10000);

/// M_q^{-1}({t}).
TreeAutomaton inverse_image_automaton(const Top& m, const std::string& q, const Tree& t);

}  // namespace ttk
