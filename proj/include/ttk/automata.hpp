#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ttk/terms.hpp"

namespace ttk {

struct Transition {
    std::string from;
    std::string symbol;
    std::vector<std::string> to;

    friend auto operator<=>(const Transition&, const Transition&) = default;
};

/// Nondeterministic top-down tree automaton.
///
/// An automaton whose initial set is empty recognizes the empty language.
class TreeAutomaton {
public:
    TreeAutomaton() = default;
    explicit TreeAutomaton(RankedAlphabet alphabet, std::string name = "A")
        : name(std::move(name)), alphabet_(std::move(alphabet)) {}

    std::string name;

    const RankedAlphabet& alphabet() const { return alphabet_; }
    const std::set<std::string>& states() const { return states_; }
    const std::set<std::string>& initial() const { return initial_; }
    const std::vector<Transition>& transitions() const { return transitions_; }

    void add_state(const std::string& p);
    void add_initial(const std::string& p);
    /// Adds p -σ-> (p1..pk); unknown states are added implicitly.
    void add_transition(const std::string& from, const std::string& symbol,
                        std::vector<std::string> to);

    /// Transitions leaving p on σ, in insertion order.
    std::vector<const Transition*> transitions_from(const std::string& p,
                                                    const std::string& symbol) const;

private:
    RankedAlphabet alphabet_;
    std::set<std::string> states_;
    std::set<std::string> initial_;
    std::vector<Transition> transitions_;
    std::set<Transition> seen_;
    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> index_;
};

/// One state accepting every tree over the alphabet.
TreeAutomaton universal_automaton(const RankedAlphabet& alphabet);
/// Accepts exactly the given trees.
TreeAutomaton finite_automaton(const RankedAlphabet& alphabet, const std::vector<Tree>& trees);

bool accepts(const TreeAutomaton& a, const Tree& t);
/// States p such that t is in L(p).
std::set<std::string> accepting_states(const TreeAutomaton& a, const Tree& t);

/// A minimal-height member of L(A), or nullopt if L(A) is empty.
std::optional<Tree> is_empty(const TreeAutomaton& a);
/// Minimal-height witness for every productive state.
std::map<std::string, Tree> state_witnesses(const TreeAutomaton& a);

TreeAutomaton product(const TreeAutomaton& a, const TreeAutomaton& b);
/// Keeps only states that are reachable from the initial set and productive.
TreeAutomaton trim(const TreeAutomaton& a);
bool is_finite_language(const TreeAutomaton& a);

/// Members of L(A) of height <= max_height in enumeration order.
/// Throws CapExceeded when more than `cap` trees are generated for one state.
std::vector<Tree> enumerate_language(const TreeAutomaton& a, int max_height,
                                     std::size_t cap = 2'000'000);

}  // namespace ttk
