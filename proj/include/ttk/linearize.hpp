#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ttk/automata.hpp"
#include "ttk/spcheck.hpp"
#include "ttk/topt.hpp"

namespace ttk {

struct StateSetEntry {
    TreeAutomaton domain;  // I(S)
    std::set<std::string> fin;
    std::map<std::string, std::set<Tree>> images;
};

/// Per state set S: I(S), the states of S with finite range on I(S), and those ranges.
struct StateSetTable {
    std::map<std::set<std::string>, StateSetEntry> entries;
    const StateSetEntry& at(const std::set<std::string>& s) const;
};

StateSetTable build_state_set_table(const Top& m, std::size_t cap = 10000);

/// The product of the inverse-image automata M_q^{-1}(t) ∩ I(S) for q in fin(S),
/// kept as its list of components. The state reached on an input is the set
/// of components accepting it.
struct PredictionAutomaton {
    struct Component {
        std::set<std::string> set;
        std::string state;
        Tree target;
        TreeAutomaton automaton;
    };
    std::vector<Component> components;

    bool universal() const { return components.empty(); }
    std::set<std::size_t> state_of(const Tree& s) const;
    /// p(S,q): targets of the components in p for (S, q).
    std::set<Tree> table(const std::set<std::size_t>& p, const std::set<std::string>& s,
                         const std::string& q) const;
};

PredictionAutomaton build_prediction_automaton(const Top& m, const StateSetTable& table);

/// A state of the linearized transducer. p holds assertions q(x) = t about
/// the current input subtree, v is how far the input lags behind the output
/// position, and t is the pending output with calls q(x).
struct LinState {
    std::set<std::pair<std::string, Tree>> p;
    Path v;
    Tree t;

    std::string name() const;
    friend auto operator<=>(const LinState&, const LinState&) = default;
    friend bool operator==(const LinState&, const LinState&) = default;
};

/// Recovers |v| from a state name of the form (p;v;t).
std::optional<std::size_t> lin_state_depth(const std::string& name);

struct Linearization {
    Top top;
    std::map<std::string, LinState> states;
    std::size_t max_v = 0;
    int max_t_height = 0;
    double bound_v = 0;
    double bound_t = 0;
    /// "verified to height h" from the shape verdict.
    std::string stamp;
};

/// Requires a preserving verdict for m; m must have no input filter.
Linearization linearize(const Top& m, const Verdict& verdict, std::size_t cap = 10000);

struct LinearizationReport {
    bool linear = false;
    bool nondeleting = false;
    std::size_t inputs = 0;
    std::size_t state_calls = 0;
    std::optional<Tree> mismatch;
    std::vector<std::string> violations;
    bool passes() const { return linear && nondeleting && !mismatch && violations.empty(); }
};

LinearizationReport verify_linearization(const Top& m, const Top& lin, int max_height,
                                         std::size_t cap = 10000);

}  // namespace ttk
