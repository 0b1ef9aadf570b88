#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ttk/automata.hpp"
#include "ttk/terms.hpp"

namespace ttk {

/// q(σ(x1..xk)) -> rhs. The rhs is built from output symbols and call nodes
/// Tree::call(q', {Tree::var(i)}).
struct TopRule {
    std::string state;
    std::string symbol;
    Tree rhs;
};

/// Nondeterministic top-down tree transducer with an initial-state set and
/// an optional input filter (the FTA part of FTA;TOP).
class Top {
public:
    std::string name = "M";
    RankedAlphabet input;
    RankedAlphabet output;

    Top() = default;
    Top(std::string name, RankedAlphabet input, RankedAlphabet output)
        : name(std::move(name)), input(std::move(input)), output(std::move(output)) {}

    const std::vector<std::string>& states() const { return states_; }
    const std::vector<std::string>& initial() const { return initial_; }
    const std::vector<TopRule>& rules() const { return rules_; }
    const std::optional<TreeAutomaton>& filter() const { return filter_; }

    bool has_state(const std::string& q) const { return state_set_.count(q) != 0; }
    void add_state(const std::string& q);
    void add_initial(const std::string& q);
    /// Validates the rhs against the alphabets and the symbol's rank.
    void add_rule(const std::string& state, const std::string& symbol, Tree rhs);
    void set_filter(std::optional<TreeAutomaton> filter);

    /// Indices into rules() for (q, σ), in file order.
    const std::vector<std::size_t>& rules_for(const std::string& q, const std::string& symbol) const;
    /// Maximum height of a right-hand side (0 without rules).
    int max_rhs() const { return max_rhs_; }

private:
    std::vector<std::string> states_;
    std::set<std::string> state_set_;
    std::vector<std::string> initial_;
    std::vector<TopRule> rules_;
    std::optional<TreeAutomaton> filter_;
    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> index_;
    int max_rhs_ = 0;
};

/// Calls q'(x_i) of an rhs in pre-order: (state, variable index).
std::vector<std::pair<std::string, int>> rhs_calls(const Tree& rhs);
std::string rule_string(const TopRule& r, int rank);

/// Rewrites the call at u of a configuration with the given rule.
Tree step(const Tree& configuration, const TopRule& rule, const Path& u);

/// All outputs of all valid runs from any initial state.
std::set<Tree> apply_all(const Top& m, const Tree& t, std::size_t cap = 10000);
/// Outputs of M_q on t.
std::set<Tree> apply_state(const Top& m, const std::string& q, const Tree& t,
                           std::size_t cap = 10000);

struct ProvisionalOutput {
    Tree tree;
    std::vector<std::string> state_sequence;
    std::vector<Path> hole_paths;

    friend bool operator<(const ProvisionalOutput& a, const ProvisionalOutput& b) {
        return a.tree < b.tree;
    }
};

/// Outputs of runs on t[u <- x] that extend to valid runs on t.
std::set<ProvisionalOutput> provisional_outputs(const Top& m, const Tree& t, const Path& u,
                                                std::size_t cap = 10000);

struct StateSetsResult {
    std::set<std::set<std::string>> sets;
    /// Ordered state sequences in which some state occurs twice.
    std::vector<std::vector<std::string>> repeated;
    /// Indices of rules usable in some valid run.
    std::set<std::size_t> used_rules;
};

/// Fixpoint over state sets of valid runs.
StateSetsResult analyze_state_sets(const Top& m);
std::set<std::set<std::string>> state_sets(const Top& m);

struct TopPredicates {
    bool linear = true;
    bool nondeleting = true;
    bool deterministic = true;
    bool total = true;
    bool relabeling = true;
};
TopPredicates predicates(const Top& m);

Top generate_identity_top(const RankedAlphabet& sigma);
Top generate_shape_top(const RankedAlphabet& sigma);

}  // namespace ttk
