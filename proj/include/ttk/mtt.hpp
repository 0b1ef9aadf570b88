#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ttk/terms.hpp"

namespace ttk {

/// Total deterministic macro tree transducer.
///
/// A rule <q, σ(x1..xk)>(y1..ym) -> rhs has an rhs over output symbols,
/// parameters Param(j) and calls Tree::call(q', {Var(i), arg1..argn}).
class Mtt {
public:
    std::string name = "M";
    RankedAlphabet input;
    RankedAlphabet output;

    Mtt() = default;
    Mtt(std::string name, RankedAlphabet input, RankedAlphabet output)
        : name(std::move(name)), input(std::move(input)), output(std::move(output)) {}

    void add_state(const std::string& q, int params);
    bool has_state(const std::string& q) const { return params_.count(q) != 0; }
    int params(const std::string& q) const;
    const std::vector<std::string>& states() const { return states_; }

    void set_initial(const std::string& q);
    const std::string& initial() const { return initial_; }

    /// Validates and stores the rule; a second rule for the same pair is an error.
    void add_rule(const std::string& q, const std::string& symbol, Tree rhs);
    bool has_rule(const std::string& q, const std::string& symbol) const;
    const Tree& rhs(const std::string& q, const std::string& symbol) const;
    /// (state, symbol) pairs in insertion order.
    const std::vector<std::pair<std::string, std::string>>& rule_keys() const { return order_; }

    /// Throws listing the (state, symbol) pairs without a rule.
    void check_total() const;
    /// Maximum rhs size (output symbols only).
    int max_rhs() const { return max_rhs_; }

private:
    std::vector<std::string> states_;
    std::map<std::string, int> params_;
    std::string initial_;
    std::map<std::pair<std::string, std::string>, Tree> rules_;
    std::vector<std::pair<std::string, std::string>> order_;
    int max_rhs_ = 0;
};

/// Calls in an rhs, outermost first in pre-order: (state, variable index).
std::vector<std::pair<std::string, int>> mtt_calls(const Tree& rhs);
std::string mtt_rule_string(const Mtt& m, const std::string& q, const std::string& symbol);

Tree evaluate(const Mtt& m, const Tree& s);
/// q(s) with parameters left as Param leaves.
Tree q_translation(const Mtt& m, const std::string& q, const Tree& s);

struct OriginTree {
    Tree output;
    std::map<Path, Path> origin;
};
OriginTree evaluate_with_origin(const Mtt& m, const Tree& s);
bool is_one_to_one_on(const Mtt& m, const Tree& s);
/// First input of height <= max_height whose origin map is not a bijection.
std::optional<Tree> check_one_to_one(const Mtt& m, int max_height);

std::vector<std::string> state_sequence(const Mtt& m, const Tree& s, const Path& u);
int delay(const Mtt& m, const Tree& s, const Path& u);

struct DelayEntry {
    /// Input label, or "*" when the table is keyed by sequence only.
    std::string label;
    std::vector<std::string> sequence;
    int delay = 0;
    Tree witness;
    Path at;
};

struct DelayTable {
    std::vector<DelayEntry> entries;
    /// Largest observed |delay|, at least 1.
    int b = 1;
    /// n * max_rhs * (k+1)^|R_s|, kept as a double since it overflows quickly.
    double theoretical_bound = 0;
    std::optional<int> lookup(const std::string& label, const std::vector<std::string>& seq) const;
};

/// Delays observed on all inputs of height <= max_height. Throws when a key
/// maps to two different delays.
DelayTable build_delay_table(const Mtt& m, int max_height = 6, bool by_label = false);

struct ParamReport {
    /// Deleted or copied parameters and unvisited input variables.
    std::vector<std::string> violations;
    /// Rules whose rhs is a bare parameter.
    std::vector<std::string> erasing;
    bool passes() const { return violations.empty(); }
    bool nonerasing() const { return erasing.empty(); }
};
ParamReport param_discipline_check(const Mtt& m);

/// Replaces every non-parameter subtree at depth b+1 (root has depth 1) by a
/// fresh leaf Var(1), Var(2), ... numbered in pre-order.
Tree prefix_cut(const Tree& t, int b);

struct PrefixTable {
    int b = 1;
    std::vector<std::string> states;
    /// classes[c][i] is the prefix of states[i] for class c.
    std::vector<std::vector<Tree>> classes;
    std::map<std::pair<std::string, std::vector<int>>, int> transitions;

    int class_of(const Tree& t) const;
    const Tree& prefix(int cls, const std::string& q) const;
};
PrefixTable build_prefix_table(const Mtt& m, int b, std::size_t cap = 10000);

}  // namespace ttk
