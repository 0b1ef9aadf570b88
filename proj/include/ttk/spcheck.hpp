#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "ttk/automata.hpp"
#include "ttk/mtt.hpp"
#include "ttk/topt.hpp"

namespace ttk {

struct Verdict {
    enum class Kind { NotPreserving, PreservingUpTo };
    enum class Evidence { None, Structural, NonFunctional, ShapeMismatch };

    Kind kind = Kind::PreservingUpTo;
    Evidence evidence = Evidence::None;
    /// Offending input (always set except for a structural witness found
    /// beyond the height bound).
    std::optional<Tree> input;
    /// Two shape-distinct outputs, or one output whose shape differs from the input's.
    std::vector<Tree> outputs;
    /// Offending rule for structural witnesses.
    std::string rule;
    int height = 0;
    bool structural_passed = false;

    bool preserving() const { return kind == Kind::PreservingUpTo; }
    std::string describe() const;
};

/// Thrown by equivalence_counterexample when an input has several outputs.
class NotFunctional : public Error {
public:
    NotFunctional(const std::string& msg, Tree input) : Error(msg), input_(std::move(input)) {}
    const Tree& input() const { return input_; }

private:
    Tree input_;
};

/// Rules that contradict leaf bijection: an output constant on a non-leaf
/// input, or a leaf rule not producing exactly one leaf.
std::optional<std::string> structural_check(const Top& m);

std::optional<std::tuple<Tree, Tree, Tree>> functionality_counterexample(
    const Top& m, const TreeAutomaton& dom, int max_height, std::size_t cap = 10000);

std::optional<Tree> equivalence_counterexample(const Top& m1, const Top& m2, const TreeAutomaton& dom,
                                               int max_height, std::size_t cap = 10000);

Verdict decide_shape_preserving(const Top& m, int max_height = 7, std::size_t cap = 10000);
Verdict decide_shape_preserving_mtt(const Mtt& m, int max_height = 7);

/// Re-runs the transducer on the stored input and rechecks the evidence.
bool verify_verdict(const Top& m, const Verdict& v, std::size_t cap = 10000);
bool verify_verdict(const Mtt& m, const Verdict& v);

}  // namespace ttk
