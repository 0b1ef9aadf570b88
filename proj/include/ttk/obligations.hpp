#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ttk/automata.hpp"
#include "ttk/topt.hpp"

namespace ttk {

/// A requirement on an input subtree s:
///   Dom(q)       s is in dom(M_q)
///   Target(q,t)  t is in M_q(s)
///   Aut(p)       s is in L(p) of the auxiliary automaton
struct Obligation {
    enum class Kind : std::uint8_t { Dom, Target, Aut };
    Kind kind = Kind::Dom;
    std::string name;
    Tree target;

    static Obligation dom(std::string q) { return {Kind::Dom, std::move(q), Tree()}; }
    static Obligation aim(std::string q, Tree t) { return {Kind::Target, std::move(q), std::move(t)}; }
    static Obligation aut(std::string p) { return {Kind::Aut, std::move(p), Tree()}; }

    friend auto operator<=>(const Obligation&, const Obligation&) = default;
    friend bool operator==(const Obligation&, const Obligation&) = default;
};

using ObligationSet = std::set<Obligation>;

std::string obligation_set_name(const ObligationSet& s);

/// Explores sets of obligations as states of a top-down automaton. A set is
/// satisfied by s iff every member is. The empty set accepts everything.
class ObligationExplorer {
public:
    static constexpr std::size_t no_rule = static_cast<std::size_t>(-1);

    struct Move {
        std::vector<int> children;
        /// Chosen rule per member of the set (iteration order); no_rule for Aut.
        std::vector<std::size_t> rules;
    };

    explicit ObligationExplorer(const Top& m, const TreeAutomaton* aux = nullptr,
                                std::size_t cap = 200000);

    int intern(const ObligationSet& s);
    const ObligationSet& set(int id) const { return sets_.at(static_cast<std::size_t>(id)); }
    std::size_t size() const { return sets_.size(); }

    const std::vector<Move>& moves(int id, const std::string& symbol);
    bool productive(int id);
    std::optional<Tree> witness(int id);

    /// Reachable productive part from the roots, as a tree automaton.
    TreeAutomaton automaton(const std::vector<int>& roots, const std::string& name);
    /// Ids reachable from the roots through moves whose children are all productive.
    std::vector<int> reachable(const std::vector<int>& roots);

    const Top& top() const { return m_; }
    const RankedAlphabet& alphabet() const { return m_.input; }

private:
    void decide(int id);

    const Top& m_;
    const TreeAutomaton* aux_;
    std::size_t cap_;
    std::vector<ObligationSet> sets_;
    std::map<ObligationSet, int> ids_;
    std::map<std::pair<int, std::string>, std::vector<Move>> moves_;
    std::map<int, std::optional<Tree>> decided_;
};

}  // namespace ttk
