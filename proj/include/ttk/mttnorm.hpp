#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ttk/mtt.hpp"

namespace ttk {

/// Raised when a normalization step meets a case its invariants rule out.
class ConstructionBug : public Error {
public:
    using Error::Error;
};

/// Annotates each node with the prefix classes of its children; the node's
/// own class, and so every (q↑b)_q, follows from them.
struct Relabeling {
    struct Entry {
        std::string symbol;
        std::vector<int> children;
        int cls = 0;
    };

    RankedAlphabet input;
    RankedAlphabet output;
    PrefixTable prefixes;
    std::vector<Entry> legend;
    std::map<std::pair<std::string, std::vector<int>>, int> index;
    /// A smallest known tree per prefix class.
    std::vector<Tree> witnesses;

    Tree apply(const Tree& t) const;
    int class_of(const Tree& t) const { return prefixes.class_of(t); }
    std::string legend_text() const;
};

/// "(σ;rid)".
std::string annotated_symbol(const std::string& symbol, int rid);
/// σ for "(σ;rid)"; other names unchanged.
std::string plain_symbol(const std::string& name);

Relabeling build_relabeling(const Mtt& m, int b, std::size_t cap = 10000);

/// Name of the helper producing (q(s))/p.
std::string path_helper_name(const std::string& q, const Path& p);
/// Name of the c-th helper producing a single a-node.
std::string const_helper_name(const std::string& a, int c);

/// Predicted prefix q↑b of the subtree bound to x_var, if known.
using PrefixView = std::function<std::optional<Tree>(const std::string& q, int var)>;

/// (rhs)↓p. A call whose predicted prefix shows a parameter on the path
/// continues in that argument; otherwise it becomes a path helper call
/// carrying all arguments.
Tree down_path(const Tree& rhs, const Path& p, const PrefixView& prefix);

struct Normalization {
    Relabeling relabeling;
    Mtt mtt;
    int b = 1;
    /// State sequences used as contexts; M′ state "(base;i)" lives in contexts[i].
    std::vector<std::vector<std::string>> contexts;
    std::map<std::string, std::string> base_of;
    /// Rules with contexts and annotations dropped, deduplicated and sorted.
    std::vector<std::string> plain_rules;
    std::size_t max_const_helpers = 0;
};

/// Requires the parameter discipline and shape preservation up to max_height.
Normalization normalize_one_to_one(const Mtt& m, int max_height = 6, std::size_t cap = 10000);

struct NormalizationReport {
    std::size_t inputs = 0;
    std::optional<Tree> mismatch;
    std::optional<Tree> not_one_to_one;
    std::vector<std::string> nonzero_delays;
    std::vector<std::string> helper_violations;
    bool passes() const {
        return !mismatch && !not_one_to_one && nonzero_delays.empty() && helper_violations.empty();
    }
};

/// Checks R;M′ against M on all inputs up to max_height. A null relabeling
/// runs M′ on the inputs unchanged.
NormalizationReport verify_normalization(const Mtt& m, const Relabeling* r, const Mtt& normalized,
                                         int max_height);

}  // namespace ttk
