#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ttk {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t pos)
        : Error(msg + " (at offset " + std::to_string(pos) + ")"), pos_(pos) {}
    std::size_t position() const noexcept { return pos_; }

private:
    std::size_t pos_;
};

/// Raised when an exploration exceeds its configured output cap.
class CapExceeded : public Error {
public:
    using Error::Error;
};

/// Symbol name -> rank.
class RankedAlphabet {
public:
    RankedAlphabet() = default;
    RankedAlphabet(std::initializer_list<std::pair<const std::string, int>> init);

    void add(const std::string& name, int rank);
    bool contains(const std::string& name) const { return ranks_.count(name) != 0; }
    int rank(const std::string& name) const;
    int max_rank() const;
    bool has_constant() const;
    std::size_t size() const { return ranks_.size(); }
    const std::map<std::string, int>& symbols() const { return ranks_; }

    friend bool operator==(const RankedAlphabet&, const RankedAlphabet&) = default;

private:
    std::map<std::string, int> ranks_;
};

/// The shape alphabet {#0, ..., #n}.
RankedAlphabet shape_alphabet(int max_rank);
std::string shape_symbol(int rank);

enum class Kind : std::uint8_t { Symbol, Var, Param, Call };

/// Immutable ranked tree with structural sharing.
///
/// Symbol nodes carry an alphabet symbol. Var(i) is the input variable x_i
/// (i = 0 denotes the single hole variable x). Param(j) is the parameter y_j.
/// Call nodes are pending state calls: the first child is the input the
/// state runs on, the remaining children are parameter arguments.
class Tree {
public:
    Tree();

    static Tree symbol(std::string name, std::vector<Tree> children = {});
    static Tree var(int index);
    static Tree param(int index);
    static Tree call(std::string state, std::vector<Tree> children);

    Kind kind() const noexcept { return node_->kind; }
    bool is_symbol() const noexcept { return kind() == Kind::Symbol; }
    bool is_var() const noexcept { return kind() == Kind::Var; }
    bool is_param() const noexcept { return kind() == Kind::Param; }
    bool is_call() const noexcept { return kind() == Kind::Call; }

    /// Symbol name or state name (empty for variables and parameters).
    const std::string& label() const noexcept { return node_->label; }
    int index() const noexcept { return node_->index; }

    std::span<const Tree> children() const noexcept { return node_->children; }
    const Tree& child(std::size_t i) const { return node_->children.at(i); }
    std::size_t arity() const noexcept { return node_->children.size(); }

    std::size_t hash() const noexcept { return node_->hash; }
    int height() const noexcept { return node_->height; }
    int node_count() const noexcept { return node_->nodes; }
    /// Number of Symbol nodes; variables, parameters and calls weigh nothing.
    int size() const noexcept { return node_->symbols; }
    /// True if no Var, Param or Call node occurs.
    bool ground() const noexcept { return node_->ground; }

    friend bool operator==(const Tree& a, const Tree& b) noexcept;
    friend std::strong_ordering operator<=>(const Tree& a, const Tree& b) noexcept;

private:
    struct Node {
        Kind kind;
        std::string label;
        int index;
        std::vector<Tree> children;
        std::size_t hash;
        int height;
        int nodes;
        int symbols;
        bool ground;
    };
    explicit Tree(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static Tree make(Kind kind, std::string label, int index, std::vector<Tree> children);

    std::shared_ptr<const Node> node_;
};

struct TreeHash {
    std::size_t operator()(const Tree& t) const noexcept { return t.hash(); }
};

/// Height-major, then structural order. This is the enumeration order.
bool enumeration_less(const Tree& a, const Tree& b) noexcept;

/// A node address: child indices starting at 1; empty is the root.
class Path {
public:
    Path() = default;
    explicit Path(std::vector<int> steps) : steps_(std::move(steps)) {}

    static Path parse(const std::string& text);
    std::string str() const;

    bool empty() const noexcept { return steps_.empty(); }
    std::size_t length() const noexcept { return steps_.size(); }
    std::span<const int> steps() const noexcept { return steps_; }
    int operator[](std::size_t i) const { return steps_.at(i); }

    Path child(int i) const;
    Path concat(const Path& other) const;
    bool is_prefix_of(const Path& other) const noexcept;
    /// Remainder after removing `prefix`; requires prefix.is_prefix_of(*this).
    Path suffix_after(const Path& prefix) const;

    friend auto operator<=>(const Path&, const Path&) = default;
    friend bool operator==(const Path&, const Path&) = default;

private:
    std::vector<int> steps_;
};

enum class CallStyle { Top, Mtt };

std::string to_string(const Tree& t, CallStyle style = CallStyle::Top);

/// Untyped parse result of the term grammar, before symbols are resolved.
struct RawTerm {
    std::string name;
    std::vector<RawTerm> children;
    /// `<name, input>(args)` form: children[0] is the input, rest are arguments.
    bool angle = false;
    std::size_t pos = 0;
};

RawTerm parse_raw_term(const std::string& text);
/// Reads one term starting at `pos`, advancing it past the term.
RawTerm parse_raw_term(const std::string& text, std::size_t& pos);

/// Parses a ground tree over `alphabet`.
Tree parse_tree(const std::string& text, const RankedAlphabet& alphabet);

/// True if every symbol of t is in the alphabet with matching arity.
bool conforms(const Tree& t, const RankedAlphabet& alphabet);

Tree shape(const Tree& t);

const Tree& navigate(const Tree& t, const Path& u);
std::optional<Tree> try_navigate(const Tree& t, const Path& u);
Tree graft(const Tree& t, const Path& u, const Tree& replacement);
bool valid_path(const Tree& t, const Path& u);
/// All node addresses in pre-order.
std::vector<Path> nodes(const Tree& t);

/// Variables (Var nodes) and parameters (Param nodes) are looked up by index.
struct Substitution {
    std::map<int, Tree> vars;
    std::map<int, Tree> params;
};
Tree substitute(const Tree& t, const Substitution& s);
Tree substitute_vars(const Tree& t, std::span<const Tree> xs);
Tree substitute_params(const Tree& t, std::span<const Tree> ys);

/// Every tree of height <= max_height over the alphabet, in enumeration order.
std::vector<Tree> enumerate_trees(const RankedAlphabet& alphabet, int max_height);

}  // namespace ttk
