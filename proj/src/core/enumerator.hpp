#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dsl.hpp"
#include "regex_ast.hpp"
#include "smt/backend.hpp"

namespace forest {

struct TreeShape {
    int n = 1;
    int d = 2;

    int nodes_per_tree() const { return (1 << d) - 1; }
    int node_count() const { return n * nodes_per_tree(); }
    friend bool operator==(const TreeShape&, const TreeShape&) = default;
};

enum class ScheduleMode { Static, Dynamic, KTree };

struct ShapeLimits {
    int max_depth = 6;
    int max_nodes = 40;
};

// Lazy shape order. Static: (n,2), (n,3), ... Dynamic: every (n,d) by
// ascending n*(2^d-1), shallower first on ties. KTree: (1,2), (1,3), ...
class ShapeSchedule {
public:
    ShapeSchedule(ScheduleMode mode, ShapeLimits limits, int static_n = 1);
    std::optional<TreeShape> next();

private:
    ScheduleMode mode_;
    ShapeLimits limits_;
    int static_n_;
    int depth_ = 2;
    int nodes_ = 0;
    std::vector<TreeShape> pending_;
};

struct PruningOptions {
    bool quantifier_nesting = true;  // (r*)*, (r?)+, ...
    bool range_quantifier = true;    // (r*){m,n}, (r{0,n})*, ...
    bool nested_range = true;        // (r{a,b}){c,d} expressible as one range
    bool union_idempotence = true;   // r|r
    bool union_commutativity = true; // block r|s together with s|r
    // Block every program sharing the nodes that make a failing program fail
    // (see Enumerator::relax), not only the program itself.
    bool generalized_blocking = true;

    static PruningOptions none() { return {false, false, false, false, false, false}; }
    bool any() const
    {
        return quantifier_nesting || range_quantifier || nested_range || union_idempotence || union_commutativity ||
               generalized_blocking;
    }
};

// One tree of a multi-tree: searched over a DSL, or a fixed regex kept
// outside the solver.
struct TreeSlot {
    std::optional<DslSpec> dsl;
    std::optional<Regex> fixed;
};

struct MultiTreeProgram {
    TreeShape shape;
    // assignment[t][i-1] is the production id of node i of tree t; empty for
    // fixed trees.
    std::vector<std::vector<int>> assignment;

    friend bool operator==(const MultiTreeProgram&, const MultiTreeProgram&) = default;
};

// Per tree, per node: 1 when the node is kept.
using NodeMask = std::vector<std::vector<char>>;

// A set of programs around one program p. Dropped nodes are free; kept nodes
// hold p's value, or any value of `allowed` when that is non-empty. A
// stand-in is the regex (terminal nodes) or range (range-literal nodes) used
// when decoding, chosen to cover every allowed value in the direction of the
// relaxation.
struct Relaxation {
    // Wider: the decoded regex over-approximates every member (a valid
    // example is rejected). Narrower: it under-approximates every member (an
    // invalid example is accepted).
    bool wider = true;
    NodeMask keep;
    std::vector<std::vector<std::vector<int>>> allowed;
    std::vector<std::vector<std::optional<Regex>>> leaf;
    std::vector<std::vector<std::optional<RangeLit>>> range;
};

class EncodingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Enumerator {
public:
    Enumerator(smt::Backend& backend, std::vector<TreeSlot> trees, int depth, PruningOptions pruning);
    Enumerator(smt::Backend& backend, const DslSpec& dsl, TreeShape shape, PruningOptions pruning);

    const TreeShape& shape() const { return shape_; }
    const std::vector<TreeSlot>& trees() const { return trees_; }
    const PruningOptions& pruning() const { return pruning_; }
    uint64_t programs() const { return programs_; }

    // Next model, already blocked; nullopt once the shape is exhausted.
    std::optional<MultiTreeProgram> next();

    // Blocks every union-swap variant of p (including p itself).
    void block_equivalent(const MultiTreeProgram& p);

    // Blocks every program in the relaxation.
    void block_partial(const MultiTreeProgram& p, const Relaxation& r);

    // The relaxation holding exactly p.
    Relaxation exact(const MultiTreeProgram& p, bool wider) const;

    Regex decode(const MultiTreeProgram& p) const;
    Regex decode_tree(const MultiTreeProgram& p, size_t tree) const;
    // Dropped Re-typed subtrees become `hole` (Σ* when wider, the empty class
    // when narrower). A kept Range whose literal is dropped becomes a star
    // when wider and the hole otherwise.
    Regex decode_relaxed(const MultiTreeProgram& p, size_t tree, const Relaxation& r, const Regex& hole) const;

    // Greedily generalizes p while `still_fails` holds: first drops subtrees
    // in level order across trees, then turns terminals and range literals
    // into value sets.
    Relaxation relax(const MultiTreeProgram& p, const std::function<bool(const Relaxation&)>& still_fails,
                     bool wider) const;

private:
    smt::IntVar var(size_t tree, int node) const { return vars_[tree][static_cast<size_t>(node - 1)]; }
    bool searched(size_t tree) const { return trees_[tree].dsl.has_value(); }
    bool is_leaf(int node) const { return node >= (1 << (shape_.d - 1)); }
    // Type a node's parent expects at this position.
    SymType expected_type(const MultiTreeProgram& p, size_t tree, int node) const;

    void encode();
    void assert_pruning();
    Regex decode_node(const MultiTreeProgram& p, size_t tree, int node, const Relaxation* r, const Regex* hole) const;
    void block_assignment(const std::vector<std::vector<int>>& a, const Relaxation* r);

    smt::Backend& backend_;
    std::vector<TreeSlot> trees_;
    TreeShape shape_;
    PruningOptions pruning_;
    std::vector<std::vector<smt::IntVar>> vars_;
    uint64_t programs_ = 0;
};

}  // namespace forest
