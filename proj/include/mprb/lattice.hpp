#pragma once

#include "mprb/mpp.hpp"
#include "mprb/time_grid.hpp"

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace mprb {

using NodeId = std::size_t;
inline constexpr NodeId no_node = std::numeric_limits<NodeId>::max();

/// One node of the non-recombining scenario tree.
///
/// The branch fields describe the transition parent -> this node; the step
/// fields describe the transition this node -> its children over (t_k, t_{k+1}].
struct TreeNode {
    std::size_t level = 0;
    NodeId parent = no_node;

    int brownian_sign = 0;      ///< +1 up, -1 down, 0 at the root or without Brownian branching
    int jump_mark = -1;         ///< mark index of the jump on the incoming branch, -1 if none
    double branch_prob = 1.0;   ///< conditional probability given the parent
    double path_prob = 1.0;

    double w = 0.0;             ///< cumulative Brownian value W_{t_k}
    double dw = 0.0;            ///< incoming Brownian increment
    int jumps = 0;              ///< N_{t_k}
    int last_mark = -1;
    double a = 0.0;             ///< A_{t_k}

    double step_da = 0.0;       ///< ΔA_k
    double step_dt = 0.0;       ///< Δ_k
    double jump_prob = 0.0;     ///< 1 - exp(-ΔA_k)

    NodeId first_child = no_node;
    std::size_t child_count = 0;
};

struct TreeOptions {
    bool brownian = true;
    std::size_t node_budget = 2'000'000;
};

/// Values of a real process on every node of a tree.
class NodeProcess {
public:
    NodeProcess() = default;
    explicit NodeProcess(std::size_t nodes, double value = 0.0) : values_(nodes, value) {}

    double& operator[](NodeId id) { return values_[id]; }
    double operator[](NodeId id) const { return values_[id]; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    bool operator==(const NodeProcess&) const = default;

private:
    std::vector<double> values_;
};

/// Mark-indexed process (U-type): one m-vector per node.
class MarkProcess {
public:
    MarkProcess() = default;
    MarkProcess(std::size_t nodes, std::size_t marks, double value = 0.0)
        : marks_(marks), values_(nodes * marks, value) {}

    std::span<double> operator[](NodeId id) { return {values_.data() + id * marks_, marks_}; }
    std::span<const double> operator[](NodeId id) const { return {values_.data() + id * marks_, marks_}; }
    std::size_t marks() const { return marks_; }
    std::size_t size() const { return marks_ == 0 ? 0 : values_.size() / marks_; }
    bool empty() const { return values_.empty(); }
    const std::vector<double>& values() const { return values_; }

    bool operator==(const MarkProcess&) const = default;

private:
    std::size_t marks_ = 0;
    std::vector<double> values_;
};

/// Finite filtration carrying binomial Brownian increments ±√Δ_k and a
/// jump/mark outcome per step. Children of a node are stored contiguously;
/// node ids are level-ordered so levels are contiguous id ranges.
class ScenarioTree {
public:
    /// Each node branches into up/down × (no jump, mark 1..m). Branches of
    /// probability zero (ΔA_k = 0 or φ_k(e) = 0) are not materialized.
    /// Throws BudgetExceeded if Σ_k (b(1+m))^k exceeds the node budget,
    /// b = 2 with Brownian branching and 1 without.
    static ScenarioTree build(const TimeGrid& grid, const MarkSet& marks, const CompensatorSpec& comp,
                              const TreeOptions& options = {});

    /// Σ_{k=0..N} (b(1+m))^k, saturating.
    static std::size_t full_node_count(std::size_t steps, std::size_t marks, bool brownian);

    const TimeGrid& grid() const { return grid_; }
    const MarkSet& marks() const { return marks_; }
    const CompensatorSpec& compensator() const { return comp_; }
    bool brownian() const { return brownian_; }

    std::size_t size() const { return nodes_.size(); }
    std::size_t depth() const { return grid_.steps(); }
    std::size_t mark_count() const { return marks_.size(); }

    const TreeNode& node(NodeId id) const { return nodes_[id]; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    bool is_leaf(NodeId id) const { return nodes_[id].child_count == 0; }

    /// Ids [first, last) of the nodes on level k.
    NodeId level_begin(std::size_t k) const { return level_offset_[k]; }
    NodeId level_end(std::size_t k) const { return level_offset_[k + 1]; }
    std::size_t level_size(std::size_t k) const { return level_end(k) - level_begin(k); }

    NodeId child_begin(NodeId id) const { return nodes_[id].first_child; }
    NodeId child_end(NodeId id) const { return nodes_[id].first_child + nodes_[id].child_count; }

    /// φ_{t_k} used at level k.
    std::span<const double> kernel(std::size_t level) const { return kernels_[level]; }

    /// 1_{mark e on the branch into child} - (1 - e^{-ΔA_k}) φ_k(e).
    double compensated_indicator(NodeId child, std::size_t mark) const;

    /// Branch labels from the root, e.g. "u0.d1" (u/d Brownian, 0 no jump, i = mark i).
    std::string path_label(NodeId id) const;

    /// Σ of path probabilities over the leaves.
    double leaf_mass() const;

private:
    ScenarioTree(TimeGrid grid, MarkSet marks, CompensatorSpec comp, bool brownian)
        : grid_(std::move(grid)), marks_(std::move(marks)), comp_(std::move(comp)), brownian_(brownian) {}

    TimeGrid grid_;
    MarkSet marks_;
    CompensatorSpec comp_;
    bool brownian_;
    std::vector<TreeNode> nodes_;
    std::vector<NodeId> level_offset_;
    std::vector<std::vector<double>> kernels_;
};

/// E[v | node] = Σ_children p_c v_c.
double conditional_expectation(const ScenarioTree& tree, const NodeProcess& v, NodeId node);

/// One-step martingale representation of v over the children of a node.
struct Representation {
    double mean = 0.0;            ///< E[v | node]
    double z = 0.0;               ///< E[v ΔW | node] / Δ_k
    std::vector<double> u;        ///< E[v | jump e] - E[v | no jump]
    double residual = 0.0;        ///< L² norm of the unexplained part under the child measure
    std::vector<bool> degenerate; ///< u(e) forced to 0: a conditioning event had probability 0
};

Representation extract_representation(const ScenarioTree& tree, const NodeProcess& v, NodeId node);

/// v_child - E[v|node] - z ΔW - Σ_e u(e)·compensated_indicator(child, e).
double branch_residual(const ScenarioTree& tree, const NodeProcess& v, const Representation& rep,
                       NodeId child);

} // namespace mprb
