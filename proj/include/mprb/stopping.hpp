#pragma once

#include "mprb/rbsde.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace mprb {

/// Node-measurable stopping rule on the subtree rooted at `root`.
///
/// `stop[id]` marks nodes where the rule stops if it gets there; leaves
/// always stop. The stopping time of a path is its first marked node.
struct StoppingRule {
    NodeId root = 0;
    std::vector<char> stop;

    static StoppingRule at_leaves(const ScenarioTree& tree, NodeId root = 0);

    /// Stop nodes actually reached (first entries), in increasing id order.
    std::vector<NodeId> first_entries(const ScenarioTree& tree) const;
    /// Level at which the rule stops on the path to each leaf of the subtree,
    /// indexed like the leaves in id order.
    std::vector<std::size_t> stop_levels(const ScenarioTree& tree) const;
};

/// E[η_τ - I_root | root]: integrals of f dA and g ds from the root up to the
/// stop node plus h there (ξ at a leaf).
double reward_of_rule(const ScenarioTree& tree, const GivenGenerators& gen, const StoppingRule& rule);

struct EnumeratedRule {
    std::vector<NodeId> stop_set;  ///< first entries, ascending ids
    double value;
};

struct StoppingCertificate {
    double value = 0.0;
    StoppingRule best_rule;
    std::size_t enumerated = 0;
    std::optional<std::vector<EnumeratedRule>> all_values;
    double epsilon = 0.0;
};

inline constexpr std::size_t enumeration_node_cap = 20;

/// Exhaustive search over all stopping rules of the subtree rooted at `root`.
/// Ties within 1e-12 go to the lexicographically smallest stop set (ids are
/// level-ordered, so earlier stopping wins). Throws EnumerationBudgetExceeded
/// when the subtree has more than 20 interior nodes.
StoppingCertificate brute_force_value(const ScenarioTree& tree, const GivenGenerators& gen, NodeId root = 0,
                                      bool keep_table = false);

/// D^ε: first node with Y <= h + ε, else the leaf.
StoppingRule epsilon_optimal_time(const ScenarioTree& tree, const RbsdeSolution& sol, const NodeProcess& h,
                                  double epsilon, NodeId root = 0);

struct SmallestOptimalTime {
    StoppingRule rule;
    /// τ* is certified optimal only under the left-USCE barrier hypothesis.
    bool guaranteed_optimal = true;
};

/// τ* = D^0.
SmallestOptimalTime smallest_optimal_time(const ScenarioTree& tree, const RbsdeSolution& sol,
                                          const GivenGenerators& gen, NodeId root = 0);

/// max over paths of K accumulated strictly before the stop node.
double k_flatness_before_stop(const ScenarioTree& tree, const RbsdeSolution& sol, const StoppingRule& rule);

/// True when `a` stops no later than `b` on every path.
bool stops_no_later(const ScenarioTree& tree, const StoppingRule& a, const StoppingRule& b);

StoppingRule rule_from_stop_set(const ScenarioTree& tree, const std::vector<NodeId>& stop_set, NodeId root = 0);

} // namespace mprb
