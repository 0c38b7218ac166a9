#include "mprb/stopping.hpp"

#include "mprb/errors.hpp"

#include <algorithm>
#include <cstdint>

namespace mprb {

namespace {

std::vector<NodeId> subtree_nodes(const ScenarioTree& tree, NodeId root) {
    std::vector<NodeId> out{root};
    for (std::size_t i = 0; i < out.size(); ++i)
        for (NodeId c = tree.child_begin(out[i]); c < tree.child_end(out[i]); ++c)
            out.push_back(c);
    return out;  // BFS from root: ascending ids, parents before children
}

/// first[id] = first stop node on the path root -> id (no_node if none yet).
std::vector<NodeId> first_stop(const ScenarioTree& tree, const std::vector<NodeId>& nodes,
                               const std::vector<char>& stop, NodeId root) {
    std::vector<NodeId> first(tree.size(), no_node);
    for (NodeId id : nodes) {
        const NodeId inherited = id == root ? no_node : first[tree.node(id).parent];
        const bool stops = stop[id] || tree.is_leaf(id);
        first[id] = inherited != no_node ? inherited : (stops ? id : no_node);
    }
    return first;
}

double rule_value(const ScenarioTree& tree, const std::vector<NodeId>& nodes, const NodeProcess& eta,
                  const std::vector<char>& stop, std::vector<double>& scratch) {
    for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
        const NodeId id = *it;
        if (tree.is_leaf(id) || stop[id]) {
            scratch[id] = eta[id];
            continue;
        }
        double v = 0.0;
        for (NodeId c = tree.child_begin(id); c < tree.child_end(id); ++c)
            v += tree.node(c).branch_prob * scratch[c];
        scratch[id] = v;
    }
    return scratch[nodes.front()];
}

} // namespace

StoppingRule StoppingRule::at_leaves(const ScenarioTree& tree, NodeId root) {
    StoppingRule rule{root, std::vector<char>(tree.size(), 0)};
    for (NodeId id = 0; id < tree.size(); ++id)
        rule.stop[id] = tree.is_leaf(id) ? 1 : 0;
    return rule;
}

std::vector<NodeId> StoppingRule::first_entries(const ScenarioTree& tree) const {
    const auto nodes = subtree_nodes(tree, root);
    const auto first = first_stop(tree, nodes, stop, root);
    std::vector<NodeId> out;
    for (NodeId id : nodes)
        if (first[id] == id)
            out.push_back(id);
    return out;
}

std::vector<std::size_t> StoppingRule::stop_levels(const ScenarioTree& tree) const {
    const auto nodes = subtree_nodes(tree, root);
    const auto first = first_stop(tree, nodes, stop, root);
    std::vector<std::size_t> levels;
    for (NodeId id : nodes)
        if (tree.is_leaf(id))
            levels.push_back(tree.node(first[id]).level);
    return levels;
}

StoppingRule rule_from_stop_set(const ScenarioTree& tree, const std::vector<NodeId>& stop_set, NodeId root) {
    StoppingRule rule{root, std::vector<char>(tree.size(), 0)};
    for (NodeId id = 0; id < tree.size(); ++id)
        if (tree.is_leaf(id))
            rule.stop[id] = 1;
    for (NodeId id : stop_set)
        rule.stop[id] = 1;
    return rule;
}

double reward_of_rule(const ScenarioTree& tree, const GivenGenerators& gen, const StoppingRule& rule) {
    const NodeProcess eta = reward_process(tree, gen);
    const NodeProcess I = running_integrals(tree, gen);
    std::vector<double> scratch(tree.size());
    return rule_value(tree, subtree_nodes(tree, rule.root), eta, rule.stop, scratch) - I[rule.root];
}

StoppingCertificate brute_force_value(const ScenarioTree& tree, const GivenGenerators& gen, NodeId root,
                                      bool keep_table) {
    gen.validate(tree);
    const auto nodes = subtree_nodes(tree, root);
    std::vector<NodeId> interior;
    for (NodeId id : nodes)
        if (!tree.is_leaf(id))
            interior.push_back(id);
    if (interior.size() > enumeration_node_cap)
        throw EnumerationBudgetExceeded(interior.size(), enumeration_node_cap);

    const NodeProcess eta = reward_process(tree, gen);
    const double offset = running_integrals(tree, gen)[root];
    std::vector<double> scratch(tree.size());
    std::vector<char> stop(tree.size(), 0);
    std::vector<char> reachable(tree.size(), 0);

    StoppingCertificate cert;
    if (keep_table)
        cert.all_values.emplace();
    std::vector<NodeId> best_set;
    bool have_best = false;

    const std::uint64_t masks = std::uint64_t{1} << interior.size();
    for (std::uint64_t mask = 0; mask < masks; ++mask) {
        for (std::size_t i = 0; i < interior.size(); ++i)
            stop[interior[i]] = (mask >> i) & 1u;
        // Canonical rules only: a marked node must be reachable without an earlier stop.
        bool canonical = true;
        reachable[root] = 1;
        for (std::size_t i = 0; i < interior.size() && canonical; ++i) {
            const NodeId id = interior[i];
            if (id != root) {
                const NodeId p = tree.node(id).parent;
                reachable[id] = reachable[p] && !stop[p];
            }
            if (stop[id] && !reachable[id])
                canonical = false;
        }
        if (!canonical)
            continue;
        ++cert.enumerated;
        const double value = rule_value(tree, nodes, eta, stop, scratch) - offset;
        const bool better = !have_best || value > cert.value + 1e-12;
        const bool tie = have_best && !better && value >= cert.value - 1e-12;
        if (!better && !tie && !keep_table)
            continue;
        StoppingRule candidate{root, stop};
        auto stop_set = candidate.first_entries(tree);
        if (better || (tie && stop_set < best_set)) {
            cert.value = value;
            cert.best_rule = candidate;
            best_set = stop_set;
            have_best = true;
        }
        if (keep_table)
            cert.all_values->push_back({std::move(stop_set), value});
    }
    return cert;
}

StoppingRule epsilon_optimal_time(const ScenarioTree& tree, const RbsdeSolution& sol, const NodeProcess& h,
                                  double epsilon, NodeId root) {
    StoppingRule rule{root, std::vector<char>(tree.size(), 0)};
    for (NodeId id = 0; id < tree.size(); ++id)
        rule.stop[id] = tree.is_leaf(id) || sol.Y[id] <= h[id] + epsilon ? 1 : 0;
    return rule;
}

SmallestOptimalTime smallest_optimal_time(const ScenarioTree& tree, const RbsdeSolution& sol,
                                          const GivenGenerators& gen, NodeId root) {
    return {epsilon_optimal_time(tree, sol, gen.h, 0.0, root), gen.left_usce_surrogate};
}

double k_flatness_before_stop(const ScenarioTree& tree, const RbsdeSolution& sol, const StoppingRule& rule) {
    double worst = 0.0;
    for (NodeId id : rule.first_entries(tree))
        worst = std::max(worst, sol.K[id] - sol.K[rule.root]);
    return worst;
}

bool stops_no_later(const ScenarioTree& tree, const StoppingRule& a, const StoppingRule& b) {
    const auto la = a.stop_levels(tree);
    const auto lb = b.stop_levels(tree);
    for (std::size_t i = 0; i < la.size(); ++i)
        if (la[i] > lb[i])
            return false;
    return true;
}

} // namespace mprb
