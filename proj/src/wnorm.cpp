#include "mprb/wnorm.hpp"

#include "mprb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mprb {

namespace {
double weight(const ScenarioTree& tree, const TreeNode& node, const WeightedNorm& w) {
    return std::exp(w.beta * node.a + w.gamma * tree.grid().time(node.level));
}
} // namespace

double norm_sq(const ScenarioTree& tree, const NodeProcess& x, const WeightedNorm& w) {
    if (w.kind == WeightedNorm::Kind::p)
        throw std::invalid_argument("the p-norm applies to mark-indexed processes");
    double total = 0.0;
    for (NodeId id = 0; id < tree.size(); ++id) {
        if (tree.is_leaf(id))
            continue;
        const TreeNode& node = tree.node(id);
        double measure = 0.0;
        if (w.kind == WeightedNorm::Kind::A || w.kind == WeightedNorm::Kind::A_plus_lambda)
            measure += node.step_da;
        if (w.kind == WeightedNorm::Kind::W || w.kind == WeightedNorm::Kind::A_plus_lambda)
            measure += node.step_dt;
        total += node.path_prob * weight(tree, node, w) * x[id] * x[id] * measure;
    }
    return total;
}

double norm_sq(const ScenarioTree& tree, const MarkProcess& x, const WeightedNorm& w) {
    if (w.kind != WeightedNorm::Kind::p)
        throw std::invalid_argument("mark-indexed processes use the p-norm");
    double total = 0.0;
    for (NodeId id = 0; id < tree.size(); ++id) {
        if (tree.is_leaf(id))
            continue;
        const TreeNode& node = tree.node(id);
        const auto phi = tree.kernel(node.level);
        const auto xi = x[id];
        double inner = 0.0;
        for (std::size_t e = 0; e < phi.size(); ++e)
            inner += xi[e] * xi[e] * phi[e];
        total += node.path_prob * weight(tree, node, w) * inner * node.step_da;
    }
    return total;
}

CauchyBound cauchy_weight_bound(const ScenarioTree& tree, const NodeProcess& f, double beta) {
    if (!(beta > 0.0))
        throw BetaZero();
    NodeProcess plain(tree.size()), weighted(tree.size());
    CauchyBound bound;
    for (NodeId id = 1; id < tree.size(); ++id) {
        const TreeNode& node = tree.node(id);
        const TreeNode& parent = tree.node(node.parent);
        plain[id] = plain[node.parent] + f[node.parent] * parent.step_da;
        weighted[id] = weighted[node.parent] + std::exp(beta * node.a) * f[node.parent] * f[node.parent] * parent.step_da;
        if (tree.is_leaf(id)) {
            const double lhs = plain[id] * plain[id];
            const double rhs = weighted[id] / beta;
            bound.lhs = std::max(bound.lhs, lhs);
            bound.rhs = std::max(bound.rhs, rhs);
            if (lhs > rhs * (1.0 + 1e-12) + 1e-300)
                bound.holds_pathwise = false;
        }
    }
    return bound;
}

} // namespace mprb
