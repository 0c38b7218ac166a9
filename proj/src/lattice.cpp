#include "mprb/lattice.hpp"

#include "mprb/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace mprb {

std::size_t ScenarioTree::full_node_count(std::size_t steps, std::size_t marks, bool brownian) {
    constexpr std::size_t cap = std::numeric_limits<std::size_t>::max();
    const std::size_t branching = (brownian ? 2 : 1) * (1 + marks);
    std::size_t total = 0;
    std::size_t level = 1;
    for (std::size_t k = 0; k <= steps; ++k) {
        if (total > cap - level)
            return cap;
        total += level;
        if (k < steps) {
            if (level > cap / branching)
                return cap;
            level *= branching;
        }
    }
    return total;
}

ScenarioTree ScenarioTree::build(const TimeGrid& grid, const MarkSet& marks, const CompensatorSpec& comp,
                                 const TreeOptions& options) {
    if (marks.size() != comp.mark_count())
        throw std::invalid_argument("mark set and kernel sizes differ");
    const std::size_t required = full_node_count(grid.steps(), marks.size(), options.brownian);
    if (required > options.node_budget)
        throw BudgetExceeded(required, options.node_budget);

    ScenarioTree tree(grid, marks, comp, options.brownian);
    const std::size_t steps = grid.steps();
    const std::size_t m = marks.size();
    for (std::size_t k = 0; k <= steps; ++k) {
        const auto phi = comp.kernel(grid.time(k));
        tree.kernels_.emplace_back(phi.begin(), phi.end());
    }

    tree.nodes_.push_back(TreeNode{});
    tree.level_offset_.push_back(0);
    const std::vector<int> signs = options.brownian ? std::vector<int>{+1, -1} : std::vector<int>{0};
    const double brownian_factor = options.brownian ? 0.5 : 1.0;

    for (std::size_t k = 0; k < steps; ++k) {
        const NodeId begin = tree.level_offset_[k];
        const NodeId end = tree.nodes_.size();
        tree.level_offset_.push_back(end);
        const double dt = grid.dt(k);
        const double sqrt_dt = std::sqrt(dt);
        const auto& phi = tree.kernels_[k];
        for (NodeId id = begin; id < end; ++id) {
            const TreeNode parent = tree.nodes_[id];
            const double da = comp.increment(grid.time(k), grid.time(k + 1), parent.jumps);
            if (da < 0.0 || !std::isfinite(da))
                throw NonMonotoneCompensator(k, da);
            const double q = -std::expm1(-da);
            const double stay = std::exp(-da);
            const NodeId first = tree.nodes_.size();
            for (int sign : signs) {
                for (int j = -1; j < static_cast<int>(m); ++j) {
                    const double jump_factor = j < 0 ? stay : q * phi[static_cast<std::size_t>(j)];
                    const double p = brownian_factor * jump_factor;
                    if (!(p > 0.0))
                        continue;
                    TreeNode child;
                    child.level = k + 1;
                    child.parent = id;
                    child.brownian_sign = sign;
                    child.jump_mark = j;
                    child.branch_prob = p;
                    child.path_prob = parent.path_prob * p;
                    child.dw = sign * sqrt_dt;
                    child.w = parent.w + child.dw;
                    child.jumps = parent.jumps + (j >= 0 ? 1 : 0);
                    child.last_mark = j >= 0 ? j : parent.last_mark;
                    child.a = parent.a + da;
                    tree.nodes_.push_back(child);
                }
            }
            TreeNode& p = tree.nodes_[id];
            p.step_da = da;
            p.step_dt = dt;
            p.jump_prob = q;
            p.first_child = first;
            p.child_count = tree.nodes_.size() - first;
        }
    }
    tree.level_offset_.push_back(tree.nodes_.size());
    return tree;
}

double ScenarioTree::compensated_indicator(NodeId child, std::size_t mark) const {
    const TreeNode& c = nodes_[child];
    const TreeNode& p = nodes_[c.parent];
    const double hit = c.jump_mark == static_cast<int>(mark) ? 1.0 : 0.0;
    return hit - p.jump_prob * kernels_[p.level][mark];
}

std::string ScenarioTree::path_label(NodeId id) const {
    if (nodes_[id].parent == no_node)
        return "root";
    std::vector<NodeId> chain;
    for (NodeId n = id; nodes_[n].parent != no_node; n = nodes_[n].parent)
        chain.push_back(n);
    std::string label;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        const TreeNode& n = nodes_[*it];
        if (!label.empty())
            label += '.';
        label += n.brownian_sign > 0 ? 'u' : n.brownian_sign < 0 ? 'd' : 'o';
        label += std::to_string(n.jump_mark + 1);
    }
    return label;
}

double ScenarioTree::leaf_mass() const {
    double mass = 0.0;
    for (NodeId id = level_begin(depth()); id < level_end(depth()); ++id)
        mass += nodes_[id].path_prob;
    return mass;
}

double conditional_expectation(const ScenarioTree& tree, const NodeProcess& v, NodeId node) {
    double sum = 0.0;
    for (NodeId c = tree.child_begin(node); c < tree.child_end(node); ++c)
        sum += tree.node(c).branch_prob * v[c];
    return sum;
}

Representation extract_representation(const ScenarioTree& tree, const NodeProcess& v, NodeId node) {
    const TreeNode& n = tree.node(node);
    const std::size_t m = tree.mark_count();
    Representation rep;
    rep.u.assign(m, 0.0);
    rep.degenerate.assign(m, false);
    if (n.child_count == 0)
        return rep;

    double vdw = 0.0;
    double stay_mass = 0.0, stay_sum = 0.0;
    std::vector<double> mark_mass(m, 0.0), mark_sum(m, 0.0);
    for (NodeId c = tree.child_begin(node); c < tree.child_end(node); ++c) {
        const TreeNode& child = tree.node(c);
        const double p = child.branch_prob;
        rep.mean += p * v[c];
        vdw += p * v[c] * child.dw;
        if (child.jump_mark < 0) {
            stay_mass += p;
            stay_sum += p * v[c];
        } else {
            mark_mass[child.jump_mark] += p;
            mark_sum[child.jump_mark] += p * v[c];
        }
    }
    rep.z = tree.brownian() ? vdw / n.step_dt : 0.0;
    for (std::size_t e = 0; e < m; ++e) {
        if (mark_mass[e] > 0.0 && stay_mass > 0.0)
            rep.u[e] = mark_sum[e] / mark_mass[e] - stay_sum / stay_mass;
        else
            rep.degenerate[e] = true;
    }
    double sq = 0.0;
    for (NodeId c = tree.child_begin(node); c < tree.child_end(node); ++c) {
        const double r = branch_residual(tree, v, rep, c);
        sq += tree.node(c).branch_prob * r * r;
    }
    rep.residual = std::sqrt(sq);
    return rep;
}

double branch_residual(const ScenarioTree& tree, const NodeProcess& v, const Representation& rep,
                       NodeId child) {
    double r = v[child] - rep.mean - rep.z * tree.node(child).dw;
    for (std::size_t e = 0; e < rep.u.size(); ++e)
        r -= rep.u[e] * tree.compensated_indicator(child, e);
    return r;
}

} // namespace mprb
