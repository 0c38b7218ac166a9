#include "mprb/snell.hpp"

#include "mprb/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mprb {

NodeProcess snell_envelope(const ScenarioTree& tree, const NodeProcess& eta) {
    NodeProcess R(tree.size());
    for (NodeId id = tree.size(); id-- > 0;) {
        if (tree.is_leaf(id))
            R[id] = eta[id];
        else
            R[id] = std::max(eta[id], conditional_expectation(tree, R, id));
    }
    return R;
}

SnellDecomposition doob_meyer(const ScenarioTree& tree, const NodeProcess& R) {
    SnellDecomposition dec;
    dec.R = R;
    dec.M = NodeProcess(tree.size());
    dec.K = NodeProcess(tree.size());
    dec.dK = NodeProcess(tree.size());
    for (NodeId id = 0; id < tree.size(); ++id) {
        const TreeNode& n = tree.node(id);
        if (n.parent != no_node)
            dec.K[id] = dec.K[n.parent] + dec.dK[n.parent];
        if (!tree.is_leaf(id)) {
            const double drop = R[id] - conditional_expectation(tree, R, id);
            if (drop < -supermartingale_tolerance)
                throw NotSupermartingale(id, -drop);
            dec.dK[id] = std::max(drop, 0.0);
        }
        dec.M[id] = R[id] + dec.K[id];
    }
    return dec;
}

std::vector<NodeId> envelope_jump_support(const ScenarioTree& tree, const SnellDecomposition& dec,
                                          const NodeProcess& eta) {
    std::vector<NodeId> violations;
    for (NodeId id = 0; id < tree.size(); ++id) {
        if (dec.dK[id] > 1e-12 && std::abs(dec.R[id] - eta[id]) > 1e-12)
            violations.push_back(id);
    }
    return violations;
}

} // namespace mprb
