#pragma once

#include "mprb/lattice.hpp"

#include <vector>

namespace mprb {

/// R = M - K with M a martingale and K predictable, nondecreasing, K_0 = 0.
///
/// In discrete time the increment dK decided at a node applies over
/// (t_k, t_{k+1}]: K at a child equals K + dK at its parent. The whole of K
/// is the jump part; there is no continuous part on a grid.
struct SnellDecomposition {
    NodeProcess R;
    NodeProcess M;
    NodeProcess K;   ///< cumulative, K at node of level k = Σ_{j<k} dK_j along the path
    NodeProcess dK;  ///< R_k - E[R_{k+1} | node], zero at leaves
};

inline constexpr double supermartingale_tolerance = 1e-10;

/// Backward induction R_N = η_N, R_k = max(η_k, E[R_{k+1} | node]).
NodeProcess snell_envelope(const ScenarioTree& tree, const NodeProcess& eta);

/// Throws NotSupermartingale when E[R_{k+1}|node] - R_k > 1e-10 at some node.
SnellDecomposition doob_meyer(const ScenarioTree& tree, const NodeProcess& R);

/// Nodes with dK > 1e-12 where R != η (to 1e-12). Empty for a genuine envelope.
std::vector<NodeId> envelope_jump_support(const ScenarioTree& tree, const SnellDecomposition& dec,
                                          const NodeProcess& eta);

} // namespace mprb
