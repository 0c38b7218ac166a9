#pragma once

#include "mprb/lattice.hpp"
#include "mprb/snell.hpp"

#include <functional>
#include <span>
#include <vector>

namespace mprb {

/// Data (ξ, f, g, h) with generators already evaluated as known processes.
///
/// f and g on a node of level k act over the step (t_k, t_{k+1}]; ξ is read on
/// leaves only. h on leaves must satisfy h ≤ ξ.
struct GivenGenerators {
    NodeProcess xi;
    NodeProcess f;
    NodeProcess g;
    NodeProcess h;
    /// Upper semi-continuity in expectation from the left. Not checkable in
    /// discrete time; every tree process qualifies, so this stays true unless a
    /// caller explicitly withdraws the τ* guarantee.
    bool left_usce_surrogate = true;

    /// Throws std::invalid_argument on size mismatch, non-finite values or h > ξ at a leaf.
    void validate(const ScenarioTree& tree) const;
};

struct Lipschitz {
    double f = 0.0;  ///< in y, for f
    double u = 0.0;  ///< in u (L² of φ), for f
    double g = 0.0;  ///< in y, for g
    double z = 0.0;  ///< in z, for g

    bool operator==(const Lipschitz&) const = default;
};

using FGenerator = std::function<double(const ScenarioTree&, NodeId, double y, std::span<const double> u)>;
using GGenerator = std::function<double(const ScenarioTree&, NodeId, double y, double z)>;

/// General state-dependent data. An empty `g` stands for g ≡ 0.
struct GeneratorSpec {
    NodeProcess xi;
    NodeProcess h;
    FGenerator f;
    GGenerator g;
    Lipschitz lipschitz;
    double beta = 1.0;
    double delta = 0.1;
    bool left_usce_surrogate = true;
};

/// Evaluate f(node, P, Q) and g(node, P, R) node-wise.
GivenGenerators freeze(const ScenarioTree& tree, const GeneratorSpec& spec, const NodeProcess& P,
                       const MarkProcess& Q, const NodeProcess& R);

struct RbsdeSolution {
    NodeProcess Y;
    MarkProcess U;
    NodeProcess Z;         ///< empty in jump-only mode
    NodeProcess K;         ///< cumulative
    NodeProcess dK;        ///< increment decided at the node, applied over the next step
    NodeProcess residual;  ///< per-node L² representation residual of Y over the children
    std::vector<bool> degenerate_marks;  ///< node-major flags from the representation step
};

/// Explicit reflected recursion:
///   Y_N = ξ,  Ỹ_k = E[Y_{k+1}|node] + f_k ΔA_k + g_k Δ_k,
///   Y_k = max(Ỹ_k, h_k),  dK_k = (h_k - Ỹ_k)⁺,
/// with (Z_k, U_k) from the one-step representation of Y_{k+1}.
RbsdeSolution solve_given_generators(const ScenarioTree& tree, const GivenGenerators& gen);

/// Same scheme on a jump-only tree; Z is left empty. Throws
/// BrownianBranchesPresent on a tree with Brownian branching and
/// std::invalid_argument when g is not identically zero.
RbsdeSolution solve_mpp_only(const ScenarioTree& tree, const GivenGenerators& gen);

/// I_k = Σ_{j<k} (f_j ΔA_j + g_j Δ_j) along the path.
NodeProcess running_integrals(const ScenarioTree& tree, const GivenGenerators& gen);

/// η_k = I_k + h_k before the horizon, η_N = I_N + ξ.
NodeProcess reward_process(const ScenarioTree& tree, const GivenGenerators& gen);

/// Y = R(η) - I with R(η) the Snell envelope, K and (Z, U) from its Doob-Meyer split.
RbsdeSolution solve_via_snell(const ScenarioTree& tree, const GivenGenerators& gen);

struct SkorohodReport {
    double max_product = 0.0;            ///< max (Y_k - h_k)·dK_k
    double max_negative_increment = 0.0; ///< max (-dK_k)⁺
    double max_barrier_violation = 0.0;  ///< max (h_k - Y_k)⁺
    double max_terminal_mismatch = 0.0;  ///< max |Y_N - ξ|, only when ξ is supplied
    NodeId worst_product_node = no_node;
    NodeId worst_barrier_node = no_node;

    bool passed(double tol = 1e-12) const {
        return max_product <= tol && max_negative_increment <= tol && max_barrier_violation <= tol &&
               max_terminal_mismatch <= tol;
    }
};

SkorohodReport check_skorohod(const ScenarioTree& tree, const RbsdeSolution& sol, const NodeProcess& h);
SkorohodReport check_skorohod(const ScenarioTree& tree, const RbsdeSolution& sol, const GivenGenerators& gen);

/// Per-branch residual of the one-step equation
///   Y_k - [Y_{k+1} + f ΔA + g Δ - Σ_e U_k(e) Δq(e) - Z_k ΔW + dK_k],
/// stored on the child node.
struct EquationResidual {
    NodeProcess branch;           ///< value for the branch into each non-root node
    NodeProcess conditional_mean; ///< E[branch | node] for each non-leaf node
    NodeProcess magnitude;        ///< L² norm of branch under the child measure
    double max_abs_mean = 0.0;
    double max_abs_branch = 0.0;
    double max_magnitude = 0.0;
};

EquationResidual check_equation_residual(const ScenarioTree& tree, const RbsdeSolution& sol,
                                         const GivenGenerators& gen);

/// Majorant S_k = E[e^{βA_T/2}|ξ| + β^{-1/2}(Σ e^{βA_{j+1}} f_j² ΔA_j)^{1/2}
///                  + Σ e^{βA_j/2}|g_j| Δ_j + max_{j<N} e^{βA_j/2}|h_j| | node]
/// with sums over the whole path.
struct MajorantReport {
    NodeProcess S;
    NodeProcess weighted_abs_y;   ///< e^{βA_k/2}|Y_k|
    std::vector<NodeId> violations;
};

MajorantReport a_priori_majorant(const ScenarioTree& tree, const GivenGenerators& gen,
                                 const RbsdeSolution& sol, double beta);

} // namespace mprb
