#pragma once

#include "mprb/lattice.hpp"

#include <utility>

namespace mprb {

/// Squared weighted norms over the steps of the tree, weight e^{βA_k + γ t_k}
/// taken at the left endpoint of each step:
///   A:            E Σ_k w_k x_k² ΔA_k
///   W:            E Σ_k w_k x_k² Δ_k
///   p:            E Σ_k w_k Σ_e x_k(e)² φ_k(e) ΔA_k
///   A_plus_lambda: A + W
struct WeightedNorm {
    enum class Kind { A, p, W, A_plus_lambda };
    Kind kind = Kind::A;
    double beta = 0.0;
    double gamma = 0.0;
};

double norm_sq(const ScenarioTree& tree, const NodeProcess& x, const WeightedNorm& w);
double norm_sq(const ScenarioTree& tree, const MarkProcess& x, const WeightedNorm& w);

struct CauchyBound {
    double lhs = 0.0;  ///< max over paths of (Σ f ΔA)²
    double rhs = 0.0;  ///< max over paths of β^{-1} Σ e^{βA_{k+1}} f_k² ΔA_k
    bool holds_pathwise = true;
};

/// Path-wise check of (∫f dA)² ≤ β^{-1} ∫e^{βA} f² dA. The discrete weight is
/// taken at the right endpoint A_{k+1}, for which the inequality holds exactly
/// on any grid. Throws BetaZero for β <= 0.
CauchyBound cauchy_weight_bound(const ScenarioTree& tree, const NodeProcess& f, double beta);

} // namespace mprb
