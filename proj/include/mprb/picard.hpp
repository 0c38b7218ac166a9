#pragma once

#include "mprb/rbsde.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace mprb {

struct ContractionConfig {
    double beta = 1.0;
    double gamma = 1.0;
    double alpha = 1.0 - 1e-9;
    std::size_t max_iter = 40;
    double tol = 1e-9;
    Lipschitz lipschitz;

    /// β > L_U²/α + 2L_f/√α and γ > L_Z²/α + 2L_g/√α.
    bool admissible() const;
};

/// Largest α in (0, 1) with β > L_U²/α + 2L_f/√α (bisection to 1e-9), then
/// γ = L_Z²/α + 2L_g/√α + 1. Throws BetaTooSmall when β <= L_U² + 2L_f.
ContractionConfig select_contraction_parameters(const Lipschitz& lip, double beta, std::size_t max_iter = 40,
                                                double tol = 1e-9);

/// Element of the iteration space: (Y, U, Z).
struct PicardIterate {
    NodeProcess Y;
    MarkProcess U;
    NodeProcess Z;

    static PicardIterate zero(const ScenarioTree& tree);
    static PicardIterate of(const RbsdeSolution& sol);
};

/// ‖(Y,U,Z)‖² = L_f/√α ‖Y‖²_{β,γ,A} + L_g/√α ‖Y‖²_{β,γ,W} + ‖U‖²_{β,γ,p} + ‖Z‖²_{β,γ,W},
/// returned as the square root of this quantity for the difference a - b.
double composite_distance(const ScenarioTree& tree, const PicardIterate& a, const PicardIterate& b,
                          const ContractionConfig& cfg);
double composite_distance(const ScenarioTree& tree, const RbsdeSolution& a, const RbsdeSolution& b,
                          const ContractionConfig& cfg);

struct PicardTrace {
    std::vector<double> distances;  ///< d_i = ‖x_{i+1} - x_i‖, i = 0, 1, ...
    RbsdeSolution solution;
    GivenGenerators frozen;         ///< generators evaluated at the fixed point's predecessor
    std::size_t iterations = 0;
    bool converged = false;

    /// d_{i+1}/d_i for i >= 1 while d_i > floor.
    std::vector<double> ratios(double floor = 0.0) const;
};

class NoConvergence : public std::runtime_error {
public:
    explicit NoConvergence(PicardTrace trace);
    PicardTrace trace;
};

/// x_{i+1} = Γ(x_i): freeze f(·, P_i, Q_i), g(·, P_i, R_i) node-wise and solve the
/// reflected equation with those generators. Stops when the composite distance
/// between successive iterates is <= tol; throws NoConvergence after max_iter.
/// On a jump-only tree with g empty the jump-only solver is used.
PicardTrace picard_solve(const ScenarioTree& tree, const GeneratorSpec& gen, const ContractionConfig& cfg,
                         const std::optional<PicardIterate>& start = std::nullopt);

} // namespace mprb
