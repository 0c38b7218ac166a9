#pragma once

#include "mprb/rbsde.hpp"

#include <limits>
#include <vector>

namespace mprb {

/// Closed-form generator with certifiable Lipschitz constants:
///   f(t, y, u) = a·y + b·Σ_e c_e φ_t(e) u(e) + d(t, w, n)
///   g(t, y, z) = a·y + b·z + d(t, w, n)
/// with d(t, w, n) = d0 + d1·t + dw·w + dn·n, optionally clipped to [lo, hi].
/// Clipping is 1-Lipschitz, so the constants of the affine part carry over.
struct AffineGenerator {
    double a = 0.0;
    double b = 0.0;
    std::vector<double> c;  ///< mark weights, f only
    double d0 = 0.0;
    double d1 = 0.0;
    double dw = 0.0;
    double dn = 0.0;
    bool clipped = false;
    double clip_lo = -std::numeric_limits<double>::infinity();
    double clip_hi = std::numeric_limits<double>::infinity();

    bool state_free() const { return a == 0.0 && b == 0.0; }
    double offset(const ScenarioTree& tree, NodeId id) const;
    double clip(double v) const;

    bool operator==(const AffineGenerator&) const = default;
};

/// ξ = c0 + w·W_T + n·N_T + wn·W_T·N_T + w_pos·max(W_T, 0).
struct TerminalPayoff {
    double c0 = 0.0;
    double w = 0.0;
    double n = 0.0;
    double wn = 0.0;
    double w_pos = 0.0;

    bool operator==(const TerminalPayoff&) const = default;
};

/// h_k = values[i] + w·W_{t_k} + n·N_{t_k} for t_k in [breakpoints[i], breakpoints[i+1]).
/// On leaves h is capped at ξ so that h_T <= ξ.
struct BarrierSpec {
    std::vector<double> breakpoints{0.0};
    std::vector<double> values{-1e3};
    double w = 0.0;
    double n = 0.0;

    bool operator==(const BarrierSpec&) const = default;
};

/// L_f = |a_f|, L_U = |b_f|·max|c|, L_g = |a_g|, L_Z = |b_g|.
Lipschitz certify_lipschitz(const AffineGenerator& f, const AffineGenerator& g);

FGenerator make_f(AffineGenerator f);
GGenerator make_g(AffineGenerator g);

NodeProcess terminal_values(const ScenarioTree& tree, const TerminalPayoff& payoff);
NodeProcess barrier_values(const ScenarioTree& tree, const BarrierSpec& barrier, const NodeProcess& xi);

GeneratorSpec make_generator_spec(const ScenarioTree& tree, const AffineGenerator& f, const AffineGenerator& g,
                                  const TerminalPayoff& payoff, const BarrierSpec& barrier, double beta,
                                  double delta);

} // namespace mprb
