#pragma once

#include "mprb/families.hpp"
#include "mprb/lattice.hpp"
#include "mprb/rbsde.hpp"

#include <cstddef>
#include <cstdint>

namespace mprb::app {

/// Shape limits for randomized problems.
struct InstanceLimits {
    std::size_t min_steps = 1;
    std::size_t max_steps = 3;
    std::size_t max_marks = 1;
    std::size_t max_interior = 0;   ///< 0: unlimited, otherwise cap on interior nodes
    bool allow_no_brownian = true;
    bool allow_count_driven = true;
    double max_rate = 1.5;      ///< upper bound on the compensator rate
    double max_horizon = 1.5;   ///< horizon drawn from [0.5, max_horizon]
};

struct GivenInstance {
    ScenarioTree tree;
    GivenGenerators gen;
    std::uint64_t seed = 0;
};

struct LipschitzInstance {
    ScenarioTree tree;
    GeneratorSpec gen;
    std::uint64_t seed = 0;
};

/// Random tree with random adapted f, g, h and terminal ξ (h capped at ξ on leaves).
GivenInstance random_given_instance(std::uint64_t seed, const InstanceLimits& limits);

/// Random affine generators f = a y + b Σ c_e φ_e u_e + d(node), g = a' y + b' z + d'(node)
/// with every Lipschitz constant at most `max_lipschitz`; β = L_U² + 2L_f + 0.5.
LipschitzInstance random_lipschitz_instance(std::uint64_t seed, const InstanceLimits& limits,
                                            double max_lipschitz = 0.5);

std::size_t interior_count(const ScenarioTree& tree);

/// Hand-checkable fixtures.
/// E2: one step Δ = 1, no jumps, ξ = W_1, h_0 = 0.5, f = g = 0.
GivenInstance fixture_e2();
/// E3: one step Δ = 1, ΔA = ln 2, m = 1, ξ = N_1, h = -10, f = g = 0.
GivenInstance fixture_e3(bool brownian = true);

} // namespace mprb::app
